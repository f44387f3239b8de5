"""Command-line front end: vertices, facets, orbits, check, scan, membership.

Exit codes: 0 success, 1 usage error (bad flags, unparsable or missing
inputs), 2 resource or computation error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import catalog
from .dd import facet_enumeration, verify_h_representation
from .errors import BooleBellError, FormatError, ResourceExhausted, ScenarioTooLarge
from .inequality import format_inequalities, read_inequalities
from .lp import membership
from .quantum import (
    SWEEPS,
    Angle,
    GhzParams,
    GridAxis,
    SingletParams,
    evaluate_all,
    scan,
)
from .scenario import PRESETS, Point, Scenario, enumerate_vertices, load_scenario, preset
from .symmetry import (
    closure_failures,
    default_permutations,
    format_orbit_report,
    full_group,
    generate_group,
    orbit_reduce,
)

USAGE_ERROR = 1
COMPUTE_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _add_scenario_args(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--preset", help="built-in scenario name (ch, ghz26, two-by-three, bell-wigner, ghz-singles-triples)")
    g.add_argument("--scenario", metavar="FILE", help="scenario file path")


def _resolve_scenario(args, header=None) -> Scenario | None:
    if getattr(args, "preset", None):
        return preset(args.preset)
    if getattr(args, "scenario", None):
        return load_scenario(args.scenario)
    if header and header.get("scenario") in PRESETS:
        return preset(header["scenario"])
    return None


def _write_or_stdout(text: str, out: str | None, what: str) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit(args, text, count_msg):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(count_msg)
    else:
        sys.stdout.write(text)
        print(count_msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# point / vertex files
# ---------------------------------------------------------------------------

def parse_points_text(text: str) -> list[Point]:
    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        coords = []
        for tok in line.split():
            try:
                coords.append(Fraction(tok))
            except ValueError:
                raise FormatError(f"line {lineno}: cannot parse coordinate {tok!r}") from None
        points.append(Point(tuple(coords)))
    if not points:
        raise FormatError("no points in file")
    return points


def load_points(path) -> list[Point]:
    return parse_points_text(Path(path).read_text(encoding="utf-8"))


def format_vertices(scenario: Scenario, vertices) -> str:
    lines = [
        f"# scenario: {scenario.name}",
        "# basis: " + " ".join(scenario.basis_names()),
    ]
    lines.extend(" ".join(str(c) for c in v.coords) for v in vertices)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_vertices(args):
    scenario = _resolve_scenario(args)
    vertices = enumerate_vertices(scenario)
    _emit(args, format_vertices(scenario, vertices), f"vertices: {len(vertices)}")
    return 0


def cmd_facets(args):
    scenario = None
    if args.vertices:
        vertices = load_points(args.vertices)
    else:
        scenario = _resolve_scenario(args)
        if scenario.name == "ghz26" and not args.slow:
            raise FormatError("the ghz26 hull run is expensive; pass --slow to enable it")
        vertices = enumerate_vertices(scenario)
    hrep = facet_enumeration(
        vertices,
        scenario=scenario,
        ray_cap=args.ray_cap,
        threads=args.threads,
        insertion=args.insertion,
    )
    extra = []
    if hrep.equalities:
        extra.append(f"implicit equalities: {len(hrep.equalities)}")
        extra.extend(f"equality: {eq.to_line()}" for eq in hrep.equalities)
    if args.verify:
        report = verify_h_representation(vertices, hrep)
        if not report.ok:
            raise BooleBellError(f"self-check failed: {report.summary()}")
        extra.append("verified: validity, tightness, irredundancy")
    text = format_inequalities(hrep.facets, scenario, extra_header=extra)
    _emit(args, text, f"facets: {len(hrep.facets)}")
    return 0


_GROUPS = ("full", "complementations", "settings", "trivial")


def _build_group(scenario, which):
    if which == "trivial":
        return generate_group(scenario, (), complementations=False)
    if which == "complementations":
        return generate_group(scenario, (), complementations=True)
    perms = default_permutations(scenario)
    if which == "settings":
        perms = [(n, m) for n, m in perms if not n.startswith("swap[") or "<->" in n and n[5].isalpha() and n[6] in "0123456789"]
        perms = [(n, m) for n, m in perms if any(ch.isdigit() for ch in n)]
        return generate_group(scenario, perms, complementations=True)
    return full_group(scenario)


def cmd_orbits(args):
    ineqs, header = read_inequalities(args.ineqs)
    scenario = _resolve_scenario(args, header)
    if scenario is None:
        raise FormatError("orbits needs --preset or --scenario (or a recognized file header)")
    group = _build_group(scenario, args.group)
    failures = closure_failures(scenario, ineqs, group)
    if failures:
        name, src, img = failures[0]
        raise BooleBellError(
            f"closure check failed: generator {name} maps {src.to_line()!r} "
            f"outside the input set (to {img.to_line()!r})"
        )
    orbits = orbit_reduce(ineqs, group, keep_words=args.words)
    text = format_orbit_report(orbits, scenario, group, verbose=args.words)
    _emit(args, text, f"orbits: {len(orbits)} (group order {group.order}; closure check passed)")
    return 0


def _angles_list(text: str) -> list[Angle]:
    return [Angle.parse(tok) for tok in text.split(",")]


def _model_assignment(args, scenario):
    from .quantum import ghz_assignment, singlet_assignment

    if args.config:
        kind, params = catalog.model_config(args.config)
    elif args.model == "ghz":
        params = GhzParams.uniform(Angle.parse(args.phi1), Angle.parse(args.phi2))
        kind = "ghz"
    elif args.model == "singlet":
        if not (args.theta_a and args.theta_b):
            raise FormatError("singlet model needs --theta-a and --theta-b")
        ta, tb = _angles_list(args.theta_a), _angles_list(args.theta_b)
        from .scenario import EventId
        dirs = {EventId("A", i + 1): a for i, a in enumerate(ta)}
        dirs |= {EventId("B", i + 1): a for i, a in enumerate(tb)}
        params = SingletParams(dirs, args.parity)
        kind = "singlet"
    else:
        raise FormatError("check needs --config, --model, or --point")
    model = {"ghz": ghz_assignment, "singlet": singlet_assignment}[kind]
    return model(scenario, params, exact=args.exact), params


def _records_csv(records) -> str:
    lines = ["inequality_id,bound,value,violation,violated"]
    for r in records:
        lines.append(",".join([
            r.ineq_id, repr(int(r.bound)), repr(float(r.value)),
            repr(float(r.violation)), "1" if r.violated else "0",
        ]))
    return "\n".join(lines) + "\n"


def cmd_check(args):
    ineqs, header = read_inequalities(args.ineqs)
    ids = [str(i + 1) for i in range(len(ineqs))]
    if args.point:
        points = load_points(args.point)
        if len(points) != 1:
            raise FormatError("check --point expects exactly one point")
        coords = points[0].coords
        records = []
        from .quantum import ViolationRecord
        for i, iq in zip(ids, ineqs):
            value = iq.evaluate(coords)
            violation = value - iq.bound
            records.append(ViolationRecord(i, "point", iq.bound, value, violation, violation > 0))
    else:
        scenario = _resolve_scenario(args, header)
        if scenario is None:
            raise FormatError("check needs --preset/--scenario to bind the model to a basis")
        assignment, params = _model_assignment(args, scenario)
        records = evaluate_all(ineqs, assignment, scenario, ids=ids)
    violated = [r for r in records if r.violated]
    if args.out:
        Path(args.out).write_text(_records_csv(records), encoding="utf-8")
    for r in violated[: args.show]:
        print(f"  {r.ineq_id}: value {r.value} vs bound {r.bound} (violation {r.violation})")
    print(f"violated: {len(violated)} / {len(records)}")
    return 0


def cmd_scan(args):
    ineqs, header = read_inequalities(args.ineqs)
    scenario = _resolve_scenario(args, header)
    if scenario is None:
        raise FormatError("scan needs --preset/--scenario to bind the model to a basis")
    family = SWEEPS.get(args.sweep)
    if family is None:
        raise FormatError(f"unknown sweep {args.sweep!r}; known: {', '.join(sorted(SWEEPS))}")
    grid = None
    if args.grid:
        specs = [args.grid] + ([args.grid2] if args.grid2 else [])
        if len(specs) != len(family.axes):
            raise FormatError(f"{family.name} needs {len(family.axes)} grid axes")
        grid = [GridAxis.parse(n, s) for n, s in zip(family.axes, specs)]
    result = scan(
        ineqs, scenario, family, grid=grid, parity=args.parity,
        threads=args.threads, refine=not args.no_refine,
    )
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fp:
        result.write_csv(fp)
    if args.summary:
        Path(args.summary).write_text(result.summary_text() + "\n", encoding="utf-8")
    plot_path = None
    if not args.no_plot:
        plot_path = args.plot or str(out.with_suffix(".png"))
        from .plotting import render_scan
        render_scan(result, plot_path)
    print(result.summary_text())
    if plot_path:
        print(f"figure: {plot_path}", file=sys.stderr)
    return 0


def cmd_membership(args):
    scenario = _resolve_scenario(args)
    vertices = enumerate_vertices(scenario)
    points = load_points(args.point)
    lines = []
    for i, pt in enumerate(points):
        cert = membership(pt, vertices)
        if cert.inside:
            lines.append(f"point {i + 1}: inside")
            for idx, w in cert.weights:
                lines.append(f"  weight {idx} {w}")
        else:
            lines.append(f"point {i + 1}: outside")
            lines.append(f"  separator: {cert.separator.to_line()}")
            lines.append(f"  separator value: {cert.separator.evaluate(pt)}"
                         f" > bound {cert.separator.bound}")
    text = "\n".join(lines) + "\n"
    _write_or_stdout(text, args.out, "membership")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="boolebell", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vertices", help="enumerate the 0/1 vertices of a scenario")
    _add_scenario_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("facets", help="complete facet system via double description")
    _add_scenario_args(p, required=False)
    p.add_argument("--vertices", metavar="FILE", help="vertex file instead of a scenario")
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--ray-cap", type=int, default=1_000_000)
    p.add_argument("--slow", action="store_true", help="enable the ghz26 run")
    p.add_argument("--insertion", choices=("lex", "maxcutoff"), default="lex")
    p.add_argument("--verify", action="store_true", help="re-verify the output system")
    p.set_defaults(func=cmd_facets)

    p = sub.add_parser("orbits", help="reduce an inequality file by symmetry orbits")
    p.add_argument("--ineqs", required=True)
    _add_scenario_args(p, required=False)
    p.add_argument("--group", choices=_GROUPS, default="full")
    p.add_argument("--words", action="store_true", help="list members with generator words")
    p.add_argument("--out")
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("check", help="evaluate inequalities against a model or point")
    p.add_argument("--ineqs", required=True)
    _add_scenario_args(p, required=False)
    p.add_argument("--config", help=f"named model config ({', '.join(sorted(catalog.MODEL_CONFIGS))})")
    p.add_argument("--model", choices=("ghz", "singlet"))
    p.add_argument("--phi1", default="0")
    p.add_argument("--phi2", default="0")
    p.add_argument("--theta-a", help="comma-separated angles for party A")
    p.add_argument("--theta-b", help="comma-separated angles for party B")
    p.add_argument("--parity", choices=("parallel", "opposite"), default="parallel")
    p.add_argument("--point", metavar="FILE", help="evaluate a raw point instead of a model")
    p.add_argument("--exact", action="store_true", help="exact rational evaluation")
    p.add_argument("--show", type=int, default=0, help="print the first N violated records")
    p.add_argument("--out", help="write per-inequality records as CSV")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("scan", help="sweep model parameters over a grid")
    p.add_argument("--ineqs", required=True)
    _add_scenario_args(p, required=False)
    p.add_argument("--sweep", required=True, help=f"sweep family ({', '.join(sorted(SWEEPS))})")
    p.add_argument("--grid", help="start:stop:count (angles accept pi syntax)")
    p.add_argument("--grid2", help="second axis for 2-D families")
    p.add_argument("--parity", choices=("parallel", "opposite"), default="parallel")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--summary", help="also write the summary JSON here")
    p.add_argument("--plot", help="figure path (default: CSV path with .png)")
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--no-refine", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("membership", help="exact membership with certificate")
    _add_scenario_args(p)
    p.add_argument("--point", required=True, metavar="FILE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_membership)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"boolebell: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FormatError as exc:
        print(f"boolebell: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ResourceExhausted, ScenarioTooLarge) as exc:
        print(f"boolebell: error: {exc}", file=sys.stderr)
        return COMPUTE_ERROR
    except BooleBellError as exc:
        print(f"boolebell: error: {exc}", file=sys.stderr)
        return COMPUTE_ERROR


if __name__ == "__main__":
    sys.exit(main())
