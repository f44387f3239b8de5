"""Quantum probability models, inequality evaluation, and parameter scans.

Two models are shipped.  The three-particle interferometer assigns every
single event probability 1/2, every cross-party pair 1/4, and the triples
P(A_i B_j C_k) = (1/8) [1 - sin(phi_A,i + phi_B,j + phi_C,k)].  The
two-particle singlet assigns singles 1/2 and cross-party pairs
(1/2) sin^2(d/2)  (same-outcome convention)  or  (1/2) cos^2(d/2)
(opposite-outcome convention), d the difference of the measurement angles.

Angles may be exact rational multiples of pi; where the sines involved are
rational (multiples of pi/2, and pi/6 for the singlet cosines) the models can
produce exact Fraction assignments, which is what pins the violation census
without any float ambiguity.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import FormatError, MissingProbability, UnsupportedMonomial
from .inequality import Inequality
from .scenario import EventId, Monomial, Scenario

VIOLATION_ATOL = 1e-9

_ANGLE_RE = re.compile(r"^(-?)(\d+)?pi(?:/(\d+))?$")

# sin(k*pi) for the k mod 2 values where it is rational
_EXACT_SIN = {
    Fraction(0): Fraction(0),
    Fraction(1): Fraction(0),
    Fraction(1, 2): Fraction(1),
    Fraction(3, 2): Fraction(-1),
    Fraction(1, 6): Fraction(1, 2),
    Fraction(5, 6): Fraction(1, 2),
    Fraction(7, 6): Fraction(-1, 2),
    Fraction(11, 6): Fraction(-1, 2),
}


@dataclass(frozen=True)
class Angle:
    """An angle in radians, optionally exact as pi_multiple * pi."""

    radians: float
    pi_multiple: Fraction | None = None

    @classmethod
    def exact(cls, pi_multiple) -> "Angle":
        k = Fraction(pi_multiple)
        return cls(radians=float(k) * math.pi, pi_multiple=k)

    @classmethod
    def parse(cls, text: str) -> "Angle":
        """'pi/2', '2pi/3', '-pi/4', '0', or a plain float literal."""
        t = text.strip().lower().replace(" ", "")
        m = _ANGLE_RE.match(t)
        if m:
            sign = -1 if m.group(1) else 1
            num = int(m.group(2) or 1)
            den = int(m.group(3) or 1)
            return cls.exact(Fraction(sign * num, den))
        try:
            value = float(t)
        except ValueError:
            raise FormatError(f"cannot parse angle {text!r}") from None
        if value == 0:
            return cls.exact(0)
        return cls(radians=value)

    def __add__(self, other: "Angle") -> "Angle":
        if self.pi_multiple is not None and other.pi_multiple is not None:
            return Angle.exact(self.pi_multiple + other.pi_multiple)
        return Angle(radians=self.radians + other.radians)

    def __sub__(self, other: "Angle") -> "Angle":
        if self.pi_multiple is not None and other.pi_multiple is not None:
            return Angle.exact(self.pi_multiple - other.pi_multiple)
        return Angle(radians=self.radians - other.radians)

    def exact_sin(self) -> Fraction | None:
        if self.pi_multiple is None:
            return None
        return _EXACT_SIN.get(self.pi_multiple % 2)

    def exact_cos(self) -> Fraction | None:
        if self.pi_multiple is None:
            return None
        return _EXACT_SIN.get((self.pi_multiple + Fraction(1, 2)) % 2)

    def __str__(self):
        if self.pi_multiple is not None:
            k = self.pi_multiple
            if k == 0:
                return "0"
            num = f"{k.numerator}pi" if abs(k.numerator) != 1 else ("-pi" if k.numerator < 0 else "pi")
            return num if k.denominator == 1 else f"{num}/{k.denominator}"
        return repr(self.radians)


ZERO_ANGLE = Angle.exact(0)


# ---------------------------------------------------------------------------
# model parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GhzParams:
    """Interferometer angles phi[(party, setting)]."""

    angles: Mapping[tuple[str, int], Angle]

    @classmethod
    def uniform(cls, phi1: Angle, phi2: Angle, parties=("A", "B", "C")) -> "GhzParams":
        return cls({(p, 1): phi1 for p in parties} | {(p, 2): phi2 for p in parties})

    def describe(self) -> str:
        return " ".join(f"phi[{p},{s}]={a}" for (p, s), a in sorted(self.angles.items()))


@dataclass(frozen=True)
class SingletParams:
    """Measurement direction per event and the joint-outcome convention."""

    directions: Mapping[EventId, Angle]
    parity: str = "parallel"  # 'parallel' (same outcomes) or 'opposite'

    def __post_init__(self):
        if self.parity not in ("parallel", "opposite"):
            raise FormatError(f"parity must be parallel or opposite, got {self.parity!r}")

    @classmethod
    def symmetric(cls, settings: Sequence[Angle], parties=("A", "B"), parity="parallel") -> "SingletParams":
        dirs = {
            EventId(p, i + 1): angle
            for p in parties
            for i, angle in enumerate(settings)
        }
        return cls(dirs, parity)

    def describe(self) -> str:
        dirs = " ".join(f"theta[{e}]={a}" for e, a in sorted(self.directions.items()))
        return f"parity={self.parity} {dirs}"


@dataclass(frozen=True)
class ProbabilityAssignment:
    """Map monomial -> probability; values are floats or exact Fractions."""

    values: Mapping[Monomial, float | Fraction]
    exact: bool = False

    def __post_init__(self):
        for m, v in self.values.items():
            if v < -1e-12 or v > 1 + 1e-12:
                raise AssertionError(f"P({m}) = {v} is outside [0, 1]")

    def vector(self, scenario: Scenario):
        out = []
        for m in scenario.monomials:
            if m not in self.values:
                raise MissingProbability(f"no probability for {m}")
            out.append(self.values[m])
        return out

    def assert_monotone(self, scenario: Scenario, atol: float = 1e-12):
        """P(joint) <= P(sub-monomial) whenever both are in the basis."""
        for m in scenario.monomials:
            if m.size == 1:
                continue
            for e in m.events:
                sub = m.without(e)
                if sub in self.values and self.values[m] > self.values[sub] + atol:
                    raise AssertionError(f"P({m}) > P({sub})")


# ---------------------------------------------------------------------------
# the two models
# ---------------------------------------------------------------------------

def _ghz_classify(m: Monomial):
    parties = [e.party for e in m.events]
    if len(set(parties)) != m.size or any(p not in ("A", "B", "C") for p in parties):
        raise UnsupportedMonomial(f"the interferometer model does not define P({m})")
    if any(e.setting not in (1, 2) for e in m.events):
        raise UnsupportedMonomial(f"the interferometer model does not define P({m})")
    return m.size


def ghz_assignment(scenario: Scenario, params: GhzParams, exact: bool = False) -> ProbabilityAssignment:
    """Singles 1/2, cross-party pairs 1/4, triples by the sine formula."""
    values: dict[Monomial, float | Fraction] = {}
    for m in scenario.monomials:
        size = _ghz_classify(m)
        if size == 1:
            values[m] = Fraction(1, 2) if exact else 0.5
        elif size == 2:
            values[m] = Fraction(1, 4) if exact else 0.25
        elif size == 3:
            total = ZERO_ANGLE
            for e in m.events:
                total = total + params.angles[(e.party, e.setting)]
            if exact:
                s = total.exact_sin()
                if s is None:
                    raise FormatError(
                        f"sin({total}) is irrational; exact evaluation impossible"
                    )
                values[m] = Fraction(1, 8) * (1 - s)
            else:
                values[m] = (1.0 - math.sin(total.radians)) / 8.0
        else:
            raise UnsupportedMonomial(f"the interferometer model does not define P({m})")
    out = ProbabilityAssignment(values, exact=exact)
    out.assert_monotone(scenario)
    return out


def singlet_assignment(scenario: Scenario, params: SingletParams, exact: bool = False) -> ProbabilityAssignment:
    """Singles 1/2; cross-party pairs from the relative angle.

    parallel: (1/2) sin^2(d/2) = (1 - cos d)/4
    opposite: (1/2) cos^2(d/2) = (1 + cos d)/4
    """
    sign = -1 if params.parity == "parallel" else 1
    values: dict[Monomial, float | Fraction] = {}
    for m in scenario.monomials:
        if m.size == 1:
            values[m] = Fraction(1, 2) if exact else 0.5
        elif m.size == 2:
            a, b = m.events
            if a.party == b.party:
                raise UnsupportedMonomial(f"the singlet model does not define P({m})")
            delta = params.directions[a] - params.directions[b]
            if exact:
                c = delta.exact_cos()
                if c is None:
                    raise FormatError(
                        f"cos({delta}) is irrational; exact evaluation impossible"
                    )
                values[m] = Fraction(1 + sign * c, 4)
            else:
                values[m] = (1.0 + sign * math.cos(delta.radians)) / 4.0
        else:
            raise UnsupportedMonomial(f"the singlet model does not define P({m})")
    out = ProbabilityAssignment(values, exact=exact)
    out.assert_monotone(scenario)
    return out


MODELS: dict[str, Callable] = {
    "ghz": ghz_assignment,
    "singlet": singlet_assignment,
}


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ViolationRecord:
    ineq_id: str
    params: str
    bound: int
    value: float | Fraction
    violation: float | Fraction
    violated: bool


def evaluate(
    ineq: Inequality,
    assignment: ProbabilityAssignment,
    scenario: Scenario,
    ineq_id: str = "?",
    params: str = "",
    atol: float = VIOLATION_ATOL,
) -> ViolationRecord:
    """Quantum value coeffs . P and its excess over the classical bound."""
    value = 0
    for c, m in zip(ineq.coeffs, scenario.monomials):
        if not c:
            continue
        if m not in assignment.values:
            raise MissingProbability(f"assignment lacks P({m}) needed by {ineq_id}")
        value += c * assignment.values[m]
    violation = value - ineq.bound
    if assignment.exact:
        violated = violation > 0
    else:
        violated = violation > atol
    return ViolationRecord(ineq_id, params, ineq.bound, value, violation, violated)


def evaluate_all(
    ineqs: Sequence[Inequality],
    assignment: ProbabilityAssignment,
    scenario: Scenario,
    ids: Sequence[str] | None = None,
    params: str = "",
    atol: float = VIOLATION_ATOL,
) -> list[ViolationRecord]:
    """Batch evaluation; exact assignments go through integer arithmetic."""
    ids = ids or [str(i + 1) for i in range(len(ineqs))]
    vec = assignment.vector(scenario)
    if assignment.exact:
        denom = math.lcm(*(Fraction(v).denominator for v in vec)) if vec else 1
        pint = np.array([int(Fraction(v) * denom) for v in vec], dtype=np.int64)
        C = np.array([iq.coeffs for iq in ineqs], dtype=np.int64)
        b = np.array([iq.bound for iq in ineqs], dtype=np.int64)
        if abs(C).max(initial=0) * abs(pint).max(initial=1) * len(vec) >= 2 ** 62:
            return [evaluate(iq, assignment, scenario, i, params, atol) for i, iq in zip(ids, ineqs)]
        scaled = C @ pint
        out = []
        for i, iq in enumerate(ineqs):
            value = Fraction(int(scaled[i]), denom)
            violation = value - iq.bound
            out.append(ViolationRecord(ids[i], params, iq.bound, value, violation, violation > 0))
        return out
    return [evaluate(iq, assignment, scenario, i, params, atol) for i, iq in zip(ids, ineqs)]


# ---------------------------------------------------------------------------
# grids and sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridAxis:
    name: str
    start: Angle
    stop: Angle
    count: int

    def points(self) -> list[Angle]:
        if self.count < 1:
            raise FormatError("grid needs at least one point")
        if self.count == 1:
            return [self.start]
        pts = []
        exact = self.start.pi_multiple is not None and self.stop.pi_multiple is not None
        for i in range(self.count):
            if exact:
                k = self.start.pi_multiple + (self.stop.pi_multiple - self.start.pi_multiple) * Fraction(i, self.count - 1)
                pts.append(Angle.exact(k))
            else:
                x = self.start.radians + (self.stop.radians - self.start.radians) * i / (self.count - 1)
                pts.append(Angle(radians=x))
        return pts

    @classmethod
    def parse(cls, name: str, text: str) -> "GridAxis":
        parts = text.split(":")
        if len(parts) != 3:
            raise FormatError(f"grid spec must be start:stop:count, got {text!r}")
        return cls(name, Angle.parse(parts[0]), Angle.parse(parts[1]), int(parts[2]))


@dataclass(frozen=True)
class SweepFamily:
    """Binds 1-D or 2-D grid coordinates to model parameters."""

    name: str
    model: str
    axes: tuple[str, ...]
    bind: Callable[..., object]
    default_grid: tuple[str, ...]   # start:stop:count per axis


def _bind_ghz_phi2(phi2: Angle, parity: str) -> GhzParams:
    return GhzParams.uniform(ZERO_ANGLE, phi2)


def _bind_ghz_phi1_phi2(phi1: Angle, phi2: Angle, parity: str) -> GhzParams:
    return GhzParams.uniform(phi1, phi2)


def _bind_singlet_theta2(theta2: Angle, parity: str) -> SingletParams:
    # theta1 = 0, theta3 = 2pi - theta2
    theta3 = Angle.exact(2) - theta2 if theta2.pi_multiple is not None else Angle(2 * math.pi - theta2.radians)
    return SingletParams.symmetric([ZERO_ANGLE, theta2, theta3], parity=parity)


def _bind_singlet_theta2_theta3(theta2: Angle, theta3: Angle, parity: str) -> SingletParams:
    return SingletParams.symmetric([ZERO_ANGLE, theta2, theta3], parity=parity)


SWEEPS: dict[str, SweepFamily] = {
    "ghz-phi2": SweepFamily(
        "ghz-phi2", "ghz", ("phi2",), _bind_ghz_phi2, ("0:pi:512",)),
    "ghz-phi1-phi2": SweepFamily(
        "ghz-phi1-phi2", "ghz", ("phi1", "phi2"), _bind_ghz_phi1_phi2, ("0:pi:33", "0:pi:33")),
    "singlet-theta2": SweepFamily(
        "singlet-theta2", "singlet", ("theta2",), _bind_singlet_theta2, ("0:pi:512",)),
    "singlet-theta2-theta3": SweepFamily(
        "singlet-theta2-theta3", "singlet", ("theta2", "theta3"),
        _bind_singlet_theta2_theta3, ("0:pi:33", "0:pi:33")),
}


@dataclass
class ScanResult:
    family: SweepFamily
    parity: str
    axes: tuple[GridAxis, ...]
    grid: list[tuple[Angle, ...]]          # cartesian, first axis slowest
    ids: list[str]
    bounds: np.ndarray                     # (M,)
    values: np.ndarray                     # (npoints, M)
    atol: float = VIOLATION_ATOL
    refined: dict | None = None

    @property
    def violations(self) -> np.ndarray:
        return self.values - self.bounds[None, :]

    @property
    def violated(self) -> np.ndarray:
        return self.violations > self.atol

    def per_point_counts(self) -> np.ndarray:
        return self.violated.sum(axis=1)

    def summary(self) -> dict:
        viol = self.violations
        flat = int(np.argmax(viol))
        pi, mi = divmod(flat, viol.shape[1])
        out = {
            "family": self.family.name,
            "parity": self.parity,
            "points": len(self.grid),
            "inequalities": len(self.ids),
            "violated_total": int(self.violated.sum()),
            "max_violation": float(viol[pi, mi]),
            "argmax_inequality": self.ids[mi],
            "argmax_point": {
                name: float(a.radians) for name, a in zip(self.family.axes, self.grid[pi])
            },
            "per_point_violated_counts": [int(x) for x in self.per_point_counts()],
        }
        if self.refined:
            out["refined"] = self.refined
        return out

    def summary_text(self) -> str:
        return json.dumps(self.summary(), indent=2)

    def write_csv(self, fp):
        axis_headers = ["grid_param_1"] + (["grid_param_2"] if len(self.family.axes) > 1 else [])
        fp.write(",".join(axis_headers + ["inequality_id", "bound", "value", "violation", "violated"]) + "\n")
        for pi, point in enumerate(self.grid):
            coords = [repr(a.radians) for a in point]
            row_vals = self.values[pi]
            row_viol = self.violations[pi]
            row_flag = self.violated[pi]
            for mi, ineq_id in enumerate(self.ids):
                fp.write(",".join(
                    coords + [ineq_id, repr(int(self.bounds[mi])),
                              repr(float(row_vals[mi])), repr(float(row_viol[mi])),
                              "1" if row_flag[mi] else "0"]
                ) + "\n")


def scan(
    ineqs: Sequence[Inequality],
    scenario: Scenario,
    family: SweepFamily | str,
    grid: Sequence[GridAxis] | None = None,
    parity: str = "parallel",
    ids: Sequence[str] | None = None,
    threads: int = 1,
    refine: bool = True,
    atol: float = VIOLATION_ATOL,
) -> ScanResult:
    """Evaluate every inequality at every grid point of a sweep family.

    Output arrays are in canonical (grid point, inequality) order regardless
    of the thread count.
    """
    if isinstance(family, str):
        family = SWEEPS[family]
    if grid is None:
        grid = [GridAxis.parse(n, spec) for n, spec in zip(family.axes, family.default_grid)]
    grid = list(grid)
    if len(grid) != len(family.axes):
        raise FormatError(f"{family.name} needs {len(family.axes)} grid axes, got {len(grid)}")
    ids = list(ids) if ids else [str(i + 1) for i in range(len(ineqs))]

    axes_points = [axis.points() for axis in grid]
    points: list[tuple[Angle, ...]] = []
    if len(axes_points) == 1:
        points = [(a,) for a in axes_points[0]]
    else:
        points = [(a, b) for a in axes_points[0] for b in axes_points[1]]

    C = np.array([iq.coeffs for iq in ineqs], dtype=np.float64)
    bounds = np.array([iq.bound for iq in ineqs], dtype=np.float64)
    model = MODELS[family.model]

    def eval_point(point) -> np.ndarray:
        params = family.bind(*point, parity=parity)
        assignment = model(scenario, params)
        p = np.array([float(v) for v in assignment.vector(scenario)])
        return C @ p

    if threads <= 1 or len(points) < 8:
        rows = [eval_point(pt) for pt in points]
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(eval_point, points))
    values = np.array(rows) if rows else np.zeros((0, len(ineqs)))

    result = ScanResult(
        family=family, parity=parity, axes=tuple(grid), grid=points,
        ids=ids, bounds=bounds, values=values, atol=atol,
    )
    if refine and len(points) >= 3 and len(grid) == 1 and len(ineqs):
        result.refined = _refine_argmax(result, scenario, family, parity, C)
    return result


def _refine_argmax(result: ScanResult, scenario, family, parity, C) -> dict:
    """Golden-section polish of the grid argmax for the winning inequality."""
    viol = result.violations
    flat = int(np.argmax(viol))
    pi, mi = divmod(flat, viol.shape[1])
    lo = max(pi - 1, 0)
    hi = min(pi + 1, len(result.grid) - 1)
    a = result.grid[lo][0].radians
    b = result.grid[hi][0].radians
    coeffs = C[mi]
    bound = float(result.bounds[mi])
    model = MODELS[family.model]

    def f(x: float) -> float:
        params = family.bind(Angle(radians=x), parity=parity)
        assignment = model(scenario, params)
        p = np.array([float(v) for v in assignment.vector(scenario)])
        return float(coeffs @ p) - bound

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(80):
        if b - a < 1e-12:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
    x = (a + b) / 2.0
    return {
        "inequality": result.ids[mi],
        "param": x,
        "max_violation": f(x),
    }
