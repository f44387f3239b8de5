"""Integer inequalities over a scenario basis, and the inequality file format.

An inequality is stored as coeffs . p <= bound with integer entries whose
common gcd is 1.  The orientation is semantic (the polytope lies on the <=
side), so canonicalization never flips signs; two inequalities are equal iff
they are integer-identical after gcd reduction.

File format (one facet per line, canonically sorted):

    # scenario: ch
    # basis: A1 A2 B1 B2 A1B1 A1B2 A2B1 A2B2
    # columns: bound c1 ... cD   (meaning c . p <= bound)
    1 0 0 0 0 0 -1 0 0
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, FormatError, ZeroInequality
from .scenario import Scenario


@dataclass(frozen=True)
class Inequality:
    coeffs: tuple[int, ...]
    bound: int

    def __post_init__(self):
        if not any(self.coeffs):
            raise ZeroInequality("all coefficients are zero")

    @property
    def dimension(self) -> int:
        return len(self.coeffs)

    def sort_key(self):
        return (self.bound, self.coeffs)

    def evaluate(self, point) -> Fraction | int | float:
        coords = getattr(point, "coords", point)
        if len(coords) != len(self.coeffs):
            raise DimensionMismatch(f"point has {len(coords)} coords, inequality {len(self.coeffs)}")
        return sum(c * x for c, x in zip(self.coeffs, coords) if c)

    def satisfied_by(self, point) -> bool:
        return self.evaluate(point) <= self.bound

    def negated(self) -> "Inequality":
        """The reversed half-space -c . p <= -bound (not the complement facet)."""
        return Inequality(tuple(-c for c in self.coeffs), -self.bound)

    def to_line(self) -> str:
        return " ".join(str(v) for v in (self.bound, *self.coeffs))

    def pretty(self, scenario: Scenario) -> str:
        names = scenario.basis_names()
        parts = []
        for c, name in zip(self.coeffs, names):
            if c == 0:
                continue
            sign = "+" if c > 0 else "-"
            mag = abs(c)
            term = f"P({name})" if mag == 1 else f"{mag}P({name})"
            parts.append(f"{sign} {term}")
        body = " ".join(parts).lstrip("+ ")
        return f"{body} <= {self.bound}"


def canonicalize(ineq: Inequality) -> Inequality:
    """gcd-reduce; idempotent, orientation preserving."""
    g = math.gcd(abs(ineq.bound), *(abs(c) for c in ineq.coeffs))
    if g <= 1:
        return ineq
    return Inequality(tuple(c // g for c in ineq.coeffs), ineq.bound // g)


def from_rationals(coeffs: Sequence[Fraction | int], bound: Fraction | int) -> Inequality:
    """Clear denominators (positive multiplier only) and gcd-reduce."""
    fracs = [Fraction(c) for c in coeffs]
    fb = Fraction(bound)
    denom = math.lcm(fb.denominator, *(f.denominator for f in fracs))
    return canonicalize(Inequality(
        tuple(int(f * denom) for f in fracs),
        int(fb * denom),
    ))


def sort_canonical(ineqs: Iterable[Inequality]) -> list[Inequality]:
    return sorted(ineqs, key=Inequality.sort_key)


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

def format_inequalities(
    ineqs: Sequence[Inequality],
    scenario: Scenario | None = None,
    extra_header: Sequence[str] = (),
) -> str:
    lines = []
    if scenario is not None:
        lines.append(f"# scenario: {scenario.name}")
        lines.append("# basis: " + " ".join(scenario.basis_names()))
    lines.append("# columns: bound c1 ... cD   (meaning c . p <= bound)")
    for extra in extra_header:
        lines.append(f"# {extra}")
    lines.extend(iq.to_line() for iq in ineqs)
    return "\n".join(lines) + "\n"


def write_inequalities(path, ineqs, scenario=None, extra_header=()):
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(format_inequalities(ineqs, scenario, extra_header))


def parse_inequalities(text: str) -> tuple[list[Inequality], dict]:
    """Returns (inequalities, header) where header carries scenario/basis names."""
    header: dict[str, str] = {}
    ineqs: list[Inequality] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, _, value = body.partition(":")
                header.setdefault(key.strip(), value.strip())
            continue
        toks = line.split()
        try:
            values = [int(t) for t in toks]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: non-integer entry in {raw!r}") from exc
        if len(values) < 2:
            raise FormatError(f"line {lineno}: need a bound and at least one coefficient")
        ineqs.append(Inequality(tuple(values[1:]), values[0]))
    if ineqs:
        dims = {iq.dimension for iq in ineqs}
        if len(dims) != 1:
            raise FormatError(f"mixed dimensions in inequality file: {sorted(dims)}")
    return ineqs, header


def read_inequalities(path) -> tuple[list[Inequality], dict]:
    with open(path, "r", encoding="utf-8") as fp:
        return parse_inequalities(fp.read())
