"""Exact membership decision for conv(V) with verifiable certificates.

Feasibility of  sum_i w_i v_i = p,  sum_i w_i = 1,  w >= 0  is decided by a
phase-1 simplex over Fractions with Bland's rule (smallest-index entering
column, smallest basis variable on ratio ties), which cannot cycle.  A
feasible basis yields the convex weights; an infeasible one yields a Farkas
dual vector, normalized into an integer separating inequality that every
vertex satisfies and the query point strictly violates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, EmptyInput
from .inequality import Inequality, from_rationals


@dataclass(frozen=True)
class MembershipCertificate:
    inside: bool
    # (vertex index, weight) pairs with nonzero weight, inside case only
    weights: tuple[tuple[int, Fraction], ...] | None = None
    # a valid inequality strictly violated by the point, outside case only
    separator: Inequality | None = None

    def verify(self, point, vertices) -> bool:
        """Re-check the certificate from scratch, exactly."""
        coords = tuple(Fraction(x) for x in getattr(point, "coords", point))
        vlist = [tuple(Fraction(x) for x in getattr(v, "coords", v)) for v in vertices]
        if self.inside:
            if self.weights is None:
                return False
            if any(w < 0 for _, w in self.weights):
                return False
            if sum(w for _, w in self.weights) != 1:
                return False
            mix = [Fraction(0)] * len(coords)
            for idx, w in self.weights:
                for j, x in enumerate(vlist[idx]):
                    mix[j] += w * x
            return tuple(mix) == coords
        if self.separator is None:
            return False
        if any(self.separator.evaluate(v) > self.separator.bound for v in vlist):
            return False
        return self.separator.evaluate(coords) > self.separator.bound


def membership(point, vertices) -> MembershipCertificate:
    """Decide p in conv(V) with an inside/outside certificate."""
    vertices = list(vertices)
    if not vertices:
        raise EmptyInput("no vertices")
    coords = tuple(Fraction(x) for x in getattr(point, "coords", point))
    d = len(coords)
    cols = []
    for v in vertices:
        vc = tuple(Fraction(x) for x in getattr(v, "coords", v))
        if len(vc) != d:
            raise DimensionMismatch(f"vertex has dimension {len(vc)}, point {d}")
        cols.append((Fraction(1), *vc))
    rhs = [Fraction(1), *coords]

    feasible, weights, dual = _phase1_simplex(cols, rhs)
    if feasible:
        cert = MembershipCertificate(
            inside=True,
            weights=tuple((i, w) for i, w in enumerate(weights) if w),
        )
    else:
        # dual y: y . (1, v) <= 0 for every vertex, y . (1, p) > 0
        separator = from_rationals(dual[1:], -dual[0])
        cert = MembershipCertificate(inside=False, separator=separator)
    if not cert.verify(coords, vertices):
        raise AssertionError("internal error: simplex produced an invalid certificate")
    return cert


def _phase1_simplex(cols, rhs):
    """Phase-1 tableau simplex; returns (feasible, weights, farkas_dual).

    cols are the m constraint columns, rhs the right-hand side (length n_rows).
    """
    n_rows = len(rhs)
    n_real = len(cols)
    # rows as lists: real columns, then artificial identity, then rhs
    sign = [1] * n_rows
    T = []
    for i in range(n_rows):
        row = [cols[j][i] for j in range(n_real)] + [rhs[i]]
        if row[-1] < 0:
            row = [-x for x in row]
            sign[i] = -1
        art = [Fraction(1) if k == i else Fraction(0) for k in range(n_rows)]
        T.append(row[:-1] + art + [row[-1]])
    basis = [n_real + i for i in range(n_rows)]

    # phase-1 reduced costs: c_j - sum of rows (artificial costs are 1)
    red = []
    for j in range(n_real + n_rows):
        s = sum(T[i][j] for i in range(n_rows))
        c = Fraction(0) if j < n_real else Fraction(1)
        red.append(c - s)

    while True:
        enter = next((j for j in range(n_real + n_rows) if red[j] < 0), None)
        if enter is None:
            break
        ratio = None
        leave = None
        for i in range(n_rows):
            if T[i][enter] > 0:
                r = T[i][-1] / T[i][enter]
                if ratio is None or r < ratio or (r == ratio and basis[i] < basis[leave]):
                    ratio, leave = r, i
        if leave is None:
            # phase-1 objective is bounded below by 0; cannot happen
            raise AssertionError("unbounded phase-1 LP")
        _pivot(T, red, leave, enter)
        basis[leave] = enter

    objective = sum(T[i][-1] for i in range(n_rows) if basis[i] >= n_real)
    if objective == 0:
        weights = [Fraction(0)] * n_real
        for i, b in enumerate(basis):
            if b < n_real:
                weights[b] = T[i][-1]
        return True, weights, None
    # y_i = 1 - reduced_cost(artificial_i); undo the row sign flips
    dual = [(Fraction(1) - red[n_real + i]) * sign[i] for i in range(n_rows)]
    return False, None, dual


def _pivot(T, red, leave, enter):
    piv = T[leave][enter]
    T[leave] = [x / piv for x in T[leave]]
    prow = T[leave]
    for i in range(len(T)):
        if i != leave and T[i][enter]:
            f = T[i][enter]
            T[i] = [x - f * y for x, y in zip(T[i], prow)]
    f = red[enter]
    if f:
        for j in range(len(red)):
            red[j] -= f * prow[j]
