"""Facet enumeration for conv(V) via the double description method, exactly.

Each vertex v is homogenized to the constraint row (1, v); the facets of the
polytope are the extreme rays of the dual cone D = {y : (1, v) . y >= 0 for
all v}.  A ray y = (y0, yr) of D is the valid inequality (-yr) . x <= y0.
Constraints are inserted one at a time.  While the current cone still has
lineality, a constraint hitting a line consumes it; otherwise the rays are
split into +/0/- against the constraint, + and 0 survive, and each *adjacent*
(+,-) pair contributes the combined ray on the constraint hyperplane.

Adjacency is decided combinatorially: two rays are adjacent iff no third ray's
zero set contains the intersection of their zero sets.  An algebraic rank test
is available as a cross-check (verify_adjacency=True).

All ray arithmetic is integer (gcd-reduced vectors); numpy is used only for
sign partitioning and for a popcount prefilter that narrows the candidate
pairs, never for anything that decides equality.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyInput, ResourceExhausted
from .inequality import Inequality, canonicalize, sort_canonical
from .scenario import Scenario

DEFAULT_RAY_CAP = 1_000_000

# int64 dot products are guarded: |ray| * |constraint| * dim must stay below this
_INT64_SAFE = 2 ** 62
_RANK_PRIME = 2_147_483_629


@dataclass(frozen=True)
class Equality:
    """An implicit equality coeffs . x = rhs satisfied by every vertex."""

    coeffs: tuple[int, ...]
    rhs: int

    def to_line(self) -> str:
        return " ".join(str(v) for v in (self.rhs, *self.coeffs))


@dataclass(frozen=True)
class HRepresentation:
    facets: tuple[Inequality, ...]
    equalities: tuple[Equality, ...] = ()
    dim: int = 0
    scenario: Scenario | None = None

    def __len__(self):
        return len(self.facets)


# ---------------------------------------------------------------------------
# integer vector helpers
# ---------------------------------------------------------------------------

def _reduce_ray(vec) -> tuple[int, ...]:
    g = math.gcd(*(abs(v) for v in vec))
    if g > 1:
        return tuple(v // g for v in vec)
    return tuple(vec)


def _reduce_line(vec) -> tuple[int, ...]:
    out = _reduce_ray(vec)
    for v in out:
        if v:
            return out if v > 0 else tuple(-x for x in out)
    return out


def _homogenize(vertices) -> list[tuple[int, ...]]:
    """(1, v) rows, scaled to coprime integers."""
    rows = []
    for v in vertices:
        coords = getattr(v, "coords", v)
        fracs = [Fraction(x) for x in coords]
        denom = math.lcm(1, *(f.denominator for f in fracs))
        rows.append(_reduce_ray((denom, *(int(f * denom) for f in fracs))))
    return rows


# ---------------------------------------------------------------------------
# exact / modular rank (for verification and the algebraic adjacency check)
# ---------------------------------------------------------------------------

def rank_mod_p(mat, p: int = _RANK_PRIME) -> int:
    """Rank over GF(p); never exceeds the rational rank."""
    a = np.array(mat, dtype=np.int64) % p
    if a.size == 0:
        return 0
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        piv = None
        for r in range(rank, rows):
            if a[r, c]:
                piv = r
                break
        if piv is None:
            continue
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, c]), p - 2, p)
        a[rank] = (a[rank] * inv) % p
        below = a[rank + 1:, c] != 0
        if below.any():
            factors = a[rank + 1:, c][below]
            a[rank + 1:][below] = (a[rank + 1:][below] - factors[:, None] * a[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank


def rank_exact(mat) -> int:
    rows = [[Fraction(x) for x in row] for row in mat]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pv = rows[rank][c]
        rows[rank] = [x / pv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def _rank_at_least(mat, needed: int) -> bool:
    """Sound fast path: GF(p) rank == needed proves rational rank >= needed."""
    if rank_mod_p(mat) >= needed:
        return True
    return rank_exact(mat) >= needed


# ---------------------------------------------------------------------------
# the incremental cone
# ---------------------------------------------------------------------------

class _Cone:
    def __init__(self, dim: int, ray_cap: int, threads: int):
        self.dim = dim
        self.ray_cap = ray_cap
        self.threads = max(1, threads)
        self.lines: list[tuple[int, ...]] = [
            tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim)
        ]
        self.rays: list[tuple[int, ...]] = []
        # zero sets of the rays against the processed constraints
        self.zs = np.zeros((0, 0), dtype=bool)
        self.processed: list[tuple[int, ...]] = []
        self.max_ray_abs = 1

    # -- dot products -------------------------------------------------------

    def _dots(self, a: tuple[int, ...]) -> np.ndarray | list[int]:
        if not self.rays:
            return np.zeros(0, dtype=np.int64)
        max_a = max(abs(x) for x in a) or 1
        if self.max_ray_abs * max_a * self.dim < _INT64_SAFE:
            rays_np = np.array(self.rays, dtype=np.int64)
            return rays_np @ np.array(a, dtype=np.int64)
        return [sum(c * r for c, r in zip(a, ray)) for ray in self.rays]

    def negative_count(self, a: tuple[int, ...]) -> int:
        d = self._dots(a)
        if isinstance(d, list):
            return sum(1 for x in d if x < 0)
        return int((d < 0).sum())

    def hits_line(self, a: tuple[int, ...]) -> bool:
        return any(sum(c * l for c, l in zip(a, line)) for line in self.lines)

    # -- insertion ----------------------------------------------------------

    def insert(self, a: tuple[int, ...], verify_adjacency: bool = False):
        for idx, line in enumerate(self.lines):
            dl = sum(c * l for c, l in zip(a, line))
            if dl:
                self._consume_line(a, idx, dl)
                break
        else:
            self._ray_step(a, verify_adjacency)
        self.processed.append(a)
        if len(self.rays) > self.ray_cap:
            raise ResourceExhausted(
                f"{len(self.rays)} intermediate rays exceed the cap {self.ray_cap}"
            )
        if self.rays:
            self.max_ray_abs = max(max(abs(x) for x in ray) for ray in self.rays)

    def _consume_line(self, a, idx, dl):
        line = self.lines.pop(idx)
        if dl < 0:
            line = tuple(-x for x in line)
            dl = -dl
        new_lines = []
        for other in self.lines:
            do = sum(c * l for c, l in zip(a, other))
            if do:
                other = _reduce_line(tuple(dl * o - do * l for o, l in zip(other, line)))
            new_lines.append(other)
        self.lines = new_lines
        new_rays = []
        for ray in self.rays:
            dr = sum(c * r for c, r in zip(a, ray))
            if dr:
                ray = _reduce_ray(tuple(dl * r - dr * l for r, l in zip(ray, line)))
            new_rays.append(ray)
        # the consumed line survives as the single ray on the strict side
        new_rays.append(line)
        self.rays = new_rays
        k = len(self.processed)
        zs = np.zeros((len(self.rays), k + 1), dtype=bool)
        if k:
            zs[:-1, :k] = self.zs
        zs[:-1, k] = True      # projected rays sit on the new hyperplane
        zs[-1, :k] = True      # the old line was orthogonal to everything processed
        zs[-1, k] = False
        self.zs = zs

    def _ray_step(self, a, verify_adjacency):
        d = self._dots(a)
        d = np.asarray(d, dtype=object) if isinstance(d, list) else d
        n = len(self.rays)
        k = len(self.processed)
        if n == 0:
            self.zs = np.zeros((0, k + 1), dtype=bool)
            return
        if isinstance(d, np.ndarray) and d.dtype == object:
            signs = np.array([(x > 0) - (x < 0) for x in d], dtype=np.int64)
        else:
            signs = np.sign(d)
        plus = np.where(signs > 0)[0]
        zero = np.where(signs == 0)[0]
        minus = np.where(signs < 0)[0]

        if minus.size == 0:
            zs = np.zeros((n, k + 1), dtype=bool)
            zs[:, :k] = self.zs
            zs[:, k] = signs == 0
            self.zs = zs
            return
        if plus.size == 0 and zero.size == 0:
            # the cone collapses to the origin
            self.rays = []
            self.zs = np.zeros((0, k + 1), dtype=bool)
            return

        adjacent = self._adjacent_pairs(plus, minus, verify_adjacency)

        keep = np.sort(np.concatenate([plus, zero]))
        new_rays = [self.rays[i] for i in keep]
        zs_new_rows = []
        for p, m in adjacent:
            dp, dm = int(d[p]), int(d[m])
            combo = tuple(dp * rm - dm * rp for rp, rm in zip(self.rays[p], self.rays[m]))
            new_rays.append(_reduce_ray(combo))
            zs_new_rows.append(self.zs[p] & self.zs[m])

        zs = np.zeros((len(new_rays), k + 1), dtype=bool)
        zs[: keep.size, :k] = self.zs[keep]
        zs[: keep.size, k] = signs[keep] == 0
        if zs_new_rows:
            zs[keep.size:, :k] = np.array(zs_new_rows, dtype=bool)
            zs[keep.size:, k] = True
        self.rays = new_rays
        self.zs = zs

    # -- adjacency ----------------------------------------------------------

    def _adjacent_pairs(self, plus, minus, verify_adjacency):
        k = len(self.processed)
        rank = self.dim - len(self.lines)
        need = max(rank - 2, 0)

        if k == 0 or need == 0:
            cand = [(int(p), int(m)) for p in plus for m in minus]
        else:
            cand = self._prefilter_pairs(plus, minus, need)
        if not cand:
            return []

        col_masks = self._column_masks()
        row_bits = self._row_bits(set(p for p, _ in cand) | set(m for _, m in cand))
        total = len(self.rays)

        def check(chunk):
            out = []
            for p, m in chunk:
                if self._combinatorially_adjacent(p, m, row_bits, col_masks, total):
                    out.append((p, m))
            return out

        if self.threads == 1 or len(cand) < 4096:
            adjacent = check(cand)
        else:
            size = (len(cand) + self.threads - 1) // self.threads
            chunks = [cand[i : i + size] for i in range(0, len(cand), size)]
            with ThreadPoolExecutor(max_workers=self.threads) as ex:
                adjacent = [pair for part in ex.map(check, chunks) for pair in part]

        if verify_adjacency:
            for p, m in cand:
                comb = (p, m) in set(adjacent)
                alg = self._algebraically_adjacent(p, m, rank)
                if comb != alg:
                    raise AssertionError(
                        f"adjacency tests disagree on rays {p},{m}: "
                        f"combinatorial={comb} algebraic={alg}"
                    )
        return adjacent

    def _prefilter_pairs(self, plus, minus, need) -> list[tuple[int, int]]:
        """Pairs whose zero sets share >= rank-2 constraints (necessary condition)."""
        zsf_p = self.zs[plus].astype(np.float32)
        zsf_m = self.zs[minus].astype(np.float32)
        out = []
        chunk = max(1, (1 << 24) // max(1, len(minus)))
        for start in range(0, len(plus), chunk):
            counts = zsf_p[start : start + chunk] @ zsf_m.T
            for ip, im in np.argwhere(counts >= need - 0.5):
                out.append((int(plus[start + ip]), int(minus[im])))
        return out

    def _column_masks(self) -> list[int]:
        masks = []
        for j in range(self.zs.shape[1]):
            packed = np.packbits(self.zs[:, j], bitorder="little").tobytes()
            masks.append(int.from_bytes(packed, "little"))
        return masks

    def _row_bits(self, rows) -> dict[int, int]:
        out = {}
        for i in rows:
            packed = np.packbits(self.zs[i], bitorder="little").tobytes()
            out[i] = int.from_bytes(packed, "little")
        return out

    @staticmethod
    def _combinatorially_adjacent(p, m, row_bits, col_masks, total) -> bool:
        shared = row_bits[p] & row_bits[m]
        pm = (1 << p) | (1 << m)
        acc = (1 << total) - 1
        s = shared
        while s:
            j = (s & -s).bit_length() - 1
            s &= s - 1
            acc &= col_masks[j]
            if acc == pm:
                return True
        return acc == pm

    def _algebraically_adjacent(self, p, m, rank) -> bool:
        """Rank of the constraints tight on both rays (mod lineality) must be rank-2."""
        shared = [list(c) for j, c in enumerate(self.processed) if self.zs[p, j] and self.zs[m, j]]
        lin = [list(l) for l in self.lines]
        base = rank_exact(lin) if lin else 0
        shared_rank = (rank_exact(lin + shared) - base) if shared else 0
        return shared_rank == rank - 2


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def facet_enumeration(
    vertices: Sequence,
    *,
    scenario: Scenario | None = None,
    ray_cap: int = DEFAULT_RAY_CAP,
    threads: int = 1,
    insertion: str = "lex",
    verify_adjacency: bool = False,
    progress: Callable[[int, int, int, int], None] | None = None,
) -> HRepresentation:
    """Complete irredundant facet system of conv(vertices).

    The output facet set is deterministic and independent of the insertion
    heuristic; facets are sorted by (bound, coefficient vector).  Implicit
    equalities of lower-dimensional hulls are reported separately, and the
    facets are then reduced modulo the equality space so they stay canonical.
    """
    vertices = list(vertices)
    if not vertices:
        raise EmptyInput("no vertices")
    dims = {len(getattr(v, "coords", v)) for v in vertices}
    if len(dims) != 1:
        raise DimensionMismatch(f"mixed vertex dimensions: {sorted(dims)}")
    d = dims.pop()
    if insertion not in ("lex", "maxcutoff"):
        raise ValueError(f"unknown insertion heuristic {insertion!r}")

    constraints = sorted(set(_homogenize(vertices)))
    cone = _Cone(d + 1, ray_cap, threads)

    if insertion == "lex":
        for step, a in enumerate(constraints):
            cone.insert(a, verify_adjacency)
            if progress:
                progress(step + 1, len(constraints), len(cone.rays), len(cone.lines))
    else:
        remaining = list(constraints)
        step = 0
        while remaining:
            hitting = [a for a in remaining if cone.hits_line(a)]
            if hitting:
                a = min(hitting)
            else:
                a = max(remaining, key=lambda c: (cone.negative_count(c), [-x for x in c]))
            remaining.remove(a)
            cone.insert(a, verify_adjacency)
            step += 1
            if progress:
                progress(step, len(constraints), len(cone.rays), len(cone.lines))

    equalities = []
    for line in cone.lines:
        # a lineality direction y = (y0, yr) means y0 + yr . x = 0 on the hull
        y = _reduce_ray(line)
        lead = next((v for v in y[1:] if v), None)
        if lead is None:
            continue  # impossible for a nonempty vertex set: would force y0 = 0
        if lead < 0:
            y = tuple(-x for x in y)
        equalities.append(Equality(coeffs=y[1:], rhs=-y[0]))

    echelon = _echelonize_lines(cone.lines)
    facets = []
    for ray in cone.rays:
        ray = _reduce_modulo_lines(ray, echelon)
        if not any(ray[1:]):
            continue  # the trivial 1 >= 0 ray of a lower-dimensional hull
        facets.append(canonicalize(Inequality(tuple(-c for c in ray[1:]), ray[0])))
    return HRepresentation(
        facets=tuple(sort_canonical(facets)),
        equalities=tuple(sorted(equalities, key=lambda e: (e.rhs, e.coeffs))),
        dim=d,
        scenario=scenario,
    )


def _echelonize_lines(lines) -> list[tuple[list[int], int]]:
    """Echelon form of the lineality basis with pivots in the x-columns.

    The x-parts of a lineality basis are linearly independent (a line with
    zero x-part would force its homogenizing coordinate to vanish on every
    vertex), so pivots in columns >= 1 always exist.
    """
    basis = [list(l) for l in lines]
    pivots: list[tuple[list[int], int]] = []
    remaining = list(range(len(basis)))
    for col in range(1, len(basis[0]) if basis else 1):
        row_idx = next((r for r in remaining if basis[r][col]), None)
        if row_idx is None:
            continue
        remaining.remove(row_idx)
        piv_row = basis[row_idx]
        for r in range(len(basis)):
            if r != row_idx and basis[r][col]:
                f, g = basis[r][col], piv_row[col]
                basis[r] = [x * g - y * f for x, y in zip(basis[r], piv_row)]
                basis[r] = list(_reduce_line(basis[r]))
        pivots.append((piv_row, col))
        if not remaining:
            break
    return pivots


def _reduce_modulo_lines(ray, echelon):
    """Canonical ray representative modulo the lineality space.

    Only positive multiples of the ray are taken, so the orientation (and the
    facet it denotes) is preserved.
    """
    if not echelon:
        return ray
    ray = list(ray)
    for row, col in echelon:
        if not ray[col]:
            continue
        p = row[col]
        if p < 0:
            row, p = [-x for x in row], -p
        f = ray[col]
        ray = [r * p - x * f for r, x in zip(ray, row)]
    return _reduce_ray(ray)


@dataclass
class VerificationReport:
    invalid: list = field(default_factory=list)        # (inequality, vertex index)
    not_tight: list = field(default_factory=list)      # (inequality, tight rank, needed)
    duplicates: list = field(default_factory=list)     # inequality
    broken_equalities: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.invalid or self.not_tight or self.duplicates or self.broken_equalities)

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return (
            f"invalid={len(self.invalid)} not_tight={len(self.not_tight)} "
            f"duplicates={len(self.duplicates)} broken_equalities={len(self.broken_equalities)}"
        )


def verify_h_representation(vertices, hrep: HRepresentation) -> VerificationReport:
    """Check validity, facet-defining tightness, and irredundancy, exactly."""
    report = VerificationReport()
    vertices = [tuple(getattr(v, "coords", v)) for v in vertices]
    if not vertices:
        raise EmptyInput("no vertices")
    hom = _homogenize(vertices)
    affine_rank = rank_exact([list(h) for h in hom])
    needed = affine_rank - 1

    seen = set()
    for ineq in hrep.facets:
        can = canonicalize(ineq)
        if can in seen:
            report.duplicates.append(ineq)
        seen.add(can)

    for eq in hrep.equalities:
        for i, v in enumerate(vertices):
            if sum(c * x for c, x in zip(eq.coeffs, v)) != eq.rhs:
                report.broken_equalities.append((eq, i))
                break

    for ineq in hrep.facets:
        tight_rows = []
        bad = None
        for i, v in enumerate(vertices):
            val = ineq.evaluate(v)
            if val > ineq.bound:
                bad = i
                break
            if val == ineq.bound:
                tight_rows.append(list(hom[i]))
        if bad is not None:
            report.invalid.append((ineq, bad))
            continue
        if len(tight_rows) < needed or not _rank_at_least(tight_rows, needed):
            have = rank_exact(tight_rows) if tight_rows else 0
            report.not_tight.append((ineq, have, needed))
    return report
