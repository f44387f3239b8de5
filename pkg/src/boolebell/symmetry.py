"""Event permutations and complementations acting on inequalities.

A symmetry op is a pair (permutation, complement mask) understood as "permute
the events, then complement the masked events".  On truth assignments the
action is (g.t)(e) = t(perm^-1(e)) xor [e in mask]; on inequalities it is the
affine substitution that replaces P(M) by P(M \\ {e}) - P(M) for each
complemented event e, which satisfies (g.I)(v) = I(g^-1.v) on every vertex v.

Each op carries an integer matrix acting on the (coeffs, bound) vector, so
whole inequality systems can be transformed with one matmul.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BasisNotClosed, MissingCompanionMonomial
from .inequality import Inequality, canonicalize
from .scenario import EventId, Monomial, Scenario, TruthAssignment

_INT64_SAFE = 2 ** 62


@dataclass(frozen=True)
class SymmetryOp:
    """perm maps event index -> image event index; mask bits are complemented."""

    perm: tuple[int, ...]
    mask: int

    @classmethod
    def identity(cls, n_events: int) -> "SymmetryOp":
        return cls(tuple(range(n_events)), 0)

    def is_identity(self) -> bool:
        return self.mask == 0 and all(p == i for i, p in enumerate(self.perm))

    def compose(self, other: "SymmetryOp") -> "SymmetryOp":
        """self after other."""
        perm = tuple(self.perm[p] for p in other.perm)
        mask = self.mask
        m = other.mask
        while m:
            e = (m & -m).bit_length() - 1
            m &= m - 1
            mask ^= 1 << self.perm[e]
        return SymmetryOp(perm, mask)

    def inverse(self) -> "SymmetryOp":
        inv = [0] * len(self.perm)
        for i, p in enumerate(self.perm):
            inv[p] = i
        mask = 0
        m = self.mask
        while m:
            e = (m & -m).bit_length() - 1
            m &= m - 1
            mask ^= 1 << inv[e]
        return SymmetryOp(tuple(inv), mask)

    def complemented_events(self, scenario: Scenario) -> tuple[EventId, ...]:
        return tuple(e for i, e in enumerate(scenario.events) if self.mask >> i & 1)


# ---------------------------------------------------------------------------
# closure checks
# ---------------------------------------------------------------------------

def _check_permutation_closed(scenario: Scenario, mapping: dict[EventId, EventId]):
    if sorted(mapping) != sorted(scenario.events) or sorted(mapping.values()) != sorted(scenario.events):
        raise BasisNotClosed(f"permutation is not a bijection on the events of {scenario.name}")
    for m in scenario.monomials:
        image = Monomial.of(*(mapping[e] for e in m.events))
        if image not in scenario.monomial_index:
            raise BasisNotClosed(f"permutation maps {m} to {image}, which is not in the basis")


def check_complementation_closed(scenario: Scenario, event: EventId):
    if event not in scenario.event_index:
        raise MissingCompanionMonomial(f"{event} is not an event of {scenario.name}")
    for m in scenario.monomials:
        if m.size > 1 and m.contains(event):
            companion = m.without(event)
            if companion not in scenario.monomial_index:
                raise MissingCompanionMonomial(
                    f"complementing {event} needs P({companion}) for P({m}), "
                    f"but it is not in the basis"
                )


# ---------------------------------------------------------------------------
# matrices on the (coeffs, bound) vector
# ---------------------------------------------------------------------------

def _perm_matrix(scenario: Scenario, perm: tuple[int, ...]) -> np.ndarray:
    d = scenario.dimension
    mat = np.zeros((d + 1, d + 1), dtype=np.int64)
    for m, idx in scenario.monomial_index.items():
        image = Monomial.of(*(scenario.events[perm[scenario.event_index[e]]] for e in m.events))
        mat[scenario.monomial_index[image], idx] = 1
    mat[d, d] = 1
    return mat


def _complement_matrix(scenario: Scenario, event: EventId) -> np.ndarray:
    d = scenario.dimension
    mat = np.zeros((d + 1, d + 1), dtype=np.int64)
    single = scenario.monomial_index[Monomial.of(event)]
    for m, idx in scenario.monomial_index.items():
        if m.contains(event):
            mat[idx, idx] = -1
        else:
            mat[idx, idx] = 1
            partner = m.union(event)
            j = scenario.monomial_index.get(partner)
            if j is not None:
                mat[idx, j] = 1
    mat[d, d] = 1
    mat[d, single] = -1
    return mat


def op_matrix(scenario: Scenario, op: SymmetryOp) -> np.ndarray:
    """Integer matrix M with (coeffs', bound') = M @ (coeffs, bound)."""
    mat = _perm_matrix(scenario, op.perm)
    m = op.mask
    while m:
        e = (m & -m).bit_length() - 1
        m &= m - 1
        check_complementation_closed(scenario, scenario.events[e])
        mat = _complement_matrix(scenario, scenario.events[e]) @ mat
    return mat


def apply_op(scenario: Scenario, op: SymmetryOp, ineq: Inequality) -> Inequality:
    mat = op_matrix(scenario, op)
    vec = np.array([*ineq.coeffs, ineq.bound], dtype=np.int64)
    out = mat @ vec
    return canonicalize(Inequality(tuple(int(x) for x in out[:-1]), int(out[-1])))


def apply_op_batch(scenario: Scenario, op_or_matrix, ineqs) -> list[Inequality]:
    mat = op_or_matrix if isinstance(op_or_matrix, np.ndarray) else op_matrix(scenario, op_or_matrix)
    if not ineqs:
        return []
    vecs = np.array([[*iq.coeffs, iq.bound] for iq in ineqs], dtype=np.int64)
    if abs(vecs).max(initial=0) * abs(mat).max() * mat.shape[0] >= _INT64_SAFE:
        return [apply_op_exact(scenario, mat, iq) for iq in ineqs]
    out = vecs @ mat.T
    return [
        canonicalize(Inequality(tuple(int(x) for x in row[:-1]), int(row[-1])))
        for row in out
    ]


def apply_op_exact(scenario: Scenario, mat: np.ndarray, ineq: Inequality) -> Inequality:
    vec = [*ineq.coeffs, ineq.bound]
    out = [sum(int(mat[i, j]) * vec[j] for j in range(len(vec))) for i in range(len(vec))]
    return canonicalize(Inequality(tuple(out[:-1]), out[-1]))


def apply_to_assignment(scenario: Scenario, op: SymmetryOp, assignment) -> TruthAssignment:
    values = assignment.values if isinstance(assignment, TruthAssignment) else assignment
    inv = op.inverse()
    out = {}
    for i, e in enumerate(scenario.events):
        src = scenario.events[inv.perm[i]]
        out[e] = values[src] ^ (op.mask >> i & 1)
    return TruthAssignment(out)


# ---------------------------------------------------------------------------
# the two public elementary operations
# ---------------------------------------------------------------------------

def complement_event(scenario: Scenario, ineq: Inequality, event: EventId) -> Inequality:
    """Substitute the complemented event; an involution on inequalities."""
    check_complementation_closed(scenario, event)
    op = SymmetryOp(tuple(range(scenario.n_events)), 1 << scenario.event_index[event])
    return apply_op(scenario, op, ineq)


def permute_events(scenario: Scenario, ineq: Inequality, mapping: dict[EventId, EventId]) -> Inequality:
    """Reindex coefficients along a basis-preserving event permutation."""
    _check_permutation_closed(scenario, mapping)
    perm = tuple(
        scenario.event_index[mapping[e]] for e in scenario.events
    )
    return apply_op(scenario, SymmetryOp(perm, 0), ineq)


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryGroup:
    scenario: Scenario
    ops: tuple[SymmetryOp, ...]
    generators: tuple[tuple[str, SymmetryOp], ...]

    @property
    def order(self) -> int:
        return len(self.ops)


def default_permutations(scenario: Scenario) -> list[tuple[str, dict[EventId, EventId]]]:
    """Within-party setting transpositions, plus party swaps where the basis
    stays closed.  Candidates failing the closure check are dropped."""
    by_party: dict[str, list[EventId]] = {}
    for e in scenario.events:
        by_party.setdefault(e.party, []).append(e)
    out = []
    for party, events in sorted(by_party.items()):
        settings = sorted(e.setting for e in events)
        for a, b in itertools.combinations(settings, 2):
            mapping = {e: e for e in scenario.events}
            mapping[EventId(party, a)] = EventId(party, b)
            mapping[EventId(party, b)] = EventId(party, a)
            try:
                _check_permutation_closed(scenario, mapping)
            except BasisNotClosed:
                continue
            out.append((f"swap[{party}{a}<->{party}{b}]", mapping))
    parties = sorted(by_party)
    for pa, pb in itertools.combinations(parties, 2):
        sa = sorted(e.setting for e in by_party[pa])
        sb = sorted(e.setting for e in by_party[pb])
        if sa != sb:
            continue
        mapping = {e: e for e in scenario.events}
        for s in sa:
            mapping[EventId(pa, s)] = EventId(pb, s)
            mapping[EventId(pb, s)] = EventId(pa, s)
        try:
            _check_permutation_closed(scenario, mapping)
        except BasisNotClosed:
            continue
        out.append((f"swap[{pa}<->{pb}]", mapping))
    return out


def generate_group(
    scenario: Scenario,
    permutations=(),
    complementations: bool = True,
) -> SymmetryGroup:
    """Closure under composition of the given permutations and, optionally,
    all single-event complementations."""
    generators: list[tuple[str, SymmetryOp]] = []
    for item in permutations:
        name, mapping = item if isinstance(item, tuple) else (f"perm{len(generators)}", item)
        _check_permutation_closed(scenario, mapping)
        perm = tuple(scenario.event_index[mapping[e]] for e in scenario.events)
        generators.append((name, SymmetryOp(perm, 0)))
    if complementations:
        for i, e in enumerate(scenario.events):
            check_complementation_closed(scenario, e)
            generators.append((f"c[{e}]", SymmetryOp(tuple(range(scenario.n_events)), 1 << i)))

    identity = SymmetryOp.identity(scenario.n_events)
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for _, gen in generators:
                h = gen.compose(g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    ops = tuple(sorted(seen, key=lambda o: (o.perm, o.mask)))
    return SymmetryGroup(scenario=scenario, ops=ops, generators=tuple(generators))


def full_group(scenario: Scenario, complementations: bool = True) -> SymmetryGroup:
    return generate_group(scenario, default_permutations(scenario), complementations)


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Orbit:
    representative: Inequality
    members: tuple[Inequality, ...]
    stabilizer_size: int
    # parallel to members: generator word mapping the representative to it
    words: tuple[str, ...] | None = None


def closure_failures(scenario: Scenario, ineqs, group: SymmetryGroup, limit: int = 5):
    """Generator images that leave the inequality set (empty when closed)."""
    target = set(canonicalize(iq) for iq in ineqs)
    source = list(target)
    failures = []
    for name, gen in group.generators:
        mat = op_matrix(scenario, gen)
        for src, img in zip(source, apply_op_batch(scenario, mat, source)):
            if img not in target:
                failures.append((name, src, img))
                if len(failures) >= limit:
                    return failures
    return failures


def orbit_reduce(inequalities, group: SymmetryGroup, keep_words: bool = False) -> list[Orbit]:
    """Partition a canonicalized, symmetry-closed inequality set into orbits.

    Orbit members are discovered by BFS over the group generators, so the
    input must be closed under the group (checked; images escaping the input
    set raise ValueError).  Representatives are the lexicographic minima of
    the member (coeffs, bound) vectors.
    """
    scenario = group.scenario
    pending = {}
    for iq in inequalities:
        can = canonicalize(iq)
        pending[can] = None
    input_set = set(pending)
    gen_mats = [(name, op_matrix(scenario, gen)) for name, gen in group.generators]

    orbits = []
    assigned = set()
    for iq in pending:
        if iq in assigned:
            continue
        words = {iq: ""}
        frontier = [iq]
        while frontier:
            nxt = []
            for name, mat in gen_mats:
                for src, img in zip(frontier, apply_op_batch(scenario, mat, frontier)):
                    if img not in words:
                        if img not in input_set:
                            raise ValueError(
                                f"input is not closed under the group: {name} maps "
                                f"{src.to_line()!r} to {img.to_line()!r}"
                            )
                        words[img] = (words[src] + " " + name).strip()
                        nxt.append(img)
            frontier = nxt
        members = sorted(words, key=Inequality.sort_key)
        rep = members[0]
        if group.order % len(members):
            raise AssertionError("orbit size does not divide the group order")
        orbits.append(Orbit(
            representative=rep,
            members=tuple(members),
            stabilizer_size=group.order // len(members),
            words=tuple(words[m] for m in members) if keep_words else None,
        ))
        assigned.update(members)
    orbits.sort(key=lambda o: o.representative.sort_key())
    return orbits


def format_orbit_report(orbits, scenario: Scenario, group: SymmetryGroup, verbose: bool = False) -> str:
    lines = [
        f"# scenario: {scenario.name}",
        f"# group order: {group.order}",
        f"# generators: {' '.join(name for name, _ in group.generators) or '(none)'}",
        f"# orbits: {len(orbits)}",
    ]
    for i, orbit in enumerate(orbits, start=1):
        lines.append(f"orbit {i}: size {len(orbit.members)} stabilizer {orbit.stabilizer_size}")
        lines.append(f"  representative: {orbit.representative.to_line()}")
        if verbose:
            for j, member in enumerate(orbit.members):
                word = orbit.words[j] if orbit.words else ""
                lines.append(f"  member: {member.to_line()}   [{word or 'identity'}]")
    return "\n".join(lines) + "\n"
