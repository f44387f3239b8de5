"""Experiment scenarios and the 0/1 vertices of their correlation polytopes.

A scenario fixes a list of elementary events (party label + setting index)
and a list of joint-event monomials.  Together they define the coordinate
basis: single-event monomials first, sorted by (party, setting), then the
joint monomials in declaration order.  Assigning each event a truth value
in {0, 1} and each joint the product of its members' values turns every one
of the 2**n assignments into a 0/1 point; the convex hull of those points
is the correlation polytope.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateEvent,
    DuplicateMonomial,
    FormatError,
    ScenarioTooLarge,
    UnknownEventInMonomial,
)

# 2**n assignments are materialized; past this the enumeration is refused.
MAX_ENUM_EVENTS = 20

_EVENT_RE = re.compile(r"^([A-Za-z]+)([0-9]+)$")


@dataclass(frozen=True, order=True)
class EventId:
    """An elementary event, e.g. A1 = party A, setting 1."""

    party: str
    setting: int

    def __post_init__(self):
        if not self.party or not self.party.isalpha():
            raise FormatError(f"bad party label {self.party!r}")
        if self.setting < 1:
            raise FormatError(f"setting index must be >= 1, got {self.setting}")

    def __str__(self):
        return f"{self.party}{self.setting}"

    @classmethod
    def parse(cls, text: str) -> "EventId":
        m = _EVENT_RE.match(text.strip())
        if not m:
            raise FormatError(f"cannot parse event id {text!r}")
        return cls(m.group(1), int(m.group(2)))


@dataclass(frozen=True)
class Monomial:
    """A nonempty set of events, kept in canonical (party, setting) order."""

    events: tuple[EventId, ...]

    def __post_init__(self):
        if not self.events:
            raise FormatError("empty monomial")
        if list(self.events) != sorted(set(self.events)):
            raise FormatError(f"monomial events not canonical: {self.events}")

    @classmethod
    def of(cls, *events: EventId) -> "Monomial":
        return cls(tuple(sorted(set(events))))

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        """Parse a concatenated name like 'A1B2C1' (or space separated)."""
        text = text.strip()
        if " " in text:
            parts = text.split()
        else:
            parts = re.findall(r"[A-Za-z]+[0-9]+", text)
            if "".join(parts) != text:
                raise FormatError(f"cannot parse monomial {text!r}")
        if not parts:
            raise FormatError(f"cannot parse monomial {text!r}")
        return cls.of(*(EventId.parse(p) for p in parts))

    @property
    def size(self) -> int:
        return len(self.events)

    def __str__(self):
        return "".join(str(e) for e in self.events)

    def contains(self, event: EventId) -> bool:
        return event in self.events

    def without(self, event: EventId) -> "Monomial | None":
        rest = tuple(e for e in self.events if e != event)
        return Monomial(rest) if rest else None

    def union(self, event: EventId) -> "Monomial":
        return Monomial.of(*self.events, event)


@dataclass(frozen=True)
class TruthAssignment:
    """Total map event -> {0, 1}."""

    values: Mapping[EventId, int]

    def __getitem__(self, event: EventId) -> int:
        return self.values[event]


@dataclass(frozen=True)
class Point:
    """Exact coordinate vector in a scenario's monomial basis.

    Coordinates are ints or Fractions; vertices are all 0/1.
    """

    coords: tuple

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class Scenario:
    """Events plus monomial basis; the coordinate order is part of the contract."""

    name: str
    events: tuple[EventId, ...]
    monomials: tuple[Monomial, ...]

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    @cached_property
    def monomial_index(self) -> dict[Monomial, int]:
        return {m: i for i, m in enumerate(self.monomials)}

    @cached_property
    def event_index(self) -> dict[EventId, int]:
        return {e: i for i, e in enumerate(self.events)}

    @cached_property
    def joints(self) -> tuple[Monomial, ...]:
        return tuple(m for m in self.monomials if m.size > 1)

    def basis_names(self) -> list[str]:
        return [str(m) for m in self.monomials]

    def monomial(self, name: str) -> Monomial:
        m = Monomial.parse(name)
        if m not in self.monomial_index:
            raise UnknownEventInMonomial(f"{name} is not in the basis of {self.name}")
        return m


def build_scenario(
    events: Iterable[EventId],
    joint_monomials: Iterable[Monomial] = (),
    name: str = "custom",
) -> Scenario:
    """Canonicalize a scenario description.

    Singles are sorted by (party, setting) and come first; joints keep their
    declaration order.  Duplicate events or monomials and joints referencing
    undeclared events are rejected.
    """
    events = list(events)
    if not events:
        raise FormatError("scenario needs at least one event")
    if len(set(events)) != len(events):
        dupe = next(e for e in events if events.count(e) > 1)
        raise DuplicateEvent(f"event {dupe} declared twice")
    ordered_events = tuple(sorted(events))
    event_set = set(ordered_events)

    monomials: list[Monomial] = [Monomial.of(e) for e in ordered_events]
    seen = set(monomials)
    for joint in joint_monomials:
        for e in joint.events:
            if e not in event_set:
                raise UnknownEventInMonomial(f"monomial {joint} uses undeclared event {e}")
        if joint in seen:
            raise DuplicateMonomial(f"monomial {joint} declared twice")
        if joint.size == 1:
            raise DuplicateMonomial(f"single {joint} is implicit and cannot be redeclared")
        seen.add(joint)
        monomials.append(joint)
    return Scenario(name=name, events=ordered_events, monomials=tuple(monomials))


def vertex_from_assignment(scenario: Scenario, assignment: TruthAssignment | Mapping) -> Point:
    """Coordinates: t-values for singles, products of t-values for joints."""
    values = assignment.values if isinstance(assignment, TruthAssignment) else assignment
    coords = []
    for m in scenario.monomials:
        v = 1
        for e in m.events:
            v *= values[e]
            if v == 0:
                break
        coords.append(v)
    return Point(tuple(coords))


def enumerate_vertices(scenario: Scenario, max_events: int = MAX_ENUM_EVENTS) -> list[Point]:
    """All 2**n vertices, in lexicographic order of the truth assignments.

    The single-event coordinates reproduce the assignment bits, so the
    vertices are pairwise distinct by construction.
    """
    n = scenario.n_events
    if n > max_events:
        raise ScenarioTooLarge(f"{n} events would give 2**{n} vertices (limit {max_events})")
    # index tuple per monomial avoids dict lookups in the hot loop
    masks = [tuple(scenario.event_index[e] for e in m.events) for m in scenario.monomials]
    vertices = []
    for bits in itertools.product((0, 1), repeat=n):
        coords = tuple(1 if all(bits[i] for i in mask) else 0 for mask in masks)
        vertices.append(Point(coords))
    return vertices


def convex_mixture(scenario: Scenario, weights: Sequence[Fraction]) -> Point:
    """Exact mixture of the enumerated vertices with the given weights."""
    vertices = enumerate_vertices(scenario)
    if len(weights) != len(vertices):
        raise FormatError(f"need {len(vertices)} weights, got {len(weights)}")
    return Point(tuple(
        sum(w * v.coords[i] for w, v in zip(weights, vertices))
        for i in range(scenario.dimension)
    ))


# --------------------------------------------------------------------------
# Scenario file format:
#   # comment
#   events: A1 A2 B1 B2
#   joint: A1 B1
# --------------------------------------------------------------------------

def parse_scenario_text(text: str, name: str = "custom") -> Scenario:
    events: list[EventId] | None = None
    joints: list[Monomial] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("events:"):
            if events is not None:
                raise FormatError(f"line {lineno}: duplicate events line")
            events = [EventId.parse(tok) for tok in line[len("events:"):].split()]
        elif line.startswith("joint:"):
            if events is None:
                raise FormatError(f"line {lineno}: joint before events line")
            toks = line[len("joint:"):].split()
            if len(toks) < 2:
                raise FormatError(f"line {lineno}: a joint needs at least two events")
            joints.append(Monomial.of(*(EventId.parse(t) for t in toks)))
        else:
            raise FormatError(f"line {lineno}: unrecognized line {raw!r}")
    if events is None:
        raise FormatError("missing events line")
    return build_scenario(events, joints, name=name)


def load_scenario(path, name: str | None = None) -> Scenario:
    with open(path, "r", encoding="utf-8") as fp:
        text = fp.read()
    return parse_scenario_text(text, name=name or str(path))


def format_scenario(scenario: Scenario) -> str:
    lines = ["events: " + " ".join(str(e) for e in scenario.events)]
    for joint in scenario.joints:
        lines.append("joint: " + " ".join(str(e) for e in joint.events))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Built-in presets.  The basis orders below are load-bearing: inequality
# files, the shipped catalog, and all regression fixtures index into them.
# --------------------------------------------------------------------------

def _mk(name: str, events: str, joints: Sequence[str]) -> Scenario:
    return build_scenario(
        (EventId.parse(t) for t in events.split()),
        (Monomial.parse(j) for j in joints),
        name=name,
    )


_GHZ_PAIRS = [
    "A1B1", "A1C1", "A1B2", "A1C2",
    "A2B1", "A2C1", "A2B2", "A2C2",
    "B1C1", "B1C2", "B2C1", "B2C2",
]
_GHZ_TRIPLES = [
    "A1B1C1", "A1B1C2", "A1B2C1", "A1B2C2",
    "A2B1C1", "A2B1C2", "A2B2C1", "A2B2C2",
]

PRESETS: dict[str, Scenario] = {
    "ch": _mk("ch", "A1 A2 B1 B2", ["A1B1", "A1B2", "A2B1", "A2B2"]),
    "ghz26": _mk("ghz26", "A1 A2 B1 B2 C1 C2", _GHZ_PAIRS + _GHZ_TRIPLES),
    "two-by-three": _mk(
        "two-by-three",
        "A1 A2 A3 B1 B2 B3",
        ["A1B1", "A1B2", "A1B3", "A2B1", "A2B2", "A2B3", "A3B1", "A3B2", "A3B3"],
    ),
    "bell-wigner": _mk("bell-wigner", "A1 A2 A3", ["A1A2", "A1A3", "A2A3"]),
    "ghz-singles-triples": _mk("ghz-singles-triples", "A1 A2 B1 B2 C1 C2", _GHZ_TRIPLES),
}


def preset(name: str) -> Scenario:
    try:
        return PRESETS[name]
    except KeyError:
        raise FormatError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None
