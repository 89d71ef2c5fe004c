"""Permissive strategy templates and their synthesis from rank decompositions.

A template constrains P1's behaviour through three per-state devices:

* unsafe actions  -- must never be played (any positive mass is a violation);
* live groups     -- at states of a partition cell, each action group must be
                     played "persistently": along a play that hits the cell
                     infinitely often the group probabilities must not decay
                     summably;
* colive actions  -- may be played only finitely much in expectation: the
                     per-visit probabilities must sum to a finite value.

Template (JSON):

    {
      "winning": [...],
      "unsafe": {state: [actions]},          # omitted when empty
      "live": {state: [[group], ...]},       # groups, possibly empty lists
      "partition": [[states], ...],          # ordered cells
      "colive": {state: [actions]},          # omitted when empty
      "objective_tag": "safety" | "buchi" | "cobuchi" | ...
    }

Following any strategy whose behaviour respects all three devices wins
almost surely from every state of `winning`.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Union

from .model import (
    ActionDistribution,
    GameGraph,
    InputError,
    Objective,
    ObjectiveKind,
    UnknownAction,
    UnknownState,
)
from .operators import a_set
from .solvers import RankDecomposition, solve_buchi, solve_cobuchi, solve_safety


def canonical_groups(groups: Iterable[Iterable[str]]) -> tuple[frozenset[str], ...]:
    """Deduplicate and order action groups deterministically."""
    uniq = {frozenset(h) for h in groups}
    return tuple(sorted(uniq, key=sorted))


@dataclass(frozen=True)
class Template:
    winning: frozenset[str]
    unsafe: Mapping[str, frozenset[str]]
    live: Mapping[str, tuple[frozenset[str], ...]]
    partition: tuple[frozenset[str], ...]
    colive: Mapping[str, frozenset[str]]
    objective_tag: str

    def unsafe_at(self, v: str) -> frozenset[str]:
        return self.unsafe.get(v, frozenset())

    def colive_at(self, v: str) -> frozenset[str]:
        return self.colive.get(v, frozenset())

    def groups_at(self, v: str) -> tuple[frozenset[str], ...]:
        return self.live.get(v, ())

    def cell_states(self) -> frozenset[str]:
        out: set[str] = set()
        for cell in self.partition:
            out |= cell
        return frozenset(out)

    def to_dict(self) -> dict:
        return {
            "winning": sorted(self.winning),
            "unsafe": {v: sorted(s) for v, s in sorted(self.unsafe.items()) if s},
            "live": {v: [sorted(h) for h in hs] for v, hs in sorted(self.live.items())},
            "partition": [sorted(cell) for cell in self.partition],
            "colive": {v: sorted(c) for v, c in sorted(self.colive.items()) if c},
            "objective_tag": self.objective_tag,
        }


def template_from_dict(raw: Mapping) -> Template:
    if not isinstance(raw, Mapping):
        raise InputError("template must be a JSON object")
    for key in ("winning", "live", "partition", "objective_tag"):
        if key not in raw:
            raise InputError(f"template missing {key!r}")
    unsafe = {v: frozenset(s) for v, s in raw.get("unsafe", {}).items() if s}
    colive = {v: frozenset(c) for v, c in raw.get("colive", {}).items() if c}
    live = {v: canonical_groups(hs) for v, hs in raw["live"].items()}
    partition = tuple(frozenset(cell) for cell in raw["partition"])
    return Template(
        winning=frozenset(raw["winning"]),
        unsafe=unsafe,
        live=live,
        partition=partition,
        colive=colive,
        objective_tag=str(raw["objective_tag"]),
    )


def validate_template(g: GameGraph, t: Template) -> None:
    """Check that every state/action the template mentions exists in `g`."""
    for v in t.winning:
        if v not in g:
            raise UnknownState(v)
    for table, player in ((t.unsafe, 1), (t.colive, 1)):
        for v, acts in table.items():
            allowed = set(g.p1_actions(v))
            for a in acts:
                if a not in allowed:
                    raise UnknownAction(v, a, player=player)
    for v, hs in t.live.items():
        allowed = set(g.p1_actions(v))
        for h in hs:
            for a in h:
                if a not in allowed:
                    raise UnknownAction(v, a)
    for cell in t.partition:
        for v in cell:
            if v not in g:
                raise UnknownState(v)


def min_prob(d: ActionDistribution, groups: Iterable[Iterable[str]]) -> float:
    """Smallest probability mass `d` puts on any of the groups.

    An empty group contributes 0; an empty collection of groups poses no
    constraint and yields 1.
    """
    best = 1.0
    for h in groups:
        best = min(best, d.mass(h))
    return best


def _unsafe_map(g: GameGraph, winning: frozenset[str]) -> dict[str, frozenset[str]]:
    out: dict[str, frozenset[str]] = {}
    for v in sorted(winning):
        s = frozenset(g.p1_actions(v)) - a_set(g, v, winning, ())
        if s:
            out[v] = s
    return out


def _trivial_fill(
    g: GameGraph,
    live: dict[str, tuple[frozenset[str], ...]],
    unsafe: Mapping[str, frozenset[str]],
) -> None:
    for v in g.states:
        if v not in live:
            live[v] = (frozenset(g.p1_actions(v)) - unsafe.get(v, frozenset()),)


def safety_template(
    g: GameGraph, winning: Union[RankDecomposition, Iterable[str]],
) -> Template:
    """Unsafe-action template for staying inside a safety winning region."""
    w = winning.winning if isinstance(winning, RankDecomposition) else frozenset(winning)
    unsafe = _unsafe_map(g, w)
    live: dict[str, tuple[frozenset[str], ...]] = {}
    _trivial_fill(g, live, unsafe)
    return Template(
        winning=w, unsafe=unsafe, live=live, partition=(), colive={},
        objective_tag="safety",
    )


def _rank_groups(
    g: GameGraph,
    v: str,
    prev_rank: frozenset[str],
    s: frozenset[str],
) -> tuple[frozenset[str], ...]:
    # one group per opponent action: non-unsafe actions that step into the
    # previous rank against it; duplicates collapse
    groups = []
    for b in g.p2_actions(v):
        groups.append(frozenset(
            a for a in g.p1_actions(v)
            if a not in s and g.succ(v, a, b) in prev_rank))
    return canonical_groups(groups)


def buchi_template(g: GameGraph, target: Iterable[str]) -> Template:
    """Template whose followers revisit `target` infinitely often a.s.

    Rank cells come from the solver chain; states of cell Ui get one live
    group per opponent action holding the actions that progress into Xi-1.
    Target states and losing states get the trivial group of all non-unsafe
    actions.
    """
    decomp = solve_buchi(g, target)
    unsafe = _unsafe_map(g, decomp.winning)
    live: dict[str, tuple[frozenset[str], ...]] = {}
    partition: list[frozenset[str]] = []
    ranks = decomp.ranks
    for i in range(2, len(ranks)):
        cell = ranks[i] - ranks[i - 1]
        partition.append(cell)
        for v in sorted(cell):
            live[v] = _rank_groups(g, v, ranks[i - 1], unsafe.get(v, frozenset()))
    _trivial_fill(g, live, unsafe)
    return Template(
        winning=decomp.winning, unsafe=unsafe, live=live,
        partition=tuple(partition), colive={}, objective_tag="buchi",
    )


def cobuchi_template(g: GameGraph, target: Iterable[str]) -> Template:
    """Template whose followers eventually stay inside `target` a.s.

    Rank 0 is the safety core: there the actions that could leave it (yet
    stay in the winning region) are colive, playable only finitely.  Higher
    cells get per-opponent-action progress groups exactly as for buchi,
    including at target states.
    """
    decomp = solve_cobuchi(g, target)
    unsafe = _unsafe_map(g, decomp.winning)
    ranks = decomp.ranks
    core = ranks[0]
    colive: dict[str, frozenset[str]] = {}
    for v in sorted(core):
        s = unsafe.get(v, frozenset())
        c = frozenset(g.p1_actions(v)) - a_set(g, v, core, ()) - s
        if c:
            colive[v] = c
    live: dict[str, tuple[frozenset[str], ...]] = {}
    partition: list[frozenset[str]] = []
    for i in range(1, len(ranks)):
        cell = ranks[i] - ranks[i - 1]
        partition.append(cell)
        for v in sorted(cell):
            live[v] = _rank_groups(g, v, ranks[i - 1], unsafe.get(v, frozenset()))
    _trivial_fill(g, live, unsafe)
    return Template(
        winning=decomp.winning, unsafe=unsafe, live=live,
        partition=tuple(partition), colive=colive, objective_tag="cobuchi",
    )


def template_for(g: GameGraph, objective: Objective) -> Template:
    if objective.kind is ObjectiveKind.SAFETY:
        return safety_template(g, solve_safety(g, objective.target))
    if objective.kind is ObjectiveKind.BUCHI:
        return buchi_template(g, objective.target)
    return cobuchi_template(g, objective.target)


@dataclass(frozen=True)
class Conflict:
    state: str
    clause: str
    witness: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"state": self.state, "clause": self.clause, "witness": list(self.witness)}


@dataclass(frozen=True)
class ConflictReport:
    conflicts: tuple[Conflict, ...]

    @property
    def ok(self) -> bool:
        return not self.conflicts

    def to_dict(self) -> dict:
        return {"conflict_free": self.ok,
                "conflicts": [c.to_dict() for c in self.conflicts]}


def check_conflict_free(g: GameGraph, t: Template) -> ConflictReport:
    """Detect states of the winning region where the template's constraints
    cannot all be met by any strategy.

    Clause order per state: every action unsafe; every action unsafe or
    colive; a nonempty live group fully unsafe or colive.  Empty groups are
    exempt: they demand nothing at the state itself (progress through the
    rest of their cell covers them).
    """
    found: list[Conflict] = []
    on_cell = t.cell_states()
    for v in sorted(t.winning):
        all_acts = frozenset(g.p1_actions(v))
        s = t.unsafe_at(v)
        c = t.colive_at(v)
        if not all_acts - s:
            found.append(Conflict(v, "no-safe-action", tuple(sorted(s))))
        if not all_acts - s - c:
            found.append(Conflict(v, "no-persistent-action", tuple(sorted(s | c))))
        if v in on_cell:
            for h in t.groups_at(v):
                if h and not h - s - c:
                    found.append(Conflict(v, "live-group-blocked", tuple(sorted(h))))
    return ConflictReport(tuple(found))
