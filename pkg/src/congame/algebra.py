"""Combining templates: conjunction by merging, exact buchi conjunctions by
counter product, and the incremental batch harness.

Merging is per-state union of the unsafe/colive sets and of the live group
collections, with the winning regions intersected; it is commutative and
associative up to the canonical ordering applied here.  Merging can create
conflicts (a state where the union blocks everything); these are detected,
reported, and never silently repaired.

For conjunctions of pure buchi objectives the counter product gives the
exact almost-sure region: the game is unrolled against a round-robin counter
that advances past target i when it is visited, and the product's buchi
template is projected back to the base game by union over counter values (a
sound memoryless weakening of the finite-memory product template; the
projected winning region is exact).
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

from .corpus import random_game, random_subset
from .model import (
    GameGraph,
    InputError,
    Objective,
    ObjectiveKind,
)
from .templates import (
    ConflictReport,
    Template,
    buchi_template,
    canonical_groups,
    check_conflict_free,
    template_for,
    validate_template,
)


class GameMismatch(InputError):
    """A template mentions states or actions the game does not have."""


class UnsupportedObjective(InputError):
    def __init__(self, kind: str, context: str):
        super().__init__(f"{context} does not support {kind!r} objectives")
        self.kind = kind


def _merge_tag(parts: Sequence[str]) -> str:
    atoms: list[str] = []
    for tag in parts:
        atoms.extend(tag.split("+"))
    return "+".join(sorted(atoms))


def compose(g: GameGraph, templates: Sequence[Template]) -> tuple[Template, ConflictReport]:
    """Merge templates over one arena; returns the merged template and the
    conflict report on the intersected winning region."""
    if not templates:
        raise InputError("compose needs at least one template")
    for t in templates:
        try:
            validate_template(g, t)
        except InputError as e:
            raise GameMismatch(f"template does not fit the game: {e}") from None

    winning = frozenset(g.states)
    unsafe: dict[str, frozenset[str]] = {}
    colive: dict[str, frozenset[str]] = {}
    live: dict[str, set[frozenset[str]]] = {}
    cells: set[frozenset[str]] = set()
    for t in templates:
        winning &= t.winning
        for v, s in t.unsafe.items():
            if s:
                unsafe[v] = unsafe.get(v, frozenset()) | s
        for v, c in t.colive.items():
            if c:
                colive[v] = colive.get(v, frozenset()) | c
        for v, hs in t.live.items():
            live.setdefault(v, set()).update(hs)
        cells.update(cell for cell in t.partition if cell)
    merged = Template(
        winning=winning,
        unsafe=unsafe,
        live={v: canonical_groups(hs) for v, hs in live.items()},
        partition=tuple(sorted(cells, key=sorted)),
        colive=colive,
        objective_tag=_merge_tag([t.objective_tag for t in templates]),
    )
    return merged, check_conflict_free(g, merged)


# -- exact buchi conjunction via counter product ------------------------------

def _product_name(v: str, c: int) -> str:
    return f"{v}@{c}"


def counter_product(
    g: GameGraph, targets: Sequence[frozenset[str]],
) -> tuple[GameGraph, frozenset[str]]:
    """Product of `g` with a round-robin counter over the buchi targets.

    The counter advances past index c when the current base state lies in
    targets[c]; the product target is "counter at the last objective and on
    it", so visiting the product target infinitely often is equivalent to
    visiting every base target infinitely often.
    """
    k = len(targets)
    if k == 0:
        raise InputError("counter product needs at least one target")
    states = [_product_name(v, c) for v in g.states for c in range(k)]
    p1 = {}
    p2 = {}
    delta = {}
    for v in g.states:
        for c in range(k):
            name = _product_name(v, c)
            p1[name] = g.p1_actions(v)
            p2[name] = g.p2_actions(v)
            nxt_c = (c + 1) % k if v in targets[c] else c
            for a in g.p1_actions(v):
                for b in g.p2_actions(v):
                    delta[(name, a, b)] = _product_name(g.succ(v, a, b), nxt_c)
    ptarget = frozenset(_product_name(v, k - 1) for v in targets[k - 1])
    return GameGraph(states, p1, p2, delta), ptarget


def buchi_conjunction(
    g: GameGraph, objectives: Sequence[Objective],
) -> tuple[Template, frozenset[str]]:
    """Exact conjunction of buchi objectives.

    Returns the base-game projection of the product template together with
    the exact winning region (base states winning at counter 0).  The
    projection unions the per-counter constraints, so it can be stricter
    than necessary, but the winning region is exact.
    """
    for obj in objectives:
        if obj.kind is not ObjectiveKind.BUCHI:
            raise UnsupportedObjective(obj.kind.value, "exact conjunction")
    targets = [frozenset(obj.target) for obj in objectives]
    pg, ptarget = counter_product(g, targets)
    pt = buchi_template(pg, ptarget)
    k = len(targets)

    winning = frozenset(v for v in g.states if _product_name(v, 0) in pt.winning)
    unsafe: dict[str, frozenset[str]] = {}
    live: dict[str, set[frozenset[str]]] = {}
    for v in g.states:
        s: frozenset[str] = frozenset()
        hs: set[frozenset[str]] = set()
        for c in range(k):
            name = _product_name(v, c)
            s |= pt.unsafe_at(name)
            hs.update(pt.groups_at(name))
        if s:
            unsafe[v] = s
        live[v] = hs
    cells = {
        frozenset(name.rsplit("@", 1)[0] for name in cell)
        for cell in pt.partition if cell
    }
    projected = Template(
        winning=winning,
        unsafe=unsafe,
        live={v: canonical_groups(hs) for v, hs in live.items()},
        partition=tuple(sorted(cells, key=sorted)),
        colive={},
        objective_tag=_merge_tag(["buchi"] * k),
    )
    return projected, winning


# -- incremental synthesis -----------------------------------------------------

@dataclass(frozen=True)
class IncrementalStep:
    """State of the incremental pipeline after adding one more objective."""

    index: int
    objective: Objective
    template: Template
    conflicts: ConflictReport
    exact_winning: Optional[frozenset[str]]

    def to_dict(self) -> dict:
        out = {
            "index": self.index,
            "objective": self.objective.to_dict(),
            "winning": sorted(self.template.winning),
            "conflict_free": self.conflicts.ok,
            "conflicts": [c.to_dict() for c in self.conflicts.conflicts],
        }
        if self.exact_winning is not None:
            out["exact_winning"] = sorted(self.exact_winning)
        return out


def incremental_synthesize(
    g: GameGraph, objectives: Sequence[Objective],
) -> list[IncrementalStep]:
    """Add objectives one at a time, merging their templates and reporting
    conflicts at each step.  For all-buchi prefixes the exact conjunction
    region is computed alongside as a permissiveness reference.
    """
    if not objectives:
        raise InputError("incremental synthesis needs at least one objective")
    parts: list[Template] = []
    steps: list[IncrementalStep] = []
    for i, obj in enumerate(objectives, start=1):
        parts.append(template_for(g, obj))
        merged, report = compose(g, parts)
        exact: Optional[frozenset[str]] = None
        if all(o.kind is ObjectiveKind.BUCHI for o in objectives[:i]):
            _, exact = buchi_conjunction(g, objectives[:i])
        steps.append(IncrementalStep(i, obj, merged, report, exact))
    return steps


# -- randomized batch harness --------------------------------------------------

@dataclass(frozen=True)
class HeatmapRow:
    objective_size: int
    objectives_added: int
    conflict_fraction: float


def _heatmap_instance(args) -> dict[int, list[bool]]:
    seed, sizes, max_objectives, n_states = args
    rng = random.Random(seed)
    g = random_game(rng, n_states=n_states)
    out: dict[int, list[bool]] = {}
    for size in sizes:
        span = min(size, g.n_states)
        objectives = [
            Objective(ObjectiveKind.BUCHI, random_subset(rng, g.states, span))
            for _ in range(max_objectives)
        ]
        steps = incremental_synthesize(g, objectives)
        out[size] = [not step.conflicts.ok for step in steps]
    return out


def run_heatmap(
    games: int = 200,
    sizes: Sequence[int] = (1, 2, 3),
    max_objectives: int = 4,
    n_states: int = 5,
    seed: int = 0,
    jobs: int = 1,
) -> list[HeatmapRow]:
    """Conflict frequency of merged buchi templates on random games.

    Game i is drawn from seed `seed + i`; for each target size the harness
    composes `max_objectives` random buchi templates incrementally and
    records where conflicts appear.  Rows are averaged over the games and
    sorted by (objective_size, objectives_added).
    """
    if games <= 0:
        raise InputError("games must be positive")
    tasks = [(seed + i, tuple(sizes), max_objectives, n_states) for i in range(games)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_heatmap_instance, tasks))
    else:
        results = [_heatmap_instance(task) for task in tasks]
    rows = []
    for size in sizes:
        for k in range(1, max_objectives + 1):
            hits = sum(1 for res in results if res[size][k - 1])
            rows.append(HeatmapRow(size, k, hits / games))
    return rows


def heatmap_csv(rows: Sequence[HeatmapRow]) -> str:
    lines = ["objective_size,objectives_added,conflict_fraction"]
    for row in rows:
        lines.append(f"{row.objective_size},{row.objectives_added},{row.conflict_fraction}")
    return "\n".join(lines) + "\n"
