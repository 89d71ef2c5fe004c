"""Seeded random games and objectives for batch experiments and testing.

Everything here consumes randomness exclusively through ``rng.random()`` so
that a given seed reproduces the same instances on any platform and Python
version (only the generator's float stream carries that guarantee).
"""

from __future__ import annotations

import random
from collections.abc import Sequence

from .model import GameGraph, Objective, ObjectiveKind

P1_POOL = ("a", "b", "c")
P2_POOL = ("d", "e", "f")


def rand_int(rng: random.Random, n: int) -> int:
    """Uniform draw from range(n) as a pure function of rng.random()."""
    assert n > 0
    return min(int(rng.random() * n), n - 1)


def random_subset(rng: random.Random, pool: Sequence[str], size: int) -> frozenset[str]:
    """Uniform subset of the given size, drawn without replacement."""
    remaining = sorted(pool)
    assert 0 < size <= len(remaining)
    out = []
    for _ in range(size):
        out.append(remaining.pop(rand_int(rng, len(remaining))))
    return frozenset(out)


def random_game(
    rng: random.Random,
    n_states: int = 5,
    max_actions: int = 3,
) -> GameGraph:
    """A random arena: q0..qn-1, 1..max_actions actions per player per state,
    uniformly random deterministic joint transitions."""
    states = [f"q{i}" for i in range(n_states)]
    p1 = {}
    p2 = {}
    delta = {}
    for v in states:
        p1[v] = P1_POOL[: 1 + rand_int(rng, max_actions)]
        p2[v] = P2_POOL[: 1 + rand_int(rng, max_actions)]
        for a in p1[v]:
            for b in p2[v]:
                delta[(v, a, b)] = states[rand_int(rng, n_states)]
    return GameGraph(states, p1, p2, delta)


def random_objective(
    rng: random.Random,
    g: GameGraph,
    kinds: Sequence[ObjectiveKind] = tuple(ObjectiveKind),
    max_size: int | None = None,
) -> Objective:
    kind = kinds[rand_int(rng, len(kinds))]
    limit = g.n_states if max_size is None else min(max_size, g.n_states)
    size = 1 + rand_int(rng, limit)
    return Objective(kind, random_subset(rng, g.states, size))
