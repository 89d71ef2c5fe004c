"""Almost-sure winning region solvers for safety, repeated-visit (buchi)
and eventually-stable (cobuchi) objectives.

Each solver returns a :class:`RankDecomposition`: the winning region plus the
increasing chain X0 <= X1 <= ... <= Xk = winning produced by the final round
of the outer fixpoint.  The chain drives template synthesis: the cell
Xi \\ Xi-1 collects states whose "progress" actions lead into Xi-1.

Rank indices are 0-based; for cobuchi, rank 0 is the safety core where the
play can be trapped forever, and for buchi, rank 0 is the empty set (the
chain is prepended with X0 = {}).

Every loop is bounded by |V| + 1 effective rounds; exceeding the bound raises
:class:`~congame.model.NonConvergence`, which the CLI maps to exit code 3.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .model import GameGraph, NonConvergence, Objective, ObjectiveKind
from .operators import afpre1_mask, apre1_mask, pre1_mask


@dataclass(frozen=True)
class RankDecomposition:
    """Winning region together with its rank chain.

    `ranks` is strictly increasing except for the degenerate single-element
    chain, and its last element equals `winning`.
    """

    winning: frozenset[str]
    ranks: tuple[frozenset[str], ...]

    def rank_of(self, state: str) -> int:
        """Index of the first chain element containing `state` (winning only)."""
        for i, x in enumerate(self.ranks):
            if state in x:
                return i
        raise KeyError(state)

    def cells(self) -> tuple[frozenset[str], ...]:
        """Difference cells Ui = Xi \\ Xi-1 for i >= 1."""
        out = []
        for i in range(1, len(self.ranks)):
            out.append(frozenset(self.ranks[i] - self.ranks[i - 1]))
        return tuple(out)

    def to_dict(self) -> dict:
        return {
            "winning": sorted(self.winning),
            "ranks": [sorted(x) for x in self.ranks],
            "rank_of": {v: self.rank_of(v) for v in sorted(self.winning)},
        }


def _dedupe(chain: list[int]) -> list[int]:
    out: list[int] = []
    for m in chain:
        if not out or m != out[-1]:
            out.append(m)
    return out


def _decomposition(g: GameGraph, winning_mask: int, chain: list[int]) -> RankDecomposition:
    return RankDecomposition(
        winning=g.unmask(winning_mask),
        ranks=tuple(g.unmask(m) for m in _dedupe(chain)),
    )


def solve_safety(g: GameGraph, target: Iterable[str]) -> RankDecomposition:
    """Largest subset of `target` that P1 can surely never leave."""
    i_mask = g.mask(target)
    x = i_mask
    for _ in range(g.n_states + 1):
        nxt = i_mask & pre1_mask(g, x)
        if nxt == x:
            return _decomposition(g, x, [x])
        x = nxt
    raise NonConvergence("safety fixpoint")


def _safety_core_mask(g: GameGraph, i_mask: int, z_mask: int) -> int:
    x = i_mask & z_mask
    for _ in range(g.n_states + 1):
        nxt = (i_mask & z_mask) & pre1_mask(g, x)
        if nxt == x:
            return x
        x = nxt
    raise NonConvergence("safety core fixpoint")


def solve_buchi(g: GameGraph, target: Iterable[str]) -> RankDecomposition:
    """States from which P1 visits `target` infinitely often almost surely."""
    i_mask = g.mask(target)
    not_i = g.full_mask & ~i_mask
    w = g.full_mask
    for _ in range(g.n_states + 1):
        x1 = i_mask & pre1_mask(g, w)
        chain = [x1]
        x = x1
        for _ in range(g.n_states + 1):
            nxt = (not_i & apre1_mask(g, w, x)) | x1
            if nxt == x:
                break
            chain.append(nxt)
            x = nxt
        else:
            raise NonConvergence("buchi rank chain")
        if x == w:
            return _decomposition(g, w, [0] + chain)
        w = x
    raise NonConvergence("buchi outer fixpoint")


def solve_cobuchi(g: GameGraph, target: Iterable[str]) -> RankDecomposition:
    """States from which P1 eventually stays inside `target` almost surely."""
    i_mask = g.mask(target)
    not_i = g.full_mask & ~i_mask
    z = g.full_mask
    for _ in range(g.n_states + 1):
        x0 = _safety_core_mask(g, i_mask, z)
        chain = [x0]
        cur = x0
        for _ in range(g.n_states + 1):
            # next rank: greatest fixpoint on Y starting from Z
            y = z
            for _ in range(g.n_states + 1):
                ny = cur \
                    | (i_mask & z & afpre1_mask(g, z, y, cur)) \
                    | (not_i & z & apre1_mask(g, z, cur))
                if ny == y:
                    break
                y = ny
            else:
                raise NonConvergence("cobuchi rank fixpoint")
            if y == cur:
                break
            chain.append(y)
            cur = y
        else:
            raise NonConvergence("cobuchi rank chain")
        if cur == z:
            return _decomposition(g, z, chain)
        z = cur
    raise NonConvergence("cobuchi outer fixpoint")


def solve(g: GameGraph, objective: Objective) -> RankDecomposition:
    if objective.kind is ObjectiveKind.SAFETY:
        return solve_safety(g, objective.target)
    if objective.kind is ObjectiveKind.BUCHI:
        return solve_buchi(g, objective.target)
    return solve_cobuchi(g, objective.target)
