"""Qualitative one-step operators for almost-sure analysis.

All operators quantify over player action subsets rather than probability
values: for almost-sure winning only the supports of the players' mixed
actions matter, so each operator has an equivalent support-level reading
that these implementations use directly.

Public functions take and return name sets; the ``*_mask`` variants work on
integer bitmasks over the game's sorted state/action indices and are what
the fixpoint solvers call in their inner loops.
"""

from __future__ import annotations

from collections.abc import Iterable

from .model import GameGraph, NonConvergence, UnknownAction


def _check_states(g: GameGraph, states: Iterable[str]) -> int:
    return g.mask(states)


def _check_gamma2(g: GameGraph, v: str, gamma2: Iterable[str]) -> int:
    vi = g.index(v)
    idx = {b: i for i, b in enumerate(g.p2_names(vi))}
    m = 0
    for b in gamma2:
        if b not in idx:
            raise UnknownAction(v, b, player=2)
        m |= 1 << idx[b]
    return m


def _check_gamma1(g: GameGraph, v: str, gamma1: Iterable[str]) -> int:
    vi = g.index(v)
    idx = {a: i for i, a in enumerate(g.p1_names(vi))}
    m = 0
    for a in gamma1:
        if a not in idx:
            raise UnknownAction(v, a, player=1)
        m |= 1 << idx[a]
    return m


def a_set_mask(g: GameGraph, vi: int, y_mask: int, gamma2_mask: int) -> int:
    """P1 actions whose every successor outside Y is excused by gamma2."""
    out = 0
    for ai in range(g.p1_count(vi)):
        ok = True
        for bi in range(g.p2_count(vi)):
            if not (y_mask >> g.succ_index(vi, ai, bi) & 1) and not (gamma2_mask >> bi & 1):
                ok = False
                break
        if ok:
            out |= 1 << ai
    return out


def b_set_mask(g: GameGraph, vi: int, x_mask: int, gamma1_mask: int) -> int:
    """P2 actions against which some P1 action from gamma1 reaches X."""
    out = 0
    for bi in range(g.p2_count(vi)):
        for ai in range(g.p1_count(vi)):
            if gamma1_mask >> ai & 1 and x_mask >> g.succ_index(vi, ai, bi) & 1:
                out |= 1 << bi
                break
    return out


def pre1_mask(g: GameGraph, x_mask: int) -> int:
    out = 0
    for vi in range(g.n_states):
        if a_set_mask(g, vi, x_mask, 0):
            out |= 1 << vi
    return out


def apre1_mask(g: GameGraph, y_mask: int, x_mask: int) -> int:
    """States where P1 can stay in Y surely while hitting X against every
    opponent action with positive probability."""
    out = 0
    for vi in range(g.n_states):
        stay = a_set_mask(g, vi, y_mask, 0)
        full_b = (1 << g.p2_count(vi)) - 1
        if b_set_mask(g, vi, x_mask, stay) == full_b:
            out |= 1 << vi
    return out


def afpre_fix_mask(g: GameGraph, vi: int, z_mask: int, y_mask: int, x_mask: int) -> int:
    """Greatest fixpoint of gamma -> A_Z(0) & A_Y(B_X(gamma)) at one state.

    Starts at A_Z(0); each round is monotone decreasing, so it stabilizes in
    at most |P1 actions| rounds.
    """
    stay_z = a_set_mask(g, vi, z_mask, 0)
    gamma = stay_z
    for _ in range(g.p1_count(vi) + 2):
        nxt = stay_z & a_set_mask(g, vi, y_mask, b_set_mask(g, vi, x_mask, gamma))
        if nxt == gamma:
            return gamma
        gamma = nxt
    raise NonConvergence("action fixpoint exceeded its bound")  # pragma: no cover


def afpre1_mask(g: GameGraph, z_mask: int, y_mask: int, x_mask: int) -> int:
    out = 0
    for vi in range(g.n_states):
        if afpre_fix_mask(g, vi, z_mask, y_mask, x_mask):
            out |= 1 << vi
    return out


# -- name-level API ----------------------------------------------------------

def a_set(g: GameGraph, v: str, Y: Iterable[str], gamma2: Iterable[str]) -> frozenset[str]:
    vi = g.index(v)
    m = a_set_mask(g, vi, _check_states(g, Y), _check_gamma2(g, v, gamma2))
    return frozenset(a for i, a in enumerate(g.p1_names(vi)) if m >> i & 1)


def b_set(g: GameGraph, v: str, X: Iterable[str], gamma1: Iterable[str]) -> frozenset[str]:
    vi = g.index(v)
    m = b_set_mask(g, vi, _check_states(g, X), _check_gamma1(g, v, gamma1))
    return frozenset(b for i, b in enumerate(g.p2_names(vi)) if m >> i & 1)


def pre1(g: GameGraph, X: Iterable[str]) -> frozenset[str]:
    """States with a P1 action keeping the game surely inside X."""
    return g.unmask(pre1_mask(g, _check_states(g, X)))


def apre1(g: GameGraph, Y: Iterable[str], X: Iterable[str]) -> frozenset[str]:
    return g.unmask(apre1_mask(g, _check_states(g, Y), _check_states(g, X)))


def afpre_action_fixpoint(
    g: GameGraph, v: str, Z: Iterable[str], Y: Iterable[str], X: Iterable[str],
) -> frozenset[str]:
    vi = g.index(v)
    m = afpre_fix_mask(
        g, vi, _check_states(g, Z), _check_states(g, Y), _check_states(g, X))
    return frozenset(a for i, a in enumerate(g.p1_names(vi)) if m >> i & 1)


def afpre1(g: GameGraph, Z: Iterable[str], Y: Iterable[str], X: Iterable[str]) -> frozenset[str]:
    """States whose action fixpoint is nonempty: P1 can stay in Z surely and,
    whenever leaving Y is possible, also hit X with positive probability."""
    return g.unmask(
        afpre1_mask(g, _check_states(g, Z), _check_states(g, Y), _check_states(g, X)))
