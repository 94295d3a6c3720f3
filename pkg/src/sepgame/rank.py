"""Interaction matrices and the rank of a separable game.

For players ``i`` and ``j`` the matrix ``S_ij`` has one column per basis
function of player ``i`` and one row per tuple of basis indices of the other
players, so that ``u_j(s) = f_{-i}(s_{-i}) @ S_ij @ f_i(s_i)``.  Rows are
ordered with the first remaining player's index varying fastest.

The rank bound is ``rank S_i`` (the ``S_ij`` stacked over ``j != i``).  The
exact rank is ``rank T_i``, computed after rewriting the game so that player
``i``'s first basis function is the constant 1 and every player's basis is
linearly independent; ``T_i`` drops that constant column.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .game import (Indicators, Monomials, SeparableGame, Tabulated,
                   UnsupportedGameError)
from .numerics import DEFAULT_TOL, EXACT, FLOAT, matrix_rank, rref


class UncertifiedBasisError(UnsupportedGameError):
    """Linear independence of a tabulated basis cannot be certified."""


def _as_mode(a: np.ndarray, mode: str) -> np.ndarray:
    return a if mode == EXACT else a.astype(float)


def interaction_block(coeffs: np.ndarray, i: int) -> np.ndarray:
    """``coeffs`` (one player's tensor) arranged with player ``i``'s index as columns."""
    moved = np.moveaxis(coeffs, i, -1)
    m_i = moved.shape[-1]
    return moved.reshape(-1, m_i, order="F")


def row_labels(sizes: tuple[int, ...], i: int) -> list[tuple[int, ...]]:
    """Basis-index tuples of the other players, in row order."""
    others = [range(m) for k, m in enumerate(sizes) if k != i]
    return [tuple(reversed(t)) for t in itertools.product(*reversed(others))]


@dataclass(frozen=True)
class InteractionMatrices:
    player: int
    blocks: dict          # opponent j -> S_ij
    stacked: np.ndarray   # blocks stacked vertically in increasing j
    row_order: list       # index tuples labelling the rows of each block


def build_interaction(g: SeparableGame, i: int, mode: str = EXACT,
                      include_self: bool = False, coeffs=None) -> InteractionMatrices:
    coeffs = g.coeffs if coeffs is None else coeffs
    sizes = coeffs[0].shape
    blocks = {}
    for j in range(g.n):
        if j == i and not include_self:
            continue
        blocks[j] = _as_mode(interaction_block(coeffs[j], i), mode)
    m_i = sizes[i]
    if blocks:
        stacked = np.vstack(list(blocks.values()))
    else:
        stacked = _as_mode(np.zeros((0, m_i), dtype=object), mode)
    return InteractionMatrices(i, blocks, stacked, row_labels(sizes, i))


def rank_bound(g: SeparableGame, i: int, mode: str = EXACT, tol: float = DEFAULT_TOL) -> int:
    return matrix_rank(build_interaction(g, i, mode).stacked, mode, tol)


# ------------------------------------------------------------ canonical form


def _sample_matrix(g: SeparableGame, k: int) -> np.ndarray:
    """Basis values at enough points to decide linear relations among them."""
    b, sp = g.bases[k], g.spaces[k]
    if isinstance(b, Monomials):
        m = b.count
        if m == 1:
            pts = [sp.lo]
        else:
            pts = [sp.lo + (sp.hi - sp.lo) * Fraction(t, m - 1) for t in range(m)]
        return np.array([list(b.evaluate(p)) for p in pts], dtype=object)
    if isinstance(b, Indicators):
        eye = np.full((b.size, b.size), Fraction(0), dtype=object)
        for t in range(b.size):
            eye[t, t] = Fraction(1)
        return eye
    if isinstance(b, Tabulated):
        if len(b.points) < 2 * b.size:
            raise UncertifiedBasisError(
                f"player {k}: tabulated basis with {b.size} functions needs at least "
                f"{2 * b.size} sample points to certify independence, got {len(b.points)}")
        return b.values.copy()
    raise UnsupportedGameError(f"player {k}: unknown basis {type(b).__name__}")


@dataclass(frozen=True)
class CanonicalForm:
    """Game rewritten over independent bases, player ``player`` with a leading constant.

    ``kept[k]`` lists the canonical basis of player ``k``: ``None`` is the
    constant function, an int is an original basis index.  ``transforms[k]``
    is the ``m_k x mbar_k`` matrix expressing each original function in the
    canonical basis, and ``coeffs`` are the rewritten payoff tensors.
    """

    player: int
    kept: tuple
    transforms: tuple
    coeffs: tuple
    s_bar: np.ndarray
    t: np.ndarray
    mode: str

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(k) for k in self.kept)

    def basis_values(self, g: SeparableGame, k: int, point) -> np.ndarray:
        """Canonical basis of player ``k`` evaluated at ``point``."""
        raw = g.basis_values(k, point)
        one = Fraction(1) if self.mode == EXACT else 1.0
        out = np.array([one if j is None else raw[j] for j in self.kept[k]], dtype=object)
        return out if self.mode == EXACT else out.astype(float)

    def payoff_pure(self, g: SeparableGame, s) -> list:
        vecs = [self.basis_values(g, k, p) for k, p in enumerate(s)]
        out = []
        for a in self.coeffs:
            r = a
            for v in reversed(vecs):
                r = np.tensordot(r, v, axes=([r.ndim - 1], [0]))
            out.append(r[()] if isinstance(r, np.ndarray) else r)
        return out


def _independent_basis(v: np.ndarray, order: list, mode: str, tol: float):
    """Greedy maximal independent subset of the columns of ``v`` taken in ``order``.

    ``order`` entries are original column indices or ``None`` for the constant
    column.  Returns the kept entries and the matrix expressing every
    original column in terms of them.
    """
    ones = np.full((v.shape[0], 1), Fraction(1), dtype=object)
    cols = [ones if c is None else v[:, [c]] for c in order]
    mat = np.hstack(cols)
    r, pivots = rref(mat if mode == EXACT else mat.astype(float), mode, tol)
    kept = [order[p] for p in pivots]
    m = v.shape[1]
    zero = Fraction(0) if mode == EXACT else 0.0
    transform = np.full((m, len(pivots)), zero, dtype=object if mode == EXACT else float)
    for pos, c in enumerate(order):
        if c is None:
            continue
        transform[c, :] = r[: len(pivots), pos]
    return kept, transform


def canonicalize(g: SeparableGame, i: int, mode: str = EXACT, tol: float = DEFAULT_TOL,
                 include_self: bool = False) -> CanonicalForm:
    kept_all, transforms = [], []
    for k in range(g.n):
        v = _sample_matrix(g, k)
        m = v.shape[1]
        if k != i:
            order = list(range(m))
        else:
            const = [c for c in range(m) if all(x == 1 for x in v[:, c])]
            if const:
                order = [const[0]] + [c for c in range(m) if c != const[0]]
            else:
                # the constant replaces the first function, which moves last
                order = [None] + list(range(1, m)) + [0]
        kept, transform = _independent_basis(v, order, mode, tol)
        kept_all.append(tuple(kept))
        transforms.append(transform)

    coeffs = []
    for a in g.coeffs:
        out = _as_mode(a, mode)
        for k, tr in enumerate(transforms):
            out = np.moveaxis(np.tensordot(out, tr, axes=([k], [0])), -1, k)
        coeffs.append(out)
    inter = build_interaction(g, i, mode, include_self=include_self, coeffs=coeffs)
    s_bar = inter.stacked
    return CanonicalForm(i, tuple(kept_all), tuple(transforms), tuple(coeffs),
                         s_bar, s_bar[:, 1:], mode)


def exact_rank(g: SeparableGame, i: int, mode: str = EXACT, tol: float = DEFAULT_TOL) -> int:
    """The rank ``rho_i`` of the game, i.e. ``rank T_i``."""
    return matrix_rank(canonicalize(g, i, mode, tol).t, mode, tol)


@dataclass(frozen=True)
class PlayerRank:
    m: int
    rank_bound: int
    rho: int

    @property
    def naive_support_bound(self) -> int:
        return self.m + 1

    @property
    def support_bound(self) -> int:
        return self.rho + 1


@dataclass(frozen=True)
class RankReport:
    players: tuple
    mode: str

    @property
    def rho(self) -> tuple[int, ...]:
        return tuple(p.rho for p in self.players)

    @property
    def rank_bounds(self) -> tuple[int, ...]:
        return tuple(p.rank_bound for p in self.players)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "rho": list(self.rho),
            "players": [
                {"m": p.m, "rank_bound": p.rank_bound, "rho": p.rho,
                 "naive_support_bound": p.naive_support_bound,
                 "support_bound": p.support_bound}
                for p in self.players
            ],
        }


def rank_report(g: SeparableGame, mode: str = EXACT, tol: float = DEFAULT_TOL) -> RankReport:
    players = []
    for i in range(g.n):
        players.append(PlayerRank(g.sizes[i], rank_bound(g, i, mode, tol),
                                  exact_rank(g, i, mode, tol)))
    return RankReport(tuple(players), mode)
