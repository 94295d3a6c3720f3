"""Caratheodory support reduction for mixed strategies and equilibria."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .game import (Interval, MixedProfile, MixedStrategy, Monomials, SeparableGame,
                   moment_map)
from .numerics import (DEFAULT_TOL, EXACT, FLOAT, UniPoly, affine_dependence,
                       row_space_basis)
from .rank import CanonicalForm, canonicalize


def _all_exact(values) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


def caratheodory_reduce(points: Sequence[Sequence], weights: Sequence,
                        mode: str | None = None, tol: float = DEFAULT_TOL) -> list:
    """Reweight so that at most ``d + 1`` points carry mass, same barycenter.

    The result keeps total mass and ``sum(w_k p_k)``, and only ever moves
    mass off points (support shrinks).  Among atoms that can be dropped the
    one with the smallest index goes first.
    """
    if len(points) != len(weights):
        raise ValueError("points and weights differ in length")
    if any(w < 0 for w in weights):
        raise ValueError("negative weight")
    if mode is None:
        flat = [x for p in points for x in p]
        mode = EXACT if _all_exact(weights) and _all_exact(flat) else FLOAT
    if mode == EXACT:
        w = [Fraction(x) for x in weights]
        pts = [[Fraction(x) for x in p] for p in points]
    else:
        w = [float(x) for x in weights]
        pts = [[float(x) for x in p] for p in points]
    d = len(pts[0]) if pts else 0
    active = [k for k, x in enumerate(w) if x > 0]
    while len(active) > d + 1:
        lam = affine_dependence([pts[k] for k in active], mode, tol)
        if lam is None:
            # cannot happen for more than d + 1 points
            raise ArithmeticError("no affine dependence among d + 2 points")
        eps = 0 if mode == EXACT else 1e-12 * float(np.max(np.abs(lam)))
        best, drop = None, None
        for pos, k in enumerate(active):
            if lam[pos] > eps:
                ratio = w[k] / lam[pos]
                if best is None or ratio < best:
                    best, drop = ratio, k
        for pos, k in enumerate(active):
            w[k] = w[k] - best * lam[pos]
        w[drop] = 0 if mode == EXACT else 0.0
        if mode == FLOAT:
            w = [x if x > 1e-15 else 0.0 for x in w]
        active = [k for k in active if w[k] > 0]
    return w


def _reweighted(sigma: MixedStrategy, weights: Sequence) -> MixedStrategy:
    return MixedStrategy(tuple((p, w) for p, w in zip(sigma.points, weights) if w > 0))


def reduce_moment_equivalent(g: SeparableGame, i: int, sigma: MixedStrategy,
                             tol: float = DEFAULT_TOL) -> MixedStrategy:
    """A strategy with the same moments, at most ``m_i + 1`` atoms, inside the support."""
    pts = [list(moment_map(g, i, MixedStrategy.pure(p))) for p in sigma.points]
    return _reweighted(sigma, caratheodory_reduce(pts, sigma.weights, tol=tol))


@dataclass(frozen=True)
class ProjectionMap:
    """Linear coordinates that determine a strategy up to almost payoff equivalence.

    Two strategies of ``player`` with equal mass and equal projected moments
    give every other player the same payoff against every opponent profile.
    """

    player: int
    canonical: CanonicalForm
    w: np.ndarray

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    def project(self, g: SeparableGame, point) -> np.ndarray:
        v = self.canonical.basis_values(g, self.player, point)[1:]
        if self.dim == 0:
            return v[:0]
        return self.w.dot(v) if self.w.dtype == object else self.w @ v.astype(float)


def build_projection(g: SeparableGame, i: int, mode: str = EXACT, tol: float = DEFAULT_TOL,
                     include_self: bool = False) -> ProjectionMap:
    """Rows spanning the row space of ``T_i``, acting on canonical moments.

    With ``include_self`` the player's own payoff joins the stack and the
    coordinates determine the strategy up to payoff equivalence.
    """
    canon = canonicalize(g, i, mode, tol, include_self=include_self)
    return ProjectionMap(i, canon, row_space_basis(canon.t, mode, tol))


def _pure_equivalent(g: SeparableGame, i: int, sigma: MixedStrategy,
                     proj: ProjectionMap):
    """Pure strategy payoff equivalent to ``sigma`` when one coordinate suffices."""
    if proj.dim == 0:
        return sigma.support[0]
    coeffs = [0.0] + [float(x) for x in proj.w[0]]
    phi = UniPoly(tuple(coeffs))
    values = [phi(float(p)) for p in sigma.points]
    target = sum(float(w) * v for w, v in zip(sigma.weights, values))
    k_lo = int(np.argmin(values))
    k_hi = int(np.argmax(values))
    a, b = float(sigma.points[k_lo]), float(sigma.points[k_hi])
    fa = values[k_lo] - target
    if abs(fa) == 0.0:
        return sigma.points[k_lo]
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = phi(mid) - target
        if fm == 0.0 or abs(b - a) < 1e-15:
            break
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def reduce_equilibrium(g: SeparableGame, profile: MixedProfile, mode: str = EXACT,
                       tol: float = DEFAULT_TOL, pure: bool = False) -> MixedProfile:
    """Shrink each player's support to at most ``rho_i + 1`` atoms, players in order.

    Each player's new strategy is almost payoff equivalent to the old one
    and uses only old support points, so an equilibrium stays an
    equilibrium with unchanged payoffs.  With ``pure``, a monomial player
    whose strategies are determined up to payoff equivalence by one
    coordinate is replaced by a single payoff-equivalent pure strategy.
    """
    out = profile
    for i in range(g.n):
        sigma = out[i].pruned()
        if pure and isinstance(g.bases[i], Monomials) and isinstance(g.spaces[i], Interval):
            proj_x = build_projection(g, i, mode, tol, include_self=True)
            if proj_x.dim <= 1:
                point = _pure_equivalent(g, i, sigma, proj_x)
                out = out.replace(i, MixedStrategy.pure(point))
                continue
        proj = build_projection(g, i, mode, tol)
        pts = [list(proj.project(g, p)) for p in sigma.points]
        weights = caratheodory_reduce(pts, sigma.weights, tol=tol)
        out = out.replace(i, _reweighted(sigma, weights))
    return out
