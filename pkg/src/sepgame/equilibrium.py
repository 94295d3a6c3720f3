"""Approximate equilibria of two-player separable games.

Pipeline: bound the Lipschitz constants, sample each interval at the
centers of equal cells of width at most ``2 eps / L_i``, find a Nash
equilibrium of the finite sampled game whose supports respect the rank
bounds, and check the result against the continuum game with exact
polynomial best responses.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .game import (FiniteSet, GameError, Indicators, Interval, MixedProfile, MixedStrategy,
                   Monomials, SeparableGame, Tabulated, UnsupportedGameError,
                   lipschitz_bound, own_payoff_coefficients, payoff_mixed)
from .numerics import (DEFAULT_TOL, EXACT, FeasibilityProgram, UniPoly, lp_feasible,
                       poly_max_on_interval, to_fraction)
from .rank import UncertifiedBasisError, exact_rank, rank_bound


log = logging.getLogger(__name__)


class InconsistencyError(RuntimeError):
    """A result contradicts a guarantee that should hold by construction."""


class NotFoundError(RuntimeError):
    """No equilibrium of the sampled game exists within the support caps."""


# ------------------------------------------------------------------ sampling


def sample_grid(lo, hi, lipschitz, epsilon) -> list[Fraction]:
    """Centers of the fewest equal cells of ``[lo, hi]`` with width <= 2 eps / L."""
    lo, hi = to_fraction(lo), to_fraction(hi)
    lipschitz, epsilon = to_fraction(lipschitz), to_fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if lipschitz < 0:
        raise ValueError("Lipschitz constant must be nonnegative")
    n = max(1, math.ceil(lipschitz * (hi - lo) / (2 * epsilon)))
    return [lo + (hi - lo) * Fraction(2 * k - 1, 2 * n) for k in range(1, n + 1)]


@dataclass(frozen=True)
class SampledGame:
    grids: tuple          # pure strategies kept per player
    u1: np.ndarray        # u1[a, b] = u_1(grids[0][a], grids[1][b])
    u2: np.ndarray
    epsilon: Fraction | None = None
    lipschitz: tuple = (None, None)
    source: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return self.u1.shape


def _float_basis(g: SeparableGame, i: int, points: Sequence) -> np.ndarray:
    b = g.bases[i]
    return b.evaluate_float(points)


def build_sampled(g: SeparableGame, epsilon) -> SampledGame:
    if g.n != 2:
        raise UnsupportedGameError("the epsilon-equilibrium solver handles two-player games only")
    grids, lips = [], []
    for i in range(2):
        b, sp = g.bases[i], g.spaces[i]
        if isinstance(b, Monomials):
            lip = lipschitz_bound(g, i)
            grids.append(sample_grid(sp.lo, sp.hi, lip, epsilon))
            lips.append(lip)
        elif isinstance(b, Indicators):
            grids.append(list(sp.labels))
            lips.append(None)
        else:
            raise UnsupportedGameError(
                f"player {i}: sampling needs a monomial or indicator basis")
    f1 = _float_basis(g, 0, grids[0])
    f2 = _float_basis(g, 1, grids[1])
    u1, u2 = (f1.T @ a @ f2 for a in g.float_coeffs)
    return SampledGame(tuple(grids), u1, u2, to_fraction(epsilon), tuple(lips), g.name)


def sampled_from_tables(u1, u2) -> SampledGame:
    """Sampled game straight from two payoff tables (grid points are indices)."""
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if u1.shape != u2.shape or u1.ndim != 2:
        raise ValueError("payoff tables must be matrices of equal shape")
    grids = (list(range(u1.shape[0])), list(range(u1.shape[1])))
    return SampledGame(grids, u1, u2)


# ---------------------------------------------------------- support search


def nash_program(u1: np.ndarray, u2: np.ndarray, s1: Sequence[int],
                 s2: Sequence[int]) -> FeasibilityProgram:
    """Linear constraints whose solutions are equilibria with supports inside ``(s1, s2)``.

    Variables are ``x1`` (one per row) followed by ``x2`` (one per column).
    """
    n1, n2 = u1.shape
    n = n1 + n2
    eq_rows, eq_rhs = [], []
    for k in range(n1):
        if k not in s1:
            row = np.zeros(n)
            row[k] = 1.0
            eq_rows.append(row)
            eq_rhs.append(0.0)
    for k in range(n2):
        if k not in s2:
            row = np.zeros(n)
            row[n1 + k] = 1.0
            eq_rows.append(row)
            eq_rhs.append(0.0)
    for support, offset in ((s1, 0), (s2, n1)):
        row = np.zeros(n)
        row[[offset + k for k in support]] = 1.0
        eq_rows.append(row)
        eq_rhs.append(1.0)

    ineq = []
    # [x1 U2]_t - [x1 U2]_s <= 0 for s in S2: column s is a best reply for player 2
    for s in s2:
        for t in range(n2):
            if t != s:
                row = np.zeros(n)
                row[:n1] = u2[:, t] - u2[:, s]
                ineq.append(row)
    for s in s1:
        for t in range(n1):
            if t != s:
                row = np.zeros(n)
                row[n1:] = u1[t, :] - u1[s, :]
                ineq.append(row)
    ineq_lhs = np.array(ineq).reshape(-1, n)
    return FeasibilityProgram(np.array(eq_rows).reshape(-1, n), np.array(eq_rhs),
                              ineq_lhs, np.zeros(ineq_lhs.shape[0]))


def enumeration_bound(sizes: Sequence[int], caps: Sequence[int]) -> int:
    """Number of support pairs with ``1 <= |S_i| <= caps[i]``."""
    total = 1
    for n, c in zip(sizes, caps):
        total *= sum(math.comb(n, k) for k in range(1, min(c, n) + 1))
    return total


def _mixable(p: np.ndarray, required: Sequence[int], tol: float) -> bool:
    """Is there a mix of the rows of ``p`` making every column in ``required`` a best reply?

    ``p[r, t]`` is the responder's payoff for reply ``t`` when the mixer plays
    ``r``; "best" allows a slack of ``tol``.
    """
    k = p.shape[0]
    req = list(required)
    if k == 1:
        row = p[0]
        return bool(np.all(row[req] >= row.max() - tol))
    if k == 2:
        d0 = p[0, req][:, None] - p[0][None, :]
        d1 = p[1, req][:, None] - p[1][None, :]
        coef = d0 - d1
        rhs = -tol - d1
        if np.any((coef == 0) & (rhs > 0)):
            return False
        pos, neg = coef > 0, coef < 0
        lo = np.max(rhs[pos] / coef[pos], initial=0.0)
        hi = np.min(rhs[neg] / coef[neg], initial=1.0)
        return bool(lo <= hi)
    rows = []
    for r in req:
        rows.append((p - p[:, [r]]).T)
    g = np.vstack(rows)
    prog = FeasibilityProgram.build(k, eq=(np.ones((1, k)), [1.0]), ineq=(g, np.full(g.shape[0], tol)))
    return lp_feasible(prog) is not None


def _envelope_nodes(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Breakpoints in [0, 1] of ``max_t a_t + b_t lam``, endpoints included."""
    nodes = [0.0]
    lam = 0.0
    vals = a + b * lam
    top = np.flatnonzero(vals >= vals.max() - 1e-13 * max(1.0, abs(vals.max())))
    cur = int(top[np.argmax(b[top])])
    while True:
        faster = np.flatnonzero(b > b[cur])
        if faster.size == 0:
            break
        cross = (a[cur] - a[faster]) / (b[faster] - b[cur])
        nxt = max(float(cross.min()), lam)
        if nxt >= 1.0:
            break
        at = faster[cross <= nxt + 1e-13]
        cur = int(at[np.argmax(b[at])])
        if nxt > lam:
            nodes.append(nxt)
            lam = nxt
    nodes.append(1.0)
    return np.array(nodes)


def _line_intervals(a: np.ndarray, b: np.ndarray, tol: float):
    """For each line ``a_t + b_t lam``, the interval of ``lam`` in [0, 1] where it is
    within ``tol`` of the upper envelope; empty intervals have ``lo > hi``.
    """
    nodes = _envelope_nodes(a, b)
    env = np.max(a[:, None] + b[:, None] * nodes[None, :], axis=0)
    tol = tol + 1e-12 * max(1.0, float(np.abs(env).max()))   # absorb rounding at breakpoints
    mids = 0.5 * (nodes[1:] + nodes[:-1])
    true_mid = np.max(a[:, None] + b[:, None] * mids[None, :], axis=0)
    if np.any(np.abs(true_mid - 0.5 * (env[1:] + env[:-1])) > 1e-9 * max(1.0, np.abs(env).max())):
        return _line_intervals_dense(a, b, tol)
    gap = env[None, :] - (a[:, None] + b[:, None] * nodes[None, :])   # convex in lam, kinks at nodes
    ok = gap <= tol
    any_ok = ok.any(axis=1)
    n_nodes = nodes.size
    first = np.argmax(ok, axis=1)
    last = n_nodes - 1 - np.argmax(ok[:, ::-1], axis=1)
    rows = np.arange(a.size)

    def cross(k_out, k_in):
        # point between nodes where the gap falls to tol
        g_out, g_in = gap[rows, k_out], gap[rows, k_in]
        l_out, l_in = nodes[k_out], nodes[k_in]
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(g_out > g_in, (g_out - tol) / (g_out - g_in), 0.0)
        return l_out + frac * (l_in - l_out)

    lo = np.where(first > 0, cross(np.maximum(first - 1, 0), first), 0.0)
    hi = np.where(last < n_nodes - 1, cross(np.minimum(last + 1, n_nodes - 1), last), 1.0)
    lo = np.where(any_ok, lo, 1.0)
    hi = np.where(any_ok, hi, 0.0)
    lo = np.where(any_ok & (lo > hi), hi, lo)    # rounding guard
    return lo, hi


def _line_intervals_dense(a: np.ndarray, b: np.ndarray, tol: float):
    """Same as :func:`_line_intervals` by comparing every pair of lines."""
    da = a[:, None] - a[None, :]
    db = b[:, None] - b[None, :]
    # line t within tol of line s:  da + db * lam >= -tol
    rhs = -tol - da
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = rhs / db
    dead = np.any((db == 0) & (rhs > 0), axis=1)
    lo = np.max(np.where(db > 0, ratio, 0.0), axis=1, initial=0.0)
    hi = np.min(np.where(db < 0, ratio, 1.0), axis=1, initial=1.0)
    lo = np.where(dead, 1.0, lo)
    hi = np.where(dead, 0.0, hi)
    return lo, hi


class _Responses:
    """Families of jointly best-reply sets against mixes of a fixed pivot set."""

    def __init__(self, p: np.ndarray, tol: float):
        self.p = p
        self.tol = tol
        k, n = p.shape
        if k == 1:
            row = p[0]
            self.candidates = list(np.flatnonzero(row >= row.max() - tol))
        elif k == 2:
            lo, hi = _line_intervals(p[1], p[0] - p[1], tol)
            keep = np.flatnonzero(lo <= hi)
            self.candidates = [int(t) for t in keep]
            self.lo = dict(zip(self.candidates, lo[keep].tolist()))
            self.hi = dict(zip(self.candidates, hi[keep].tolist()))
        else:
            # drop replies beaten everywhere by another single reply, then test by LP
            alive = []
            for t in range(n):
                beaten = np.any(np.all(p > p[:, [t]] + tol, axis=0))
                if not beaten and _mixable(p, [t], tol):
                    alive.append(t)
            self.candidates = alive

    def sets(self, size: int) -> list[tuple[int, ...]]:
        k = self.p.shape[0]
        cands = self.candidates
        if size > len(cands):
            return []
        if size == 1:
            return [(int(t),) for t in cands]
        if k == 1:
            return [tuple(int(t) for t in c) for c in itertools.combinations(cands, size)]
        if k == 2:
            out = []
            key = {t: (self.lo[t], t) for t in cands}
            for r in cands:
                lo_r = self.lo[r]
                earlier = [t for t in cands if key[t] < key[r] and self.hi[t] >= lo_r]
                for combo in itertools.combinations(earlier, size - 1):
                    out.append(tuple(sorted(int(t) for t in combo + (r,))))
            return sorted(out)
        return [tuple(int(t) for t in c) for c in itertools.combinations(cands, size)
                if _mixable(self.p, c, self.tol)]


@dataclass
class SupportSearch:
    """Outcome of a support enumeration; ``x1 is None`` when nothing was found."""

    x1: np.ndarray | None
    x2: np.ndarray | None
    supports: tuple | None
    examined: int
    bound: int

    @property
    def found(self) -> bool:
        return self.x1 is not None


def _clean(x: np.ndarray) -> np.ndarray:
    x = np.where(x > 1e-12, x, 0.0)
    return x / x.sum()


def _support_pairs(n1: int, n2: int, caps: tuple[int, int]):
    """All support pairs in search order: total size, then |S1|, then lexicographic."""
    for total in range(2, caps[0] + caps[1] + 1):
        for k1 in range(max(1, total - caps[1]), min(caps[0], total - 1) + 1):
            k2 = total - k1
            for s1 in itertools.combinations(range(n1), k1):
                for s2 in itertools.combinations(range(n2), k2):
                    yield s1, s2


def support_enumeration_solve(sg: SampledGame, caps: Sequence[int], tol: float = DEFAULT_TOL,
                              literal: bool = False) -> SupportSearch:
    """First equilibrium of the sampled game in support order, supports within ``caps``.

    Pairs are ordered by ``|S1| + |S2|``, then ``|S1|``, then
    lexicographically by ``S1`` and ``S2``.  The constraint system for a pair
    splits into a condition on ``x1`` alone and one on ``x2`` alone; pairs
    failing either one are skipped without being generated, and each
    surviving pair is settled by the full LP.  ``literal=True`` instead runs
    the LP on every pair in order.
    """
    u1, u2 = sg.u1, sg.u2
    n1, n2 = u1.shape
    if u2.shape != (n1, n2):
        raise ValueError("payoff tables differ in shape")
    if len(caps) != 2 or min(caps) < 1:
        raise ValueError("caps must be two positive integers")
    caps = (min(int(caps[0]), n1), min(int(caps[1]), n2))
    bound = enumeration_bound((n1, n2), caps)

    def finish(x, s1, s2, examined):
        return SupportSearch(_clean(x[:n1]), _clean(x[n1:]), (s1, s2), examined, bound)

    examined = 0
    if literal:
        for s1, s2 in _support_pairs(n1, n2, caps):
            examined += 1
            x = lp_feasible(nash_program(u1, u2, s1, s2), tol)
            if x is not None:
                return finish(x, s1, s2, examined)
        return SupportSearch(None, None, None, examined, bound)

    scale = max(1.0, float(np.max(np.abs(u1))), float(np.max(np.abs(u2))))
    pre_tol = 1e-7 * scale   # looser than the LP so that no feasible pair is pruned
    cache: dict = {}

    def replies(side: int, pivot: tuple) -> _Responses:
        key = (side, pivot)
        if key not in cache:
            p = u2[list(pivot), :] if side == 1 else u1[:, list(pivot)].T
            cache[key] = _Responses(p, pre_tol)
        return cache[key]

    for total in range(2, caps[0] + caps[1] + 1):
        for k1 in range(max(1, total - caps[1]), min(caps[0], total - 1) + 1):
            k2 = total - k1
            found = []
            if math.comb(n1, k1) <= math.comb(n2, k2):
                for s1 in itertools.combinations(range(n1), k1):
                    for s2 in replies(1, s1).sets(k2):
                        examined += 1
                        if _mixable(u1[:, list(s2)].T, s1, pre_tol):
                            found.append((s1, s2))
            else:
                for s2 in itertools.combinations(range(n2), k2):
                    for s1 in replies(2, s2).sets(k1):
                        examined += 1
                        if _mixable(u2[list(s1), :], s2, pre_tol):
                            found.append((s1, s2))
            log.debug("sizes (%d, %d): %d candidate pairs, %d examined so far",
                      k1, k2, len(found), examined)
            # blocks are visited in search order, so the first feasible pair wins
            for s1, s2 in sorted(found):
                x = lp_feasible(nash_program(u1, u2, s1, s2), tol)
                if x is not None:
                    return finish(x, s1, s2, examined)
    return SupportSearch(None, None, None, examined, bound)


# ------------------------------------------------------- best responses


def best_response(g: SeparableGame, i: int, profile) -> tuple:
    """Best pure reply of player ``i`` and its value against the others in ``profile``.

    ``profile`` may be a MixedProfile (entry ``i`` is ignored) or, in a
    two-player game, the opponent's MixedStrategy.
    """
    if isinstance(profile, MixedStrategy):
        if g.n != 2:
            raise GameError("a single opponent strategy needs a two-player game")
        others = [profile, profile]
        others[i] = MixedStrategy.pure(_any_point(g, i))
        profile = MixedProfile(tuple(others))
    c = own_payoff_coefficients(g, i, profile)
    b, sp = g.bases[i], g.spaces[i]
    if isinstance(b, Monomials):
        return poly_max_on_interval(UniPoly(tuple(float(x) for x in c)), sp.lo, sp.hi)
    if isinstance(b, Indicators):
        vals = [float(x) for x in c]
        k = int(np.argmax(vals))
        return b.labels[k], vals[k]
    if isinstance(b, Tabulated):
        vals = b.values.astype(float) @ np.asarray(c, dtype=float)
        k = int(np.argmax(vals))
        return b.points[k], float(vals[k])
    raise UnsupportedGameError(f"player {i}: no best response for {type(b).__name__}")


def _any_point(g: SeparableGame, i: int):
    sp, b = g.spaces[i], g.bases[i]
    if isinstance(b, Tabulated):
        return b.points[0]
    return sp.labels[0] if isinstance(sp, FiniteSet) else sp.lo


@dataclass(frozen=True)
class PlayerRegret:
    payoff: float
    best_value: float
    best_point: object
    regret: float


@dataclass(frozen=True)
class EpsilonCertificate:
    players: tuple
    epsilon: float
    method: str
    passed: bool
    provenance: dict = field(default_factory=dict)

    @property
    def max_regret(self) -> float:
        return max(p.regret for p in self.players)

    def to_dict(self) -> dict:
        from .io import FORMAT_VERSION, fmt_number
        return {
            "format_version": FORMAT_VERSION,
            "epsilon": self.epsilon,
            "method": self.method,
            "passed": self.passed,
            "max_regret": self.max_regret,
            "players": [
                {"payoff": p.payoff, "best_value": p.best_value, "regret": p.regret,
                 "best_point": p.best_point if isinstance(p.best_point, str)
                 else fmt_number(p.best_point)}
                for p in self.players
            ],
            "provenance": self.provenance,
        }


def verify_epsilon(g: SeparableGame, profile: MixedProfile, epsilon,
                   tol: float = DEFAULT_TOL) -> EpsilonCertificate:
    """Check ``u_i(s_i, sigma_{-i}) <= u_i(sigma) + eps`` for every player and pure ``s_i``."""
    payoffs = [float(u) for u in payoff_mixed(g, profile)]
    players = []
    for i in range(g.n):
        point, value = best_response(g, i, profile)
        players.append(PlayerRegret(payoffs[i], float(value), point, float(value) - payoffs[i]))
    method = "grid" if any(isinstance(b, Tabulated) for b in g.bases) else "exact-poly"
    eps = float(epsilon)
    passed = max(p.regret for p in players) <= eps + tol
    return EpsilonCertificate(tuple(players), eps, method, passed)


# ------------------------------------------------------------- the solver


@dataclass(frozen=True)
class SolveResult:
    profile: MixedProfile
    certificate: EpsilonCertificate
    ranks: tuple
    caps: tuple
    sampled: SampledGame
    search: SupportSearch


def solver_ranks(g: SeparableGame, use_rank_bound: bool = False, mode: str = EXACT,
                 tol: float = DEFAULT_TOL) -> tuple[tuple[int, ...], str]:
    """Ranks used for the support caps and which formula produced them."""
    if not use_rank_bound:
        try:
            return tuple(exact_rank(g, i, mode, tol) for i in range(g.n)), "exact"
        except UncertifiedBasisError:
            pass
    return tuple(rank_bound(g, i, mode, tol) for i in range(g.n)), "bound"


def epsilon_solve(g: SeparableGame, epsilon, caps: Sequence[int] | None = None,
                  use_rank_bound: bool = False, mode: str = EXACT,
                  tol: float = DEFAULT_TOL) -> SolveResult:
    """An epsilon-equilibrium with at most ``rho_i + 1`` atoms per player."""
    if g.n != 2:
        raise UnsupportedGameError(
            f"the epsilon-equilibrium solver handles two-player games only, got {g.n} players")
    epsilon = to_fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    ranks, rank_kind = solver_ranks(g, use_rank_bound, mode, tol)
    user_caps = caps is not None
    caps = tuple(caps) if user_caps else tuple(r + 1 for r in ranks)
    sg = build_sampled(g, epsilon)
    search = support_enumeration_solve(sg, caps, tol)
    if not search.found:
        msg = f"no equilibrium of the sampled game with supports within caps {caps}"
        if user_caps:
            raise NotFoundError(msg)
        raise InconsistencyError(msg + " (the rank bound guarantees one)")
    strategies = []
    for grid, x in zip(sg.grids, (search.x1, search.x2)):
        strategies.append(MixedStrategy(tuple((grid[k], float(x[k]))
                                              for k in np.flatnonzero(x > 0))))
    profile = MixedProfile(tuple(strategies))
    cert = verify_epsilon(g, profile, epsilon, tol)
    provenance = {
        "epsilon": str(epsilon) if epsilon.denominator == 1 else float(epsilon),
        "lipschitz": [None if l is None else float(l) for l in sg.lipschitz],
        "grid_sizes": list(sg.shape),
        "ranks": list(ranks),
        "rank_kind": rank_kind,
        "caps": list(caps),
        "supports": [list(s) for s in search.supports],
        "pairs_examined": search.examined,
        "pairs_bound": search.bound,
    }
    cert = EpsilonCertificate(cert.players, cert.epsilon, cert.method, cert.passed, provenance)
    if not cert.passed:
        raise InconsistencyError(
            f"sampled equilibrium fails verification: max regret {cert.max_regret} > {float(epsilon)}")
    return SolveResult(profile, cert, ranks, caps, sg, search)
