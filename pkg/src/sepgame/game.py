"""Separable games: strategy spaces, basis families, payoffs and moments.

A separable game gives player ``i`` the payoff

    u_i(s) = sum_{j_1..j_n} a_i[j_1, ..., j_n] f_1^{j_1}(s_1) ... f_n^{j_n}(s_n)

with 0-based indices.  Mixed strategies are finitely supported, so every
payoff is the coefficient tensor contracted with per-player moment vectors.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .numerics import DEFAULT_TOL, to_fraction


class GameError(ValueError):
    """Invalid game, strategy or profile."""


class UnsupportedGameError(Exception):
    """The operation does not support this game or basis kind."""


# ------------------------------------------------------------ strategy spaces


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", to_fraction(self.lo))
        object.__setattr__(self, "hi", to_fraction(self.hi))
        if not self.lo < self.hi:
            raise GameError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    def contains(self, point, tol: float = 0.0) -> bool:
        if isinstance(point, str):
            return False
        return self.lo - tol <= point <= self.hi + tol

    @property
    def radius(self) -> Fraction:
        """Largest absolute value attained on the interval."""
        return max(abs(self.lo), abs(self.hi))


@dataclass(frozen=True)
class FiniteSet:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise GameError("finite strategy set needs at least one label")
        if len(set(labels)) != len(labels):
            raise GameError(f"duplicate labels in {labels}")
        object.__setattr__(self, "labels", labels)

    def contains(self, point, tol: float = 0.0) -> bool:
        return point in self.labels


StrategySpace = Union[Interval, FiniteSet]


# ------------------------------------------------------------ basis families


@dataclass(frozen=True)
class Monomials:
    """f^j(s) = s**j for j = 0..count-1."""

    count: int

    def __post_init__(self):
        if self.count < 1:
            raise GameError("monomial basis needs count >= 1")

    @property
    def size(self) -> int:
        return self.count

    def evaluate(self, point) -> np.ndarray:
        out = np.empty(self.count, dtype=object)
        acc = type(point)(1) if isinstance(point, (Fraction, float)) else 1
        for j in range(self.count):
            out[j] = acc
            acc = acc * point
        return out

    def evaluate_float(self, points: Sequence) -> np.ndarray:
        """``(count, len(points))`` float matrix of basis values."""
        xs = np.asarray([float(p) for p in points])
        return np.vander(xs, self.count, increasing=True).T


@dataclass(frozen=True)
class Indicators:
    """f^j(s) = 1 iff s is the j-th label."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, point) -> int:
        try:
            return self.labels.index(point)
        except ValueError:
            raise GameError(f"unknown label {point!r}") from None

    def evaluate(self, point) -> np.ndarray:
        out = np.full(self.size, Fraction(0), dtype=object)
        out[self.index(point)] = Fraction(1)
        return out

    def evaluate_float(self, points: Sequence) -> np.ndarray:
        out = np.zeros((self.size, len(points)))
        for k, p in enumerate(points):
            out[self.index(p), k] = 1.0
        return out


@dataclass(frozen=True)
class Tabulated:
    """Basis functions known only through their values at sample points.

    ``values[k, j]`` is ``f^j(points[k])``.
    """

    points: tuple
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        pts = tuple(to_fraction(p) for p in self.points)
        vals = np.asarray(self.values, dtype=object)
        if vals.ndim != 2 or vals.shape[0] != len(pts):
            raise GameError("tabulated values must be a (samples x functions) table")
        if vals.shape[1] < 1:
            raise GameError("tabulated basis needs at least one function")
        if vals.shape[0] < vals.shape[1]:
            raise GameError(f"tabulated basis needs >= {vals.shape[1]} sample points")
        if len(set(pts)) != len(pts):
            raise GameError("tabulated sample points must be distinct")
        conv = np.empty(vals.shape, dtype=object)
        for idx, v in np.ndenumerate(vals):
            conv[idx] = to_fraction(v)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", conv)

    @property
    def size(self) -> int:
        return self.values.shape[1]

    def index(self, point, tol: float = DEFAULT_TOL) -> int:
        for k, p in enumerate(self.points):
            if p == point or (isinstance(point, float) and abs(float(p) - point) <= tol):
                return k
        raise GameError(f"point {point!r} is not a tabulated sample point")

    def evaluate(self, point) -> np.ndarray:
        return self.values[self.index(point)].copy()

    def evaluate_float(self, points: Sequence) -> np.ndarray:
        rows = [self.index(p) for p in points]
        return self.values[rows].astype(float).T


BasisFamily = Union[Monomials, Indicators, Tabulated]


def basis_bound(basis: BasisFamily, space: StrategySpace) -> list:
    """Upper bound on ``|f^j|`` over the strategy space, per basis function."""
    if isinstance(basis, Monomials):
        r = space.radius
        return [r ** j for j in range(basis.count)]
    if isinstance(basis, Indicators):
        return [Fraction(1)] * basis.size
    return [max(abs(v) for v in basis.values[:, j]) for j in range(basis.size)]


# ------------------------------------------------------------------- the game


@dataclass(frozen=True)
class SeparableGame:
    """An n-player separable game with dense coefficient tensors.

    ``coeffs[i]`` has shape ``(m_1, ..., m_n)`` and holds Fractions.
    """

    spaces: tuple
    bases: tuple
    coeffs: tuple = field(compare=False)
    name: str = ""

    def __post_init__(self):
        spaces, bases = tuple(self.spaces), tuple(self.bases)
        n = len(spaces)
        if n < 1 or len(bases) != n or len(self.coeffs) != n:
            raise GameError("spaces, bases and payoffs must have one entry per player")
        for i, (sp, b) in enumerate(zip(spaces, bases)):
            if isinstance(b, Monomials) and not isinstance(sp, Interval):
                raise GameError(f"player {i}: monomial basis needs an interval space")
            if isinstance(b, Indicators):
                if not isinstance(sp, FiniteSet):
                    raise GameError(f"player {i}: indicator basis needs a finite space")
                if b.labels != sp.labels:
                    raise GameError(f"player {i}: indicator labels must match the space")
            if isinstance(b, Tabulated):
                if not isinstance(sp, Interval):
                    raise GameError(f"player {i}: tabulated basis needs an interval space")
                if not all(sp.contains(p) for p in b.points):
                    raise GameError(f"player {i}: tabulated sample outside the interval")
        shape = tuple(b.size for b in bases)
        coeffs = []
        for i, a in enumerate(self.coeffs):
            arr = np.asarray(a, dtype=object)
            if arr.shape != shape:
                raise GameError(f"player {i}: coefficient tensor shape {arr.shape} != {shape}")
            conv = np.empty(shape, dtype=object)
            for idx, v in np.ndenumerate(arr):
                conv[idx] = to_fraction(v)
            coeffs.append(conv)
        object.__setattr__(self, "spaces", spaces)
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def n(self) -> int:
        return len(self.spaces)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(b.size for b in self.bases)

    @cached_property
    def float_coeffs(self) -> tuple[np.ndarray, ...]:
        return tuple(a.astype(float) for a in self.coeffs)

    def check_point(self, i: int, point):
        if not self.spaces[i].contains(point):
            raise GameError(f"player {i}: point {point!r} outside strategy space")
        if isinstance(self.bases[i], Tabulated):
            self.bases[i].index(point)

    def basis_values(self, i: int, point) -> np.ndarray:
        self.check_point(i, point)
        return self.bases[i].evaluate(point)


def monomial_game(coeffs: Sequence, intervals: Sequence, name: str = "") -> SeparableGame:
    """Polynomial game on intervals; ``coeffs[i][j_1, ..., j_n]`` multiplies prod s_k**j_k."""
    arrs = [np.asarray(a, dtype=object) for a in coeffs]
    shape = arrs[0].shape
    spaces = tuple(Interval(lo, hi) for lo, hi in intervals)
    bases = tuple(Monomials(m) for m in shape)
    return SeparableGame(spaces, bases, tuple(arrs), name)


def finite_game(tables: Sequence, labels: Sequence[Sequence[str]] | None = None,
                name: str = "") -> SeparableGame:
    """Finite game from payoff tables ``tables[i][s_1, ..., s_n]``."""
    arrs = [np.asarray(t, dtype=object) for t in tables]
    shape = arrs[0].shape
    if labels is None:
        labels = [[str(k) for k in range(m)] for m in shape]
    spaces = tuple(FiniteSet(tuple(ls)) for ls in labels)
    bases = tuple(Indicators(tuple(ls)) for ls in labels)
    return SeparableGame(spaces, bases, tuple(arrs), name)


def bimatrix_game(row_payoffs, col_payoffs, name: str = "") -> SeparableGame:
    return finite_game([row_payoffs, col_payoffs], name=name)


# --------------------------------------------------------------- strategies


@dataclass(frozen=True)
class MixedStrategy:
    """A finitely supported probability measure: ``((point, weight), ...)``."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((p, w) for p, w in self.atoms)
        if not atoms:
            raise GameError("mixed strategy needs at least one atom")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def pure(cls, point) -> "MixedStrategy":
        return cls(((point, Fraction(1)),))

    @property
    def points(self) -> list:
        return [p for p, _ in self.atoms]

    @property
    def weights(self) -> list:
        return [w for _, w in self.atoms]

    @property
    def support(self) -> list:
        return [p for p, w in self.atoms if w > 0]

    def pruned(self) -> "MixedStrategy":
        """Drop zero-weight atoms."""
        return MixedStrategy(tuple((p, w) for p, w in self.atoms if w > 0))

    def validate(self, tol: float = DEFAULT_TOL):
        ws = self.weights
        if any(w < 0 for w in ws):
            raise GameError("negative weight in mixed strategy")
        total = sum(ws)
        if abs(total - 1) > tol:
            raise GameError(f"weights sum to {float(total)!r}, not 1")
        pts = self.points
        if len(set(pts)) != len(pts):
            raise GameError("atoms of a mixed strategy must have distinct points")


@dataclass(frozen=True)
class MixedProfile:
    strategies: tuple

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(self.strategies))

    def __len__(self):
        return len(self.strategies)

    def __getitem__(self, i) -> MixedStrategy:
        return self.strategies[i]

    def replace(self, i: int, sigma: MixedStrategy) -> "MixedProfile":
        s = list(self.strategies)
        s[i] = sigma
        return MixedProfile(tuple(s))

    @classmethod
    def pure(cls, points: Sequence) -> "MixedProfile":
        return cls(tuple(MixedStrategy.pure(p) for p in points))


def validate_profile(g: SeparableGame, profile: MixedProfile, tol: float = DEFAULT_TOL):
    if len(profile) != g.n:
        raise GameError(f"profile has {len(profile)} strategies, game has {g.n} players")
    for i, sigma in enumerate(profile.strategies):
        try:
            sigma.validate(tol)
            for p in sigma.points:
                g.check_point(i, p)
        except GameError as exc:
            raise GameError(f"player {i}: {exc}") from None


# ---------------------------------------------------------------- payoffs


def _exact(values) -> bool:
    return all(isinstance(v, (Fraction, int, str)) for v in values)


def _contract(a: np.ndarray, vectors: Sequence[np.ndarray]) -> object:
    """Contract every axis of ``a`` with the matching vector."""
    out = a
    for v in reversed(vectors):
        out = np.tensordot(out, v, axes=([out.ndim - 1], [0]))
    return out[()] if isinstance(out, np.ndarray) else out


def _coeffs_for(g: SeparableGame, exact: bool) -> tuple:
    return g.coeffs if exact else g.float_coeffs


def payoff_pure(g: SeparableGame, s: Sequence) -> list:
    """Payoff of every player at the pure profile ``s``."""
    if len(s) != g.n:
        raise GameError(f"profile has {len(s)} points, game has {g.n} players")
    exact = _exact(s)
    vecs = [g.basis_values(i, p) for i, p in enumerate(s)]
    if not exact:
        vecs = [v.astype(float) for v in vecs]
    return [_contract(a, vecs) for a in _coeffs_for(g, exact)]


def moment_map(g: SeparableGame, i: int, sigma: MixedStrategy) -> np.ndarray:
    """Vector of generalized moments ``sum_k w_k f_i(p_k)``."""
    exact = _exact(sigma.points) and _exact(sigma.weights)
    total = None
    for p, w in sigma.atoms:
        v = g.basis_values(i, p)
        term = v * w if exact else v.astype(float) * float(w)
        total = term if total is None else total + term
    return total


def payoff_mixed(g: SeparableGame, profile: MixedProfile) -> list:
    """Expected payoffs, via moments rather than atom enumeration."""
    if len(profile) != g.n:
        raise GameError(f"profile has {len(profile)} strategies, game has {g.n} players")
    moments = [moment_map(g, i, sigma) for i, sigma in enumerate(profile.strategies)]
    exact = all(m.dtype == object and _exact(list(m)) for m in moments)
    if not exact:
        moments = [m.astype(float) for m in moments]
    return [_contract(a, moments) for a in _coeffs_for(g, exact)]


def payoff_by_atoms(g: SeparableGame, profile: MixedProfile) -> list:
    """Expected payoffs by enumerating every combination of atoms (reference path)."""
    totals = [0] * g.n
    for combo in itertools.product(*(s.atoms for s in profile.strategies)):
        weight = 1
        for _, w in combo:
            weight = weight * w
        pay = payoff_pure(g, [p for p, _ in combo])
        totals = [t + weight * u for t, u in zip(totals, pay)]
    return totals


def own_payoff_coefficients(g: SeparableGame, i: int, profile: MixedProfile,
                            exact: bool | None = None) -> np.ndarray:
    """Coefficients ``c`` with ``u_i(s_i, sigma_{-i}) = sum_j c_j f_i^j(s_i)``."""
    moments = []
    for k, sigma in enumerate(profile.strategies):
        if k == i:
            continue
        moments.append(moment_map(g, k, sigma))
    if exact is None:
        exact = all(m.dtype == object and _exact(list(m)) for m in moments)
    a = g.coeffs[i] if exact else g.float_coeffs[i]
    if not exact:
        moments = [m.astype(float) for m in moments]
    out = np.moveaxis(a, i, 0)
    for v in reversed(moments):
        out = np.tensordot(out, v, axes=([out.ndim - 1], [0]))
    return out


def lipschitz_bound(g: SeparableGame, i: int) -> Fraction:
    """Bound on ``|du_i/ds_i|`` over the whole strategy space.

    Sums ``|a| * j_i * B**(j_i - 1) * prod_{k != i} bound(f_k^{j_k})`` over all
    coefficients, where ``B`` is the largest absolute value in player i's
    interval.
    """
    if not isinstance(g.bases[i], Monomials):
        raise UnsupportedGameError(
            f"player {i}: Lipschitz bound needs a monomial basis on an interval")
    B = g.spaces[i].radius
    bounds = [basis_bound(b, sp) for b, sp in zip(g.bases, g.spaces)]
    total = Fraction(0)
    for idx, a in np.ndenumerate(g.coeffs[i]):
        j = idx[i]
        if a == 0 or j == 0:
            continue
        term = abs(a) * j * B ** (j - 1)
        for k, jk in enumerate(idx):
            if k != i:
                term *= bounds[k][jk]
        total += term
    return total


def restrict(g: SeparableGame, samples: Sequence[Sequence], name: str = "") -> SeparableGame:
    """Sampled version of ``g``: the finite game on the given points per player.

    Labels of the result are the string forms of the sample points.
    """
    if len(samples) != g.n:
        raise GameError("need one sample list per player")
    mats = []
    for i, pts in enumerate(samples):
        if not pts:
            raise GameError(f"player {i}: empty sample set")
        mats.append(np.array([list(g.basis_values(i, p)) for p in pts], dtype=object))
    tables = []
    for a in g.coeffs:
        out = a
        for k in range(g.n):
            # contract axis k with the (samples x m_k) matrix, keeping order
            out = np.moveaxis(np.tensordot(out, mats[k], axes=([k], [1])), -1, k)
        tables.append(out)
    labels = [[str(p) for p in pts] for pts in samples]
    return finite_game(tables, labels, name or g.name)
