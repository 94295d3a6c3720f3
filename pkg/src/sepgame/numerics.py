"""Linear algebra, polynomial and LP-feasibility utilities.

Two arithmetic modes are used throughout the package:

* ``"exact"``: entries are :class:`fractions.Fraction` held in numpy object
  arrays, and every result is exact.
* ``"float"``: entries are float64 and zero tests use a tolerance relative
  to the largest absolute entry of the input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9

EXACT = "exact"
FLOAT = "float"


def to_fraction(x) -> Fraction:
    """Convert ints, decimal strings, Fractions and floats to a Fraction.

    Floats go through ``repr`` so that ``0.1`` becomes ``1/10`` rather than
    its binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(float(x)))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def as_matrix(m, mode: str = EXACT) -> np.ndarray:
    """Return a 2-D copy of ``m`` in the requested arithmetic mode."""
    if mode == EXACT:
        arr = np.asarray(m, dtype=object)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            out[idx] = to_fraction(v)
        return out
    if mode == FLOAT:
        arr = np.array(m, dtype=float)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        return arr
    raise ValueError(f"unknown arithmetic mode {mode!r}")


def is_exact_array(a: np.ndarray) -> bool:
    return a.dtype == object


def rref(m, mode: str = EXACT, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form by Gauss-Jordan elimination with partial pivoting.

    Returns ``(R, pivots)``.  In float mode an entry counts as zero when its
    magnitude is at most ``tol`` times the largest absolute entry of ``m``.
    """
    a = as_matrix(m, mode)
    rows, cols = a.shape
    if a.size == 0:
        return a, []
    exact = mode == EXACT
    if exact:
        zero_tol = 0
    else:
        scale = float(np.max(np.abs(a))) if a.size else 0.0
        zero_tol = tol * scale
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        column = [abs(a[k, c]) for k in range(r, rows)]
        best = max(range(len(column)), key=column.__getitem__)
        if column[best] <= zero_tol:
            if not exact:
                a[r:, c] = 0.0
            continue
        p = r + best
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] / a[r, c]
        for k in range(rows):
            if k != r and a[k, c] != 0:
                a[k] = a[k] - a[k, c] * a[r]
        if not exact:
            a[:, c] = 0.0
            a[r, c] = 1.0
        pivots.append(c)
        r += 1
    if not exact:
        a[np.abs(a) <= zero_tol] = 0.0
    return a, pivots


def matrix_rank(m, mode: str = EXACT, tol: float = DEFAULT_TOL) -> int:
    """Rank via Gaussian elimination; an empty matrix has rank 0."""
    _, pivots = rref(m, mode, tol)
    return len(pivots)


def row_space_basis(m, mode: str = EXACT, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Nonzero rows of the RREF of ``m``: a basis of its row space."""
    a = as_matrix(m, mode)
    r, pivots = rref(a, mode, tol)
    if a.size == 0:
        return as_matrix(np.zeros((0, a.shape[1] if a.ndim == 2 else 0)), mode)
    return r[: len(pivots)].copy()


def null_space(m, mode: str = EXACT, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Columns form a basis of the right null space of ``m``."""
    a = as_matrix(m, mode)
    cols = a.shape[1]
    r, pivots = rref(a, mode, tol)
    free = [c for c in range(cols) if c not in pivots]
    basis = as_matrix(np.zeros((cols, len(free))), mode)
    for k, f in enumerate(free):
        basis[f, k] = Fraction(1) if mode == EXACT else 1.0
        for row, p in enumerate(pivots):
            basis[p, k] = -r[row, f]
    return basis


def affine_dependence(points: Sequence[Sequence], mode: str = EXACT,
                      tol: float = DEFAULT_TOL) -> np.ndarray | None:
    """Nonzero ``lam`` with ``sum(lam) == 0`` and ``sum(lam_j p_j) == 0``.

    Returns ``None`` when the points are affinely independent (in particular
    for a single point).
    """
    k = len(points)
    if k == 0:
        raise ValueError("need at least one point")
    d = len(points[0])
    aug = [[1] * k] + [[points[j][c] for j in range(k)] for c in range(d)]
    ns = null_space(aug, mode, tol)
    if ns.shape[1] == 0:
        return None
    lam = ns[:, 0]
    if mode == FLOAT:
        lam = lam / np.max(np.abs(lam))
    return lam


# ---------------------------------------------------------------- polynomials


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial, coefficients in ascending degree."""

    coeffs: tuple

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        """Index of the leading coefficient; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = acc * xs + float(c)
        return acc

    def derivative(self) -> "UniPoly":
        return UniPoly(tuple(j * c for j, c in enumerate(self.coeffs) if j > 0))

    def as_float(self) -> "UniPoly":
        return UniPoly(tuple(float(c) for c in self.coeffs))


def _bisect_root(p: UniPoly, a: float, b: float, fa: float, width: float) -> float:
    while b - a > width:
        mid = 0.5 * (a + b)
        fm = p(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def real_roots_in(p: UniPoly, lo: float, hi: float, cells: int,
                  width: float = 1e-12) -> list[float]:
    """Roots of ``p`` in ``(lo, hi)`` detected by sign changes on a uniform partition."""
    if p.degree < 1:
        return []
    grid = np.linspace(lo, hi, cells + 1)
    vals = p.evaluate_many(grid)
    roots = []
    for k in range(cells):
        a, b = grid[k], grid[k + 1]
        fa, fb = vals[k], vals[k + 1]
        if fa == 0.0:
            if lo < a < hi:
                roots.append(float(a))
            continue
        if (fa > 0) != (fb > 0) and fb != 0.0:
            roots.append(_bisect_root(p, float(a), float(b), float(fa), width))
    return roots


def poly_max_on_interval(p: UniPoly, lo, hi) -> tuple[float, float]:
    """Global maximum of ``p`` on ``[lo, hi]`` as ``(argmax, max)``.

    Candidates are the endpoints, the partition nodes used for root
    isolation and the critical points found between them.  Ties go to the
    smallest argmax.
    """
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    q = p.as_float()
    if q.degree < 1:
        return lo, (q.coeffs[0] if q.coeffs else 0.0)
    cells = max(64, 8 * q.degree)
    candidates = list(np.linspace(lo, hi, cells + 1))
    candidates += real_roots_in(q.derivative(), lo, hi, cells)
    xs = np.array(sorted(set(float(x) for x in candidates)))
    vals = q.evaluate_many(xs)
    best = float(np.max(vals))
    slack = 1e-12 * max(1.0, abs(best))
    k = int(np.argmax(vals >= best - slack))
    return float(xs[k]), float(vals[k])


# ------------------------------------------------------------------------ LP


@dataclass(frozen=True)
class FeasibilityProgram:
    """``eq_lhs x = eq_rhs``, ``ineq_lhs x <= ineq_rhs``, ``x >= lower``.

    ``lower`` entries may be ``-inf`` for free variables; ``None`` means all
    variables are nonnegative.
    """

    eq_lhs: np.ndarray
    eq_rhs: np.ndarray
    ineq_lhs: np.ndarray
    ineq_rhs: np.ndarray
    lower: np.ndarray | None = None

    def __post_init__(self):
        n = self.n_vars
        for name in ("eq", "ineq"):
            lhs = getattr(self, f"{name}_lhs")
            rhs = getattr(self, f"{name}_rhs")
            if lhs.ndim != 2 or lhs.shape[1] != n:
                raise ValueError(f"{name}_lhs has shape {lhs.shape}, expected (*, {n})")
            if rhs.shape != (lhs.shape[0],):
                raise ValueError(f"{name}_rhs has shape {rhs.shape}, expected ({lhs.shape[0]},)")
        if self.lower is not None and self.lower.shape != (n,):
            raise ValueError(f"lower has shape {self.lower.shape}, expected ({n},)")

    @property
    def n_vars(self) -> int:
        return self.eq_lhs.shape[1]

    @classmethod
    def build(cls, n: int, eq=None, ineq=None, lower=None) -> "FeasibilityProgram":
        """Convenience constructor; ``eq``/``ineq`` are ``(lhs, rhs)`` pairs or None."""
        def block(pair):
            if pair is None:
                return np.zeros((0, n)), np.zeros(0)
            lhs, rhs = pair
            lhs = np.asarray(lhs, dtype=float).reshape(-1, n)
            return lhs, np.asarray(rhs, dtype=float).reshape(-1)
        a, b = block(eq)
        g, h = block(ineq)
        lb = None if lower is None else np.asarray(lower, dtype=float)
        return cls(a, b, g, h, lb)

    def violation(self, x: np.ndarray) -> float:
        """Largest constraint violation at ``x``."""
        v = 0.0
        if self.eq_lhs.shape[0]:
            v = max(v, float(np.max(np.abs(self.eq_lhs @ x - self.eq_rhs))))
        if self.ineq_lhs.shape[0]:
            v = max(v, float(np.max(self.ineq_lhs @ x - self.ineq_rhs)))
        lb = np.zeros(self.n_vars) if self.lower is None else self.lower
        finite = np.isfinite(lb)
        if np.any(finite):
            v = max(v, float(np.max(lb[finite] - x[finite])))
        return max(v, 0.0)


class SimplexError(RuntimeError):
    pass


def _phase_one(a: np.ndarray, b: np.ndarray, g: np.ndarray, h: np.ndarray,
               tol: float, max_iter: int = 100_000) -> np.ndarray | None:
    """Phase-one simplex with Bland's rule over ``y >= 0``."""
    p, n = a.shape
    q = g.shape[0]
    m = p + q
    if n == 0:
        ok = (p == 0 or np.all(np.abs(b) <= tol)) and (q == 0 or np.all(h >= -tol))
        return np.zeros(0) if ok else None

    # columns: y (n) | slacks (q) | artificials (as needed)
    needs_art = [True] * p + [bool(h[k] < 0) for k in range(q)]
    n_art = sum(needs_art)
    width = n + q + n_art
    t = np.zeros((m + 1, width + 1))
    basis = np.empty(m, dtype=int)
    art = n + q
    for r in range(p):
        sign = -1.0 if b[r] < 0 else 1.0
        t[r, :n] = sign * a[r]
        t[r, -1] = sign * b[r]
    for k in range(q):
        r = p + k
        sign = -1.0 if h[k] < 0 else 1.0
        t[r, :n] = sign * g[k]
        t[r, n + k] = sign
        t[r, -1] = sign * h[k]
        if not needs_art[r]:
            basis[r] = n + k
    for r in range(m):
        if needs_art[r]:
            t[r, art] = 1.0
            basis[r] = art
            art += 1
    # objective row: minimise the sum of artificials, written in reduced form
    for r in range(m):
        if needs_art[r]:
            t[m, : n + q] -= t[r, : n + q]
            t[m, -1] -= t[r, -1]

    piv_tol = 1e-11
    for _ in range(max_iter):
        costs = t[m, :-1]
        entering = np.flatnonzero(costs < -piv_tol)
        if entering.size == 0:
            break
        j = int(entering[0])
        col = t[:m, j]
        rows = np.flatnonzero(col > piv_tol)
        if rows.size == 0:
            # cannot happen in phase one: the objective is bounded below by 0
            raise SimplexError("phase-one objective unbounded")
        ratios = t[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-14 * max(1.0, abs(best))]
        r = int(ties[np.argmin(basis[ties])])
        t[r] /= t[r, j]
        others = np.abs(t[:, j]) > 0
        others[r] = False
        t[others] -= np.outer(t[others, j], t[r])
        basis[r] = j
    else:
        raise SimplexError("iteration limit reached")

    scale = max(1.0, float(np.max(np.abs(b))) if p else 0.0, float(np.max(np.abs(h))) if q else 0.0)
    if -t[m, -1] > tol * scale:
        return None
    y = np.zeros(width)
    y[basis] = t[:m, -1]
    return np.maximum(y[:n], 0.0)


def lp_feasible(prog: FeasibilityProgram, tol: float = DEFAULT_TOL) -> np.ndarray | None:
    """Return a point satisfying every constraint of ``prog``, or None if infeasible.

    Variables fixed by single-entry equality rows are eliminated first; the
    rest is decided by a phase-one simplex with Bland's anti-cycling rule.
    """
    n = prog.n_vars
    lower = np.zeros(n) if prog.lower is None else np.asarray(prog.lower, dtype=float)
    free = ~np.isfinite(lower)
    if np.any(lower[free] > 0):
        raise ValueError("lower bounds must be finite or -inf")
    shift = np.where(free, 0.0, lower)

    # x = shift + P y with y >= 0; free variables split as y+ - y-
    n_free = int(free.sum())
    cols = n + n_free
    proj = np.zeros((n, cols))
    proj[:, :n] = np.eye(n)
    for k, idx in enumerate(np.flatnonzero(free)):
        proj[idx, n + k] = -1.0
    a = prog.eq_lhs @ proj
    b = prog.eq_rhs - prog.eq_lhs @ shift
    g = prog.ineq_lhs @ proj
    h = prog.ineq_rhs - prog.ineq_lhs @ shift

    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 0.0,
                float(np.max(np.abs(h))) if h.size else 0.0)
    fixed = np.full(cols, np.nan)
    active = np.ones(cols, dtype=bool)
    live_rows = np.ones(a.shape[0], dtype=bool)
    changed = True
    while changed:
        changed = False
        for r in np.flatnonzero(live_rows):
            nz = np.flatnonzero((a[r] != 0) & active)
            if nz.size == 0:
                if abs(b[r]) > tol * scale:
                    return None
                live_rows[r] = False
            elif nz.size == 1:
                j = nz[0]
                val = b[r] / a[r, j]
                if val < -tol * scale:
                    return None
                val = max(val, 0.0)
                fixed[j] = val
                active[j] = False
                b = b - a[:, j] * val
                h = h - g[:, j] * val
                live_rows[r] = False
                changed = True
    y_active = _phase_one(a[live_rows][:, active], b[live_rows], g[:, active], h, tol)
    if y_active is None:
        return None
    y = np.where(active, 0.0, fixed)
    y[active] = y_active
    return shift + proj @ y
