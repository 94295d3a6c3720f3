"""Random games for experiments and property tests."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .game import SeparableGame, bimatrix_game, monomial_game


def random_polynomial_game(rng: np.random.Generator, n: int = 2, max_degree: int = 3,
                           coeff_range: int = 5, density: float = 0.6,
                           interval=(-1, 1)) -> SeparableGame:
    """Polynomial game with small integer coefficients on a common interval.

    Each coefficient is nonzero with probability ``density``; degrees per
    player are drawn independently in ``1..max_degree``.
    """
    shape = tuple(int(rng.integers(1, max_degree + 1)) + 1 for _ in range(n))
    coeffs = []
    for _ in range(n):
        vals = rng.integers(-coeff_range, coeff_range + 1, size=shape)
        mask = rng.random(shape) < density
        a = np.empty(shape, dtype=object)
        for idx in np.ndindex(shape):
            a[idx] = Fraction(int(vals[idx] * mask[idx]))
        coeffs.append(a)
    return monomial_game(coeffs, [interval] * n, name="random")


def random_bimatrix(rng: np.random.Generator, rows: int, cols: int,
                    value_range: int = 9) -> SeparableGame:
    r = rng.integers(-value_range, value_range + 1, size=(rows, cols))
    c = rng.integers(-value_range, value_range + 1, size=(rows, cols))
    to_frac = np.vectorize(lambda v: Fraction(int(v)), otypes=[object])
    return bimatrix_game(to_frac(r), to_frac(c), name="random")
