from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import moments
from sepgame.game import (MixedProfile, MixedStrategy, monomial_game, moment_map,
                          payoff_mixed, payoff_pure)
from sepgame.generate import random_polynomial_game
from sepgame.reduction import (build_projection, caratheodory_reduce, reduce_equilibrium,
                               reduce_moment_equivalent)


def _point(pts, w):
    d = len(pts[0])
    return [sum(F(x) * p[c] for x, p in zip(w, pts)) for c in range(d)]


def test_mean_only_reduction():
    pts = [[-1], [0], [1]]
    w = caratheodory_reduce(pts, [F(1, 3)] * 3)
    assert sum(x > 0 for x in w) <= 2
    assert sum(w) == 1
    assert _point(pts, w) == [0]


def test_small_support_unchanged():
    w = [F(1, 4), F(3, 4)]
    assert caratheodory_reduce([[F(1)], [F(2)]], w) == w


def test_moment_curve_reduction():
    xs = [F(k, 7) for k in range(-3, 3)]
    pts = [[x, x**2, x**3] for x in xs]
    w0 = [F(k, 21) for k in range(1, 7)]
    w = caratheodory_reduce(pts, w0)
    assert sum(x > 0 for x in w) <= 4
    assert _point(pts, w) == _point(pts, w0) and sum(w) == 1


def test_negative_weight_rejected():
    with pytest.raises(ValueError):
        caratheodory_reduce([[0], [1]], [F(2), F(-1)])


def test_float_mode_reduction():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(12, 3))
    w0 = rng.random(12)
    w0 /= w0.sum()
    w = np.array(caratheodory_reduce(pts.tolist(), w0.tolist()))
    assert np.count_nonzero(w) <= 4
    assert np.allclose(w @ pts, w0 @ pts, atol=1e-12)
    assert abs(w.sum() - 1) <= 1e-12


def test_monomial_strategy_reduction(example1):
    sigma = MixedStrategy(tuple((F(k, 10) - F(1, 2), F(1, 10)) for k in range(10)))
    tau = reduce_moment_equivalent(example1, 0, sigma)
    assert len(tau.atoms) <= 5
    assert list(moment_map(example1, 0, tau)) == list(moment_map(example1, 0, sigma))
    two = MixedStrategy(((F(0), F(1, 2)), (F(1), F(1, 2))))
    assert reduce_moment_equivalent(example1, 0, two) == two


def test_indicator_strategy_only_pruned(pennies):
    sigma = MixedStrategy((("H", F(0)), ("T", F(1))))
    assert reduce_moment_equivalent(pennies, 0, sigma) == MixedStrategy((("T", F(1)),))


def test_projection_example1(example1):
    proj = build_projection(example1, 0)
    assert proj.dim == 1
    # coordinates act on (x, x^2, x^3): only the second moment matters to player 2
    w = proj.w[0]
    assert w[0] == 0 and w[2] == 0 and w[1] != 0


def test_projection_threeplayer(threeplayer):
    assert build_projection(threeplayer, 1).dim == 2


def test_projection_rank_zero():
    a = np.zeros((2, 2), dtype=object)
    a[1, 0] = 1
    b = np.zeros((2, 2), dtype=object)
    b[0, 1] = 1
    g = monomial_game([a, b], [(-1, 1)] * 2)
    assert build_projection(g, 0).dim == 0
    sigma = MixedStrategy(((F(-1), F(1, 3)), (F(0), F(1, 3)), (F(1), F(1, 3))))
    red = reduce_equilibrium(g, MixedProfile((sigma, sigma)))
    assert [len(s.atoms) for s in red.strategies] == [1, 1]


def test_reference_equilibrium_is_fixed(example1, example1_profile):
    assert reduce_equilibrium(example1, example1_profile) == example1_profile


def test_padded_profile(example1):
    a = F(1, 2)
    # symmetric padding keeps the second moment of +-a
    sigma = MixedStrategy(((-a, F(1, 4)), (a, F(1, 4)), (F(-3, 10), F(1, 8)), (F(3, 10), F(1, 8)),
                           (F(-2, 3), F(1, 8)), (F(2, 3), F(1, 8))))
    second = moments(sigma.points, sigma.weights, 3)[2]
    opp = MixedStrategy(((F(-1), F(1, 5)), (F(0), F(1, 5)), (F(1, 5), F(1, 5)),
                         (F(1, 2), F(1, 5)), (F(1), F(1, 5))))
    red = reduce_equilibrium(example1, MixedProfile((sigma, opp)))
    assert len(red[0].atoms) <= 2 and len(red[1].atoms) <= 4
    assert moments(red[0].points, red[0].weights, 3)[2] == second
    assert set(red[0].points) <= set(sigma.points)


def test_pure_refinement_in_bilinear_game():
    xy = np.zeros((2, 2), dtype=object)
    xy[1, 1] = 1
    g = monomial_game([xy, -xy], [(-1, 1)] * 2)
    sigma = MixedStrategy(((F(-1), F(1, 4)), (F(1, 2), F(1, 2)), (F(1), F(1, 4))))
    red = reduce_equilibrium(g, MixedProfile((sigma, sigma)), pure=True)
    assert len(red[0].atoms) == 1 and len(red[1].atoms) == 1
    assert red[0].points[0] == pytest.approx(0.25, abs=1e-12)   # the mean
    for y in (F(-1), F(0), F(3, 5)):
        before = payoff_mixed(g, MixedProfile((sigma, MixedStrategy.pure(y))))
        after = payoff_mixed(g, MixedProfile((red[0], MixedStrategy.pure(y))))
        assert np.allclose([float(u) for u in before], [float(u) for u in after], atol=1e-12)


# --------------------------------------------------------------- properties


def _strategy(draw, n_atoms):
    pts = draw(st.lists(st.builds(F, st.integers(-30, 30), st.just(30)),
                        min_size=n_atoms, max_size=n_atoms, unique=True))
    raw = draw(st.lists(st.integers(1, 9), min_size=n_atoms, max_size=n_atoms))
    return MixedStrategy(tuple((p, F(w, sum(raw))) for p, w in zip(pts, raw)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_reduction_is_almost_payoff_equivalent(seed, data):
    rng = np.random.default_rng(seed)
    g = random_polynomial_game(rng, n=data.draw(st.integers(2, 3)))
    prof = MixedProfile(tuple(_strategy(data.draw, data.draw(st.integers(1, 8)))
                              for _ in range(g.n)))
    red = reduce_equilibrium(g, prof)
    for i in range(g.n):
        assert set(red[i].points) <= set(prof[i].points)
        assert len(red[i].atoms) <= build_projection(g, i).dim + 1
        for _ in range(100 // g.n):
            s = [F(int(rng.integers(-20, 21)), 20) for _ in range(g.n)]
            others = [MixedStrategy.pure(x) for x in s]
            before = payoff_mixed(g, MixedProfile(tuple(others[:i] + [prof[i]] + others[i + 1:])))
            after = payoff_mixed(g, MixedProfile(tuple(others[:i] + [red[i]] + others[i + 1:])))
            for j in range(g.n):
                if j != i:
                    assert before[j] == after[j]    # exact in rational mode
