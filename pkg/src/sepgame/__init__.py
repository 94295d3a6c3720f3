"""Separable games: rank, support reduction and epsilon-equilibria."""
from .game import (FiniteSet, GameError, Indicators, Interval, MixedProfile, MixedStrategy,
                   Monomials, SeparableGame, Tabulated, UnsupportedGameError, bimatrix_game,
                   finite_game, lipschitz_bound, monomial_game, payoff_mixed, payoff_pure)
from .io import load_game, load_profile, save_game, save_profile
from .rank import exact_rank, rank_bound, rank_report
from .reduction import reduce_equilibrium, reduce_moment_equivalent
from .equilibrium import (build_sampled, epsilon_solve, support_enumeration_solve,
                          verify_epsilon)

__version__ = "0.1.0"
