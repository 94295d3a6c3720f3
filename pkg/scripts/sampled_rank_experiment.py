"""Rank of random finite samplings versus the rank of the polynomial game.

Restricting a game to finitely many strategies cannot raise its rank; this
prints how often the sampled rank reaches the continuous one as the number
of samples per player grows.
"""
import argparse
from collections import Counter
from fractions import Fraction

import numpy as np

from sepgame.game import restrict
from sepgame.generate import random_polynomial_game
from sepgame.rank import exact_rank


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--games", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    games = [random_polynomial_game(rng) for _ in range(args.games)]
    for k in (1, 2, 3, 4, 6, 8):
        tally = Counter()
        for g in games:
            samples = [[Fraction(int(p), 50) for p in sorted(rng.choice(np.arange(-50, 51), k, replace=False))]
                       for _ in range(g.n)]
            fin = restrict(g, samples)
            for i in range(g.n):
                r, rf = exact_rank(g, i), exact_rank(fin, i)
                assert rf <= r
                tally["equal" if rf == r else "below"] += 1
        print(f"{k} samples/player: sampled rank equal {tally['equal']:4d}, below {tally['below']:4d}")


if __name__ == "__main__":
    main()
