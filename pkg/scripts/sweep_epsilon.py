"""Solve a two-player game over a range of epsilons and tabulate the cost.

    python3 scripts/sweep_epsilon.py [game.json] --eps 1 0.5 0.2 0.1
"""
import argparse
import time
from importlib import resources

from sepgame.equilibrium import epsilon_solve
from sepgame.io import load_game


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("game", nargs="?",
                    default=str(resources.files("sepgame") / "examples" / "example1.json"))
    ap.add_argument("--eps", nargs="+", default=["1", "0.5", "0.2", "0.1"])
    args = ap.parse_args()
    g = load_game(args.game)
    print(f"{'eps':>6} {'grid':>11} {'supports':>9} {'regret':>9} {'examined':>9} {'seconds':>8}")
    for eps in args.eps:
        t0 = time.perf_counter()
        res = epsilon_solve(g, eps)
        dt = time.perf_counter() - t0
        sizes = tuple(len(s.atoms) for s in res.profile.strategies)
        print(f"{eps:>6} {str(res.sampled.shape):>11} {str(sizes):>9} "
              f"{res.certificate.max_regret:9.4f} {res.search.examined:9d} {dt:8.2f}")


if __name__ == "__main__":
    main()
