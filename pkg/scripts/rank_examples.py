"""Print the rank report of every shipped example game."""
from importlib import resources

from sepgame.io import load_game
from sepgame.rank import rank_report


def main():
    root = resources.files("sepgame") / "examples"
    for path in sorted(root.iterdir(), key=lambda p: p.name):
        if not path.name.endswith(".json") or path.name.endswith(".profile.json"):
            continue
        g = load_game(path)
        rep = rank_report(g)
        print(f"{path.name:24s} sizes={g.sizes} rank_bounds={rep.rank_bounds} rho={rep.rho}")


if __name__ == "__main__":
    main()
