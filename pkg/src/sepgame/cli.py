"""Command-line front end: ``sepgame <command> [flags] game.json [profile.json]``.

Exit codes: 0 ok, 1 negative result (verification fails, or no equilibrium
within user caps), 2 input error, 3 unsupported game, 4 internal inconsistency.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import equilibrium as eq
from .game import GameError, UnsupportedGameError, payoff_mixed
from .io import FORMAT_VERSION, fmt_number, load_game, load_profile, profile_to_dict
from .numerics import DEFAULT_TOL, EXACT, FLOAT, to_fraction
from .rank import build_interaction, canonicalize, rank_report
from .reduction import reduce_equilibrium

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_UNSUPPORTED, EXIT_INTERNAL = range(5)


class UsageError(Exception):
    pass


def _positive_decimal(text: str) -> Fraction:
    try:
        value = to_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None
    if value <= 0:
        raise UsageError(f"expected a positive value, got {text}")
    return value


def _caps(text: str | None):
    if text is None:
        return None
    try:
        caps = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--caps expects k1,k2, got {text!r}") from None
    if len(caps) != 2 or min(caps) < 1:
        raise UsageError(f"--caps expects two positive integers, got {text!r}")
    return caps


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _write(path, text: str):
    Path(path).write_text(text, encoding="utf-8")


def _emit(args, doc: dict, text: str):
    out = _dump(doc) if args.format == "json" else text
    if args.out and args.command in ("rank", "eval"):
        _write(args.out, out)
    else:
        sys.stdout.write(out)


def _write_csv(path: Path, m: np.ndarray):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in m:
            w.writerow([fmt_number(x) for x in row])


# ------------------------------------------------------------------ commands


def cmd_rank(args) -> int:
    g = load_game(args.game)
    report = rank_report(g, args.mode, args.tol)
    if args.dump_matrices:
        d = Path(args.dump_matrices)
        d.mkdir(parents=True, exist_ok=True)
        for i in range(g.n):
            inter = build_interaction(g, i, args.mode)
            for j, block in inter.blocks.items():
                _write_csv(d / f"S_{i}_{j}.csv", block)
            _write_csv(d / f"S_{i}.csv", inter.stacked)
            canon = canonicalize(g, i, args.mode, args.tol)
            _write_csv(d / f"Sbar_{i}.csv", canon.s_bar)
            _write_csv(d / f"T_{i}.csv", canon.t)
    doc = {"format_version": FORMAT_VERSION, "game": g.name, **report.to_dict()}
    lines = [f"game {g.name or args.game}: {g.n} players, {args.mode} arithmetic"]
    for i, p in enumerate(report.players):
        lines.append(f"player {i}: m = {p.m}, rank S = {p.rank_bound}, rho = {p.rho}, "
                     f"support bound {p.support_bound} (naive {p.naive_support_bound})")
    lines.append("rho = (" + ", ".join(str(r) for r in report.rho) + ")")
    _emit(args, doc, "\n".join(lines) + "\n")
    return EXIT_OK


def _certificate_text(cert: eq.EpsilonCertificate) -> str:
    lines = [f"epsilon = {cert.epsilon}, method {cert.method}: "
             + ("PASS" if cert.passed else "FAIL")]
    for i, p in enumerate(cert.players):
        lines.append(f"player {i}: payoff {p.payoff:.10g}, best reply {p.best_point} "
                     f"worth {p.best_value:.10g}, regret {p.regret:.3e}")
    return "\n".join(lines) + "\n"


def _default_out(path: str, suffix: str) -> Path:
    name = Path(path).name
    for ext in (".profile.json", ".json"):
        if name.endswith(ext):
            name = name[: -len(ext)]
            break
    return Path(name + suffix)


def cmd_solve(args) -> int:
    if args.epsilon is None:
        raise UsageError("solve needs --epsilon")
    g = load_game(args.game)
    try:
        res = eq.epsilon_solve(g, args.epsilon, caps=_caps(args.caps),
                               use_rank_bound=args.rank_bound, mode=args.mode, tol=args.tol)
    except eq.NotFoundError as exc:
        print(f"sepgame: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    out = Path(args.out) if args.out else _default_out(args.game, ".profile.json")
    cert_path = out.with_name(_default_out(out.name, ".certificate.json").name)
    _write(out, _dump(profile_to_dict(res.profile)))
    _write(cert_path, _dump(res.certificate.to_dict()))
    if args.format == "json":
        sys.stdout.write(_dump({"format_version": FORMAT_VERSION, "profile": str(out),
                                "certificate": str(cert_path),
                                "supports": [len(s.atoms) for s in res.profile.strategies],
                                "max_regret": res.certificate.max_regret}))
    else:
        sizes = ", ".join(str(len(s.atoms)) for s in res.profile.strategies)
        sys.stdout.write(f"wrote {out} and {cert_path}\nsupport sizes ({sizes}), "
                         f"{res.search.examined} support pairs examined\n")
        sys.stdout.write(_certificate_text(res.certificate))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.epsilon is None:
        raise UsageError("verify needs --epsilon")
    g = load_game(args.game)
    profile = load_profile(_need_profile(args), g, args.tol)
    cert = eq.verify_epsilon(g, profile, args.epsilon)
    doc = cert.to_dict()
    if args.out:
        _write(args.out, _dump(doc))
    sys.stdout.write(_dump(doc) if args.format == "json" else _certificate_text(cert))
    return EXIT_OK if cert.passed else EXIT_NEGATIVE


def cmd_reduce(args) -> int:
    g = load_game(args.game)
    profile = load_profile(_need_profile(args), g, args.tol)
    reduced = reduce_equilibrium(g, profile, args.mode, args.tol, pure=args.pure)
    before = [float(u) for u in payoff_mixed(g, profile)]
    after = [float(u) for u in payoff_mixed(g, reduced)]
    report = {
        "format_version": FORMAT_VERSION,
        "support_before": [len(s.pruned().atoms) for s in profile.strategies],
        "support_after": [len(s.atoms) for s in reduced.strategies],
        "payoffs_before": before,
        "payoffs_after": after,
        "max_payoff_change": max(abs(a - b) for a, b in zip(before, after)),
    }
    out = Path(args.out) if args.out else _default_out(_need_profile(args), ".reduced.json")
    _write(out, _dump(profile_to_dict(reduced)))
    text = (f"wrote {out}\nsupport sizes {tuple(report['support_before'])} -> "
            f"{tuple(report['support_after'])}, max payoff change {report['max_payoff_change']:.3e}\n")
    sys.stdout.write(_dump(report) if args.format == "json" else text)
    return EXIT_OK


def cmd_eval(args) -> int:
    g = load_game(args.game)
    profile = load_profile(_need_profile(args), g, args.tol)
    payoffs = payoff_mixed(g, profile)
    doc = {"format_version": FORMAT_VERSION,
           "payoffs": [fmt_number(u) if isinstance(u, (Fraction, int)) else float(u)
                       for u in payoffs]}
    text = "payoffs = (" + ", ".join(str(p) for p in doc["payoffs"]) + ")\n"
    _emit(args, doc, text)
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.epsilon is None:
        raise UsageError("sample needs --epsilon")
    g = load_game(args.game)
    sg = eq.build_sampled(g, args.epsilon)
    d = Path(args.out) if args.out else _default_out(args.game, ".sampled")
    d.mkdir(parents=True, exist_ok=True)
    meta = {
        "format_version": FORMAT_VERSION,
        "epsilon": fmt_number(sg.epsilon),
        "lipschitz": [None if l is None else fmt_number(l) for l in sg.lipschitz],
        "grids": [[p if isinstance(p, str) else fmt_number(p) for p in grid] for grid in sg.grids],
    }
    _write(d / "grids.json", _dump(meta))
    for name, u in (("U1", sg.u1), ("U2", sg.u2)):
        _write_csv(d / f"{name}.csv", u)
    sys.stdout.write(f"wrote {d}: grid sizes {sg.shape}\n")
    return EXIT_OK


def _need_profile(args) -> str:
    if not args.profile:
        raise UsageError(f"{args.command} needs a profile file")
    return args.profile


COMMANDS = {"rank": cmd_rank, "solve": cmd_solve, "verify": cmd_verify,
            "reduce": cmd_reduce, "eval": cmd_eval, "sample": cmd_sample}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sepgame", description="Rank, reduction and "
                                "epsilon-equilibria of separable games.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("game")
    p.add_argument("profile", nargs="?")
    p.add_argument("--epsilon")
    p.add_argument("--caps", help="support caps k1,k2 (default: rho_i + 1)")
    p.add_argument("--mode", choices=[EXACT, FLOAT], default=EXACT)
    p.add_argument("--tol", default=str(DEFAULT_TOL))
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.add_argument("--dump-matrices", metavar="DIR")
    p.add_argument("--rank-bound", action="store_true",
                   help="cap supports by rank S_i instead of the exact rank")
    p.add_argument("--pure", action="store_true",
                   help="reduce: use one pure strategy where the game allows it")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.tol = float(_positive_decimal(args.tol))
        if args.epsilon is not None:
            args.epsilon = _positive_decimal(args.epsilon)
        return COMMANDS[args.command](args)
    except (UsageError, GameError) as exc:
        print(f"sepgame: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnsupportedGameError as exc:
        print(f"sepgame: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except eq.InconsistencyError as exc:
        print(f"sepgame: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
