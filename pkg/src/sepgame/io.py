"""JSON game and profile files.

Game file::

    {"players": 2,
     "spaces":  [{"kind": "interval", "lo": -1, "hi": 1}, ...],
     "bases":   [{"kind": "monomials", "count": 4}, ...],
     "payoffs": [[{"degrees": [1, 1], "coeff": "2"}, ...], ...]}

Finite players use ``{"kind": "finite", "labels": [...]}`` with an
``{"kind": "indicators"}`` basis; tabulated bases are
``{"kind": "tabulated", "points": [...], "values": [[...], ...]}`` with one
row per sample point.  Coefficients are decimal strings parsed exactly.

Profile file::

    {"strategies": [{"atoms": [{"point": "-1", "weight": "0.5532"}, ...]}, ...]}
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .game import (FiniteSet, GameError, Indicators, Interval, MixedProfile,
                   MixedStrategy, Monomials, SeparableGame, Tabulated, validate_profile)
from .numerics import DEFAULT_TOL, to_fraction

FORMAT_VERSION = "1"


def _loads(text: str, source: str):
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise GameError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _num(x, where: str) -> Fraction:
    if isinstance(x, bool):
        raise GameError(f"{where}: expected a number, got {x!r}")
    try:
        return to_fraction(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise GameError(f"{where}: expected a number or decimal string, got {x!r}") from None


def fmt_number(x) -> str:
    """Decimal string for a number: exact when the value has a finite expansion."""
    if isinstance(x, (Fraction, int)):
        f = Fraction(x)
        d = f.denominator
        while d % 2 == 0:
            d //= 2
        while d % 5 == 0:
            d //= 5
        if d == 1:
            sign = "-" if f < 0 else ""
            f = abs(f)
            whole, rem = divmod(f.numerator, f.denominator)
            if rem == 0:
                return f"{sign}{whole}"
            digits = []
            while rem:
                rem *= 10
                q, rem = divmod(rem, f.denominator)
                digits.append(str(q))
            return f"{sign}{whole}." + "".join(digits)
        return repr(float(f))
    return repr(float(x))


# --------------------------------------------------------------------- games


def game_from_dict(doc: dict, source: str = "<game>") -> SeparableGame:
    if not isinstance(doc, dict):
        raise GameError(f"{source}: top level must be an object")
    for key in ("players", "spaces", "bases", "payoffs"):
        if key not in doc:
            raise GameError(f"{source}: missing key {key!r}")
    n = doc["players"]
    if not isinstance(n, int) or n < 1:
        raise GameError(f"{source}: players must be a positive integer")
    for key in ("spaces", "bases", "payoffs"):
        if not isinstance(doc[key], list) or len(doc[key]) != n:
            raise GameError(f"{source}: {key} must be a list of length {n}")

    spaces = []
    for i, sp in enumerate(doc["spaces"]):
        where = f"{source}: spaces[{i}]"
        kind = sp.get("kind") if isinstance(sp, dict) else None
        if kind == "interval":
            spaces.append(Interval(_num(sp.get("lo"), where + ".lo"), _num(sp.get("hi"), where + ".hi")))
        elif kind == "finite":
            spaces.append(FiniteSet(tuple(sp.get("labels", ()))))
        else:
            raise GameError(f"{where}: unknown space kind {kind!r}")

    bases = []
    for i, b in enumerate(doc["bases"]):
        where = f"{source}: bases[{i}]"
        kind = b.get("kind") if isinstance(b, dict) else None
        if kind == "monomials":
            count = b.get("count")
            if not isinstance(count, int):
                raise GameError(f"{where}.count must be an integer")
            bases.append(Monomials(count))
        elif kind == "indicators":
            if not isinstance(spaces[i], FiniteSet):
                raise GameError(f"{where}: indicator basis needs a finite space")
            bases.append(Indicators(spaces[i].labels))
        elif kind == "tabulated":
            pts = [_num(p, f"{where}.points[{k}]") for k, p in enumerate(b.get("points", []))]
            rows = b.get("values", [])
            vals = [[_num(v, f"{where}.values[{k}][{j}]") for j, v in enumerate(row)]
                    for k, row in enumerate(rows)]
            if len({len(r) for r in vals}) > 1:
                raise GameError(f"{where}.values rows have different lengths")
            bases.append(Tabulated(tuple(pts), np.array(vals, dtype=object)))
        else:
            raise GameError(f"{where}: unknown basis kind {kind!r}")

    shape = tuple(b.size for b in bases)
    coeffs = []
    for i, terms in enumerate(doc["payoffs"]):
        a = np.full(shape, Fraction(0), dtype=object)
        if not isinstance(terms, list):
            raise GameError(f"{source}: payoffs[{i}] must be a list of terms")
        for t, term in enumerate(terms):
            where = f"{source}: payoffs[{i}][{t}]"
            if not isinstance(term, dict) or "degrees" not in term or "coeff" not in term:
                raise GameError(f"{where}: term needs 'degrees' and 'coeff'")
            deg = term["degrees"]
            if (not isinstance(deg, list) or len(deg) != n
                    or not all(isinstance(d, int) and 0 <= d < m for d, m in zip(deg, shape))):
                raise GameError(f"{where}.degrees {deg!r} out of range for basis sizes {shape}")
            a[tuple(deg)] += _num(term["coeff"], where + ".coeff")
        coeffs.append(a)
    try:
        return SeparableGame(tuple(spaces), tuple(bases), tuple(coeffs), str(doc.get("name", "")))
    except GameError as exc:
        raise GameError(f"{source}: {exc}") from None


def game_to_dict(g: SeparableGame) -> dict:
    spaces = []
    for sp in g.spaces:
        if isinstance(sp, Interval):
            spaces.append({"kind": "interval", "lo": fmt_number(sp.lo), "hi": fmt_number(sp.hi)})
        else:
            spaces.append({"kind": "finite", "labels": list(sp.labels)})
    bases = []
    for b in g.bases:
        if isinstance(b, Monomials):
            bases.append({"kind": "monomials", "count": b.count})
        elif isinstance(b, Indicators):
            bases.append({"kind": "indicators"})
        else:
            bases.append({"kind": "tabulated",
                          "points": [fmt_number(p) for p in b.points],
                          "values": [[fmt_number(v) for v in row] for row in b.values]})
    payoffs = []
    for a in g.coeffs:
        terms = [{"degrees": list(idx), "coeff": fmt_number(v)}
                 for idx, v in np.ndenumerate(a) if v != 0]
        payoffs.append(terms)
    doc = {"players": g.n, "spaces": spaces, "bases": bases, "payoffs": payoffs}
    if g.name:
        doc["name"] = g.name
    return doc


def load_game(path) -> SeparableGame:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise GameError(f"{path}: {exc.strerror}") from None
    return game_from_dict(_loads(text, str(path)), str(path))


def save_game(g: SeparableGame, path):
    Path(path).write_text(json.dumps(game_to_dict(g), indent=2) + "\n", encoding="utf-8")


# ------------------------------------------------------------------ profiles


def profile_from_dict(doc: dict, g: SeparableGame, source: str = "<profile>",
                      tol: float = DEFAULT_TOL) -> MixedProfile:
    strategies = doc.get("strategies") if isinstance(doc, dict) else None
    if not isinstance(strategies, list):
        raise GameError(f"{source}: missing 'strategies' list")
    out = []
    for i, s in enumerate(strategies):
        atoms = s.get("atoms") if isinstance(s, dict) else None
        if not isinstance(atoms, list) or not atoms:
            raise GameError(f"{source}: strategies[{i}] needs a nonempty 'atoms' list")
        parsed = []
        for k, atom in enumerate(atoms):
            where = f"{source}: strategies[{i}].atoms[{k}]"
            if not isinstance(atom, dict) or "point" not in atom or "weight" not in atom:
                raise GameError(f"{where}: atom needs 'point' and 'weight'")
            point = atom["point"]
            if i < g.n and isinstance(g.spaces[i], Interval):
                point = _num(point, where + ".point")
            else:
                point = str(point)
            parsed.append((point, _num(atom["weight"], where + ".weight")))
        out.append(MixedStrategy(tuple(parsed)))
    profile = MixedProfile(tuple(out))
    try:
        validate_profile(g, profile, tol)
    except GameError as exc:
        raise GameError(f"{source}: {exc}") from None
    return profile


def profile_to_dict(profile: MixedProfile) -> dict:
    strategies = []
    for sigma in profile.strategies:
        atoms = []
        for p, w in sigma.atoms:
            point = p if isinstance(p, str) else fmt_number(p)
            atoms.append({"point": point, "weight": fmt_number(w)})
        strategies.append({"atoms": atoms})
    return {"format_version": FORMAT_VERSION, "strategies": strategies}


def load_profile(path, g: SeparableGame, tol: float = DEFAULT_TOL) -> MixedProfile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise GameError(f"{path}: {exc.strerror}") from None
    return profile_from_dict(_loads(text, str(path)), g, str(path), tol)


def save_profile(profile: MixedProfile, path):
    Path(path).write_text(json.dumps(profile_to_dict(profile), indent=2) + "\n", encoding="utf-8")
