"""Piecewise-linear measure-preserving approximants ``g_n``.

``g_0`` is the full tent map.  Each approximant is refined by replacing the
linear piece over a staircase interval ``[c, d]`` of some frame by a steeper
piece up to ``(a, plateau)``, one or two inward tents over ``(a, b)`` and the
original line from ``(b, plateau)`` on.  The plateau rule of the staircase
keeps the reciprocal-slope sum over every value cell unchanged, so each
refinement stays Lebesgue-measure preserving.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from collections.abc import Iterator
from dataclasses import dataclass, field
from fractions import Fraction

from bmorse.bmfunction import ROOT, Frame, _children, child_bases
from bmorse.discontinuum import StaircaseNode, get_tree
from bmorse.numerics import HALF, ONE, ZERO, as_rational, fmt, parse_rational


@dataclass(frozen=True)
class PLMap:
    """Continuous piecewise-linear self-map of ``[0, 1]`` given by its knots."""

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        xs, ys = self.breakpoints, self.values
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("need matching breakpoint and value lists of length >= 2")
        if xs[0] != 0 or xs[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(x1 <= x0 for x0, x1 in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(not ZERO <= y <= ONE for y in ys):
            raise ValueError("values must lie in [0, 1]")

    def __call__(self, x) -> Fraction:
        return eval_pl(self, x)

    def __len__(self) -> int:
        return len(self.breakpoints)

    def pieces(self) -> Iterator[tuple[Fraction, Fraction, Fraction, Fraction]]:
        xs, ys = self.breakpoints, self.values
        for i in range(len(xs) - 1):
            yield xs[i], xs[i + 1], ys[i], ys[i + 1]

    def flat_pieces(self) -> list[tuple[Fraction, Fraction]]:
        return [(x0, x1) for x0, x1, y0, y1 in self.pieces() if y0 == y1]

    def to_json(self) -> dict:
        out = {"breakpoints": [fmt(x) for x in self.breakpoints], "values": [fmt(y) for y in self.values]}
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PLMap":
        return cls(
            tuple(parse_rational(s) for s in data["breakpoints"]),
            tuple(parse_rational(s) for s in data["values"]),
            dict(data.get("meta", {})),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def tent() -> PLMap:
    return PLMap((ZERO, HALF, ONE), (ZERO, ONE, ZERO))


def _interp(xs, ys, x: Fraction) -> Fraction:
    i = bisect_right(xs, x)
    if i == len(xs):
        return ys[-1]
    if xs[i - 1] == x:
        return ys[i - 1]
    x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def eval_pl(g: PLMap, x) -> Fraction:
    x = as_rational(x)
    if not ZERO <= x <= ONE:
        raise ValueError("x outside [0, 1]")
    return _interp(g.breakpoints, g.values, x)


def _images(frame: Frame, node: StaircaseNode, kmode: str) -> list[list[tuple[Fraction, Fraction]]]:
    """Replacement knots ``c, a, apexes/split, b, d`` for both halves of the frame."""
    staircase = [(node.c, node.vc), (node.a, node.plateau)]
    for lo, hi in child_bases(node, frame.sigma, kmode):
        if lo != node.a:
            staircase.append((lo, node.plateau))
        staircase.append(((lo + hi) / 2, node.vc))
    staircase += [(node.b, node.plateau), (node.d, node.vd)]
    left = [(frame.to_x(t), frame.value(w)) for t, w in staircase]
    right = [(frame.to_x(1 - t), frame.value(w)) for t, w in reversed(staircase)]
    return [left, right]


def _splice(xs: list, ys: list, knots: list[tuple[Fraction, Fraction]]) -> None:
    lo, ylo = knots[0]
    hi, yhi = knots[-1]
    i = bisect_right(xs, lo)
    j = bisect_left(xs, hi)
    if i != j or _interp(xs, ys, lo) != ylo or _interp(xs, ys, hi) != yhi:
        raise ValueError(f"map is not the frame's line over [{lo}, {hi}]; modifications out of order")
    inner = knots[1:-1]
    if xs[i - 1] != lo:
        inner.insert(0, knots[0])
    if j == len(xs) or xs[j] != hi:
        inner.append(knots[-1])
    xs[i:i] = [p for p, _ in inner]
    ys[i:i] = [q for _, q in inner]


def modify(g: PLMap, frame: Frame, node: StaircaseNode, kmode: str = "exact") -> PLMap:
    """Insert the tents of ``node`` (and their mirror) into ``g`` on ``frame``."""
    tree = get_tree(frame.sigma, kmode)
    if tree.node(node.m, node.p) != node:
        raise ValueError(f"node ({node.m}, {node.p}) is not part of the sigma={frame.sigma} staircase")
    xs, ys = list(g.breakpoints), list(g.values)
    for knots in _images(frame, node, kmode):
        _splice(xs, ys, knots)
    return PLMap(tuple(xs), tuple(ys))


def frames_at(gen: int, cutoff: int, kmode: str = "exact") -> list[Frame]:
    """All generation-``gen`` frames reached through L-segments of level ``<= cutoff``."""
    frames = [ROOT]
    for _ in range(gen):
        nxt = []
        for fr in frames:
            tree = get_tree(fr.sigma, kmode)
            for m in range(1, cutoff + 1):
                for node in tree.level(m):
                    nxt += _children(fr, node, False, kmode)
                    nxt += _children(fr, node, True, kmode)
        frames = sorted(nxt, key=lambda f: f.u)
    return frames


def schedule(n: int, cutoff: int, kmode: str = "exact") -> Iterator[tuple[Frame, StaircaseNode]]:
    """Modification targets taking ``g_{n-1}`` to ``g_n``, lexicographic in ``(m, p)`` per frame."""
    for fr in frames_at(n - 1, cutoff, kmode):
        tree = get_tree(fr.sigma, kmode)
        for m in range(1, cutoff + 1):
            for node in tree.level(m):
                yield fr, node


def build_g(n: int, cutoff: int, kmode: str = "exact") -> PLMap:
    """Finite-schedule approximant ``g_n``; every level index along the way is ``<= cutoff``."""
    if n < 0 or cutoff < 1:
        raise ValueError("need n >= 0 and cutoff >= 1")
    g = tent()
    xs, ys = list(g.breakpoints), list(g.values)
    steps = 0
    for gen in range(1, n + 1):
        for fr, node in schedule(gen, cutoff, kmode):
            for knots in _images(fr, node, kmode):
                _splice(xs, ys, knots)
            steps += 1
    return PLMap(tuple(xs), tuple(ys), {"gen": n, "cutoff": cutoff, "kmode": kmode, "steps": steps})


def g_steps(n: int, cutoff: int, kmode: str = "exact") -> Iterator[tuple[Frame, StaircaseNode, PLMap]]:
    """Every intermediate map of the ``g_{n-1} -> g_n`` schedule, one modification at a time."""
    g = build_g(n - 1, cutoff, kmode) if n > 1 else tent()
    for fr, node in schedule(n, cutoff, kmode):
        g = modify(g, fr, node, kmode)
        yield fr, node, g


@dataclass
class MeasureReport:
    """Reciprocal-slope sums over the value cells of a map.

    ``cells`` holds ``(lo, hi, total)`` for each open value cell ``(lo, hi)``.
    """

    cells: list[tuple[Fraction, Fraction, Fraction]]
    preserving: bool
    diagnostics: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "preserving": self.preserving,
            "cells": [{"lo": fmt(lo), "hi": fmt(hi), "sum": fmt(t)} for lo, hi, t in self.cells],
            "diagnostics": self.diagnostics,
        }


def verify_measure(g: PLMap) -> MeasureReport:
    levels = sorted(set(g.values) | {ZERO, ONE})
    index = {y: i for i, y in enumerate(levels)}
    diff = [ZERO] * len(levels)
    diagnostics = []
    for x0, x1, y0, y1 in g.pieces():
        if y0 == y1:
            diagnostics.append(f"flat piece on [{fmt(x0)}, {fmt(x1)}] at value {fmt(y0)}")
            continue
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        w = (x1 - x0) / (hi - lo)
        diff[index[lo]] += w
        diff[index[hi]] -= w
    cells, running = [], ZERO
    for i in range(len(levels) - 1):
        running += diff[i]
        cells.append((levels[i], levels[i + 1], running))
    for lo, hi, total in cells:
        if total != 1:
            diagnostics.append(f"cell ({fmt(lo)}, {fmt(hi)}) has reciprocal-slope sum {fmt(total)}")
    preserving = not diagnostics and min(g.values) == 0 and max(g.values) == 1
    return MeasureReport(cells, preserving, diagnostics)


def preimage_measure(g: PLMap, u, v) -> Fraction:
    """Exact Lebesgue measure of ``g^{-1}([u, v])``."""
    u, v = as_rational(u), as_rational(v)
    if not ZERO <= u < v <= ONE:
        raise ValueError("need 0 <= u < v <= 1")
    total = ZERO
    for x0, x1, y0, y1 in g.pieces():
        if y0 == y1:
            if u <= y0 <= v:
                total += x1 - x0
            continue
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        overlap = min(hi, v) - max(lo, u)
        if overlap > 0:
            total += overlap * (x1 - x0) / (hi - lo)
    return total


def sup_distance(g: PLMap, h: PLMap) -> Fraction:
    """Uniform distance; the difference is linear between the merged knots."""
    xs = sorted(set(g.breakpoints) | set(h.breakpoints))
    return max(abs(_interp(g.breakpoints, g.values, x) - _interp(h.breakpoints, h.values, x)) for x in xs)
