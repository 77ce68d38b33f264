"""Nested step triangles and certified evaluation of the limit function ``f``.

A :class:`Frame` places one rescaled step triangle: on its base ``[u, v]`` the
function is ``y0 + orient * h * S(t)`` with ``t`` the normalised base
coordinate and ``S`` the symmetric staircase of the frame's ``sigma``.  Every
removed interval of that staircase (and its mirror image) is an L-segment and
carries one or two child frames pointing the other way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from bmorse.discontinuum import DEFAULT_LEVEL_CUTOFF, StaircaseNode, get_tree
from bmorse.errors import ResourceLimitError
from bmorse.numerics import HALF, ONE, ZERO, Enclosure, as_rational

# Staircase levels searched for an exact hit before settling for a width stop,
# so knots down to this level evaluate exactly whatever eps is.
EXACT_LEVELS = 8


@dataclass(frozen=True)
class Frame:
    gen: int
    u: Fraction
    v: Fraction
    y0: Fraction
    h: Fraction
    orient: int
    sigma: int
    parent: "Frame | None" = field(default=None, compare=False, repr=False)
    origin: "tuple[int, int] | None" = field(default=None, compare=False)
    mirrored: bool = field(default=False, compare=False)

    @property
    def base(self) -> tuple[Fraction, Fraction]:
        return self.u, self.v

    @property
    def length(self) -> Fraction:
        return self.v - self.u

    @property
    def apex(self) -> Fraction:
        return (self.u + self.v) / 2

    @property
    def slope(self) -> Fraction:
        """Rise over half-base: the average steepness of one side."""
        return self.h / (self.length / 2)

    @property
    def value_range(self) -> tuple[Fraction, Fraction]:
        top = self.y0 + self.orient * self.h
        return min(self.y0, top), max(self.y0, top)

    def value(self, level: Fraction) -> Fraction:
        """Map a staircase value in ``[0, 1]`` to the graph of ``f``."""
        return self.y0 + self.orient * self.h * level

    def to_x(self, t: Fraction) -> Fraction:
        return self.u + self.length * t

    def local(self, x: Fraction) -> Fraction:
        return (x - self.u) / self.length

    def contains(self, x: Fraction) -> bool:
        return self.u <= x <= self.v


ROOT = Frame(0, ZERO, ONE, ZERO, ONE, 1, 1)


def split_point(node: StaircaseNode, sigma: int, kmode: str = "exact") -> Fraction:
    """Point dividing an even-level removed interval between its two triangles."""
    k = get_tree(sigma, kmode).k(node.m)
    return node.b - (node.b - node.a) / (k - 2)


def child_bases(node: StaircaseNode, sigma: int, kmode: str = "exact") -> list[tuple[Fraction, Fraction]]:
    """Child-triangle bases inside ``(a, b)`` in staircase coordinates."""
    if node.m % 2:
        return [(node.a, node.b)]
    e = split_point(node, sigma, kmode)
    return [(node.a, e), (e, node.b)]


def _children(parent: Frame, node: StaircaseNode, mirrored: bool, kmode: str) -> list[Frame]:
    h = parent.h * (node.plateau - node.vc)
    y0 = parent.value(node.plateau)
    out = []
    for lo, hi in child_bases(node, parent.sigma, kmode):
        if mirrored:
            lo, hi = 1 - hi, 1 - lo
        out.append(
            Frame(
                parent.gen + 1, parent.to_x(lo), parent.to_x(hi), y0, h, -parent.orient,
                parent.sigma + node.m, parent, (node.m, node.p), mirrored,
            )
        )
    out.sort(key=lambda fr: fr.u)
    return out


def child_frames(parent: Frame, node: StaircaseNode, mirrored: bool = False, kmode: str = "exact") -> list[Frame]:
    """Frames replacing the flat segment over ``node``'s removed interval.

    ``mirrored`` selects the copy in the right half of ``parent``'s base.
    """
    tree = get_tree(parent.sigma, kmode)
    try:
        own = tree.node(node.m, node.p)
    except ValueError:
        own = None
    if own != node:
        raise ValueError(f"node ({node.m}, {node.p}) is not part of the sigma={parent.sigma} staircase")
    return _children(parent, node, mirrored, kmode)


def check_frame(frame: Frame) -> list[str]:
    """Violated parent/child relations of ``frame`` (empty when all hold)."""
    bad = []
    if frame.h <= 0:
        bad.append("non-positive height")
    if (frame.orient == 1) != (frame.gen % 2 == 0):
        bad.append("orientation does not alternate with generation")
    parent = frame.parent
    if parent is None:
        if frame != ROOT:
            bad.append("parentless frame is not the root")
        return bad
    if frame.sigma != parent.sigma + frame.origin[0]:
        bad.append("sigma is not parent sigma plus level")
    plo, phi = parent.value_range
    lo, hi = frame.value_range
    if not plo <= lo <= hi <= phi:
        bad.append("value range escapes parent")
    if not frame.slope > 2 * parent.slope:
        bad.append("slope did not more than double")
    if not parent.u < frame.u < frame.v < parent.v:
        bad.append("base not strictly inside parent base")
    return bad


@dataclass(frozen=True)
class Classification:
    """``kind`` is ``"I"``, ``"II"`` (with ``order``) or ``"undecided"`` (with ``reason``)."""

    kind: str
    order: int = 0
    reason: str = ""

    def __str__(self) -> str:
        if self.kind == "II":
            return f"CaseII({self.order})"
        if self.kind == "I":
            return "CaseI"
        return f"Undecided({self.reason})"


CASE_I = Classification("I")


@dataclass
class Chain:
    frames: list[Frame]
    classification: Classification
    boundary: bool = False

    @property
    def last(self) -> Frame:
        return self.frames[-1]


@dataclass
class _Trace:
    value: Enclosure | None
    frames: list[Frame]
    stop: str  # "cantor", "boundary", "flat", "exact", "eps", "gen-limit", "level-limit"


def _fold(frame: Frame, x: Fraction) -> tuple[Fraction, bool]:
    t = frame.local(x)
    return (t, False) if t <= HALF else (1 - t, True)


def _exact_hit(
    frame: Frame, node: StaircaseNode, s: Fraction, x: Fraction, mirrored: bool, flat_gen, kmode: str
) -> Enclosure | None:
    """Exact value if ``x`` is a knot of ``frame`` at most :data:`EXACT_LEVELS` deep below ``node``."""
    tree = get_tree(frame.sigma, kmode)
    while True:
        if s == node.c:
            return Enclosure.point(frame.value(node.vc))
        if s == node.d:
            return Enclosure.point(frame.value(node.vd))
        if node.a <= s <= node.b:
            if s == node.a or s == node.b or frame.gen == flat_gen:
                return Enclosure.point(frame.value(node.plateau))
            for kid in _children(frame, node, mirrored, kmode):
                if x == kid.apex:
                    return Enclosure.point(kid.value(ONE))
                if x == kid.u or x == kid.v:
                    return Enclosure.point(frame.value(node.plateau))
            return None
        if node.m >= EXACT_LEVELS:
            return None
        node = tree.node(node.m + 1, 2 * node.p - (s < node.a))


def _trace(
    x: Fraction,
    eps: Fraction | None,
    flat_gen: int | None = None,
    max_gen: int | None = None,
    level_cutoff: int = DEFAULT_LEVEL_CUTOFF,
    kmode: str = "exact",
    strict_levels: bool = True,
) -> _Trace:
    """Shared descent for evaluation and classification.

    ``eps=None`` never stops on width; ``flat_gen`` treats L-segments of that
    generation as flat; ``max_gen`` caps the number of frames entered.
    """
    frame = ROOT
    frames = [frame]
    while True:
        tree = get_tree(frame.sigma, kmode)
        s, mirrored = _fold(frame, x)
        node = tree.node(1, 1)
        child = None
        while child is None:
            if s == node.c:
                return _Trace(Enclosure.point(frame.value(node.vc)), frames, "cantor")
            if s == node.d:
                return _Trace(Enclosure.point(frame.value(node.vd)), frames, "cantor")
            if node.a <= s <= node.b:
                flat = Enclosure.point(frame.value(node.plateau))
                if s == node.a or s == node.b:
                    return _Trace(flat, frames, "boundary")
                if frame.gen == flat_gen:
                    return _Trace(flat, frames, "flat")
                if max_gen is not None and frame.gen >= max_gen:
                    return _Trace(None, frames, "gen-limit")
                kids = _children(frame, node, mirrored, kmode)
                child = next(k for k in kids if k.contains(x))
                if x == child.u or x == child.v:
                    # shared endpoint of the two even-level triangles
                    return _Trace(flat, frames + [child], "boundary")
                break
            if eps is not None and frame.h * node.gap <= eps:
                hit = _exact_hit(frame, node, s, x, mirrored, flat_gen, kmode) if node.m < EXACT_LEVELS else None
                if hit is not None:
                    return _Trace(hit, frames, "exact")
                return _Trace(Enclosure.spanning(frame.value(node.vc), frame.value(node.vd)), frames, "eps")
            if node.m >= level_cutoff:
                if strict_levels:
                    raise ResourceLimitError(f"staircase descent passed level {level_cutoff}")
                return _Trace(None, frames, "level-limit")
            node = tree.node(node.m + 1, 2 * node.p - (s < node.a))
        frame = child
        frames.append(frame)


def _check_args(x, eps) -> tuple[Fraction, Fraction]:
    x, eps = as_rational(x), as_rational(eps)
    if not ZERO <= x <= ONE:
        raise ValueError("x outside [0, 1]")
    if eps <= 0:
        raise ValueError("eps must be positive")
    return x, eps


def f_eval(x, eps, level_cutoff: int = DEFAULT_LEVEL_CUTOFF, kmode: str = "exact") -> Enclosure:
    """Certified enclosure of ``f(x)`` with width at most ``eps``."""
    x, eps = _check_args(x, eps)
    return _trace(x, eps, level_cutoff=level_cutoff, kmode=kmode).value


def f_eval_frames(
    x, eps, level_cutoff: int = DEFAULT_LEVEL_CUTOFF, kmode: str = "exact"
) -> tuple[Enclosure, list[Frame]]:
    """:func:`f_eval` together with the frames entered on the way down."""
    x, eps = _check_args(x, eps)
    tr = _trace(x, eps, level_cutoff=level_cutoff, kmode=kmode)
    return tr.value, tr.frames


def fn_eval(x, n: int, eps, level_cutoff: int = DEFAULT_LEVEL_CUTOFF, kmode: str = "exact") -> Enclosure:
    """Enclosure of the ``n``-th approximant ``f_n(x)``; generation-``n`` segments stay flat."""
    x, eps = _check_args(x, eps)
    if n < 0:
        raise ValueError("n must be non-negative")
    return _trace(x, eps, flat_gen=n, level_cutoff=level_cutoff, kmode=kmode).value


def locate(x, max_gen: int, level_cutoff: int = 24, kmode: str = "exact") -> Chain:
    """Follow ``x`` through the nested L-segments.

    Points of the residual Cantor set that are not node endpoints can only be
    followed ``level_cutoff`` staircase levels deep per frame; such points are
    reported as undecided.
    """
    x = as_rational(x)
    if not ZERO <= x <= ONE:
        raise ValueError("x outside [0, 1]")
    tr = _trace(x, None, max_gen=max_gen, level_cutoff=level_cutoff, kmode=kmode, strict_levels=False)
    last = tr.frames[-1]
    if tr.stop == "gen-limit":
        return Chain(tr.frames, Classification("undecided", reason=f"max_gen={max_gen}"))
    if tr.stop == "level-limit":
        return Chain(tr.frames, Classification("undecided", reason=f"level cutoff {level_cutoff}"))
    cls = CASE_I if last.gen == 0 else Classification("II", last.gen)
    return Chain(tr.frames, cls, boundary=tr.stop == "boundary")


def max_height(n: int, breadth: int, kmode: str = "exact") -> Fraction:
    """Tallest generation-``n`` triangle over L-segments of level ``<= breadth``."""
    if n < 1 or breadth < 1:
        raise ValueError("n and breadth must be positive")

    @lru_cache(maxsize=None)
    def best(sigma: int, left: int) -> Fraction:
        # heights multiply down the chain: h_child = h_parent * (plateau - vc)
        if left == 0:
            return ONE
        tree = get_tree(sigma, kmode)
        return max(
            (node.plateau - node.vc) * best(sigma + m, left - 1)
            for m in range(1, breadth + 1)
            for node in tree.level(m)
        )

    return best(1, n)
