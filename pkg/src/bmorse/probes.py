"""Certified difference quotients of ``f`` and finite-scale Dini scans.

Uniform grids almost never hit the points where the quotients of ``f`` blow
up, so scans merge a grid with structural points of the construction: flat
segment endpoints, triangle apexes and split points near the scanned point.
Reported bounds are one-sided certified: ``max_lb`` is the largest lower end
and ``min_ub`` the smallest upper end over the probed quotient enclosures.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from bmorse.bmfunction import ROOT, Frame, _children, f_eval, locate
from bmorse.discontinuum import get_tree
from bmorse.numerics import HALF, ONE, ZERO, Enclosure, as_rational, fmt
from bmorse.plmap import PLMap, eval_pl

DEFAULT_QUOTIENT_EPS = Fraction(1, 64)


@dataclass(frozen=True)
class QuotientRecord:
    x: Fraction
    y: Fraction
    value: Enclosure
    epsilon_m: Fraction | None = None
    m: int | None = None


def _unit(q, name: str) -> Fraction:
    q = as_rational(q)
    if not ZERO <= q <= ONE:
        raise ValueError(f"{name} outside [0, 1]")
    return q


def quotient(x, y, eps=DEFAULT_QUOTIENT_EPS, target: PLMap | None = None, kmode: str = "exact") -> QuotientRecord:
    """Enclosure of ``(f(x) - f(y)) / (x - y)`` of width at most ``eps``.

    With ``target`` the quotient of that piecewise-linear map is computed exactly.
    """
    x, y, eps = _unit(x, "x"), _unit(y, "y"), as_rational(eps)
    if x == y:
        raise ValueError("quotient needs x != y")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if target is not None:
        return QuotientRecord(x, y, Enclosure.point((eval_pl(target, x) - eval_pl(target, y)) / (x - y)))
    each = eps * abs(x - y) / 2
    diff = f_eval(x, each, kmode=kmode) - f_eval(y, each, kmode=kmode)
    return QuotientRecord(x, y, diff.scale(1 / (x - y)))


def witness_sequence(x, m_list, eps=DEFAULT_QUOTIENT_EPS, kmode: str = "exact") -> list[QuotientRecord]:
    """Quotients toward the left endpoints of odd-level L-segments right of ``x``.

    When ``x`` lies in ``[c, a)`` of the level-``m`` node the record carries a
    certified lower bound for ``epsilon_m = (f(a) - f(x)) / (f(a) - f(c))``.
    """
    x = _unit(x, "x")
    if not x < HALF:
        raise ValueError("witnesses are taken in the left half, x < 1/2")
    chain = locate(x, max_gen=1, kmode=kmode)
    if len(chain.frames) > 1 or chain.classification.kind == "II":
        raise ValueError(f"x={x} lies in a 0th L-segment ({chain.classification})")
    tree = get_tree(1, kmode)
    fx = f_eval(x, Fraction(1, 2**64), kmode=kmode)
    out = []
    for m in m_list:
        if m < 1 or m % 2 == 0:
            raise ValueError(f"witness levels must be odd, got {m}")
        node = tree.locate_node(x, m)
        eps_m = None
        if node is not None and node.c <= x < node.a:
            eps_m = (node.plateau - fx.hi) / (node.plateau - node.vc)
        else:
            node = next((n for n in tree.level(m) if n.a > x), None)
            if node is None:
                raise ValueError(f"no level-{m} segment right of {x}")
        q = quotient(x, node.a, eps, kmode=kmode)
        out.append(QuotientRecord(x, node.a, q.value, eps_m, m))
    return out


def structural_points(
    anchor: Fraction,
    lo: Fraction,
    hi: Fraction,
    detail: Fraction,
    max_gen: int = 4,
    level_limit: int = 10,
    kmode: str = "exact",
) -> set[Fraction]:
    """Knots of the construction in ``[lo, hi]`` where ``f`` is known exactly.

    Nodes and frames are refined when they contain ``anchor`` or are at least
    ``detail`` long; smaller ones only contribute their own knots.
    """
    pts: set[Fraction] = set()

    def keep(p: Fraction):
        if lo <= p <= hi:
            pts.add(p)

    frames: list[Frame] = [ROOT]
    while frames:
        fr = frames.pop()
        tree = get_tree(fr.sigma, kmode)
        nodes = [tree.node(1, 1)]
        while nodes:
            node = nodes.pop()
            refine = False
            for mirrored in (False, True):
                ends = sorted(fr.to_x(1 - t if mirrored else t) for t in (node.c, node.d))
                if ends[1] < lo or ends[0] > hi:
                    continue
                for t in (node.c, node.a, node.b, node.d):
                    keep(fr.to_x(1 - t if mirrored else t))
                for kid in _children(fr, node, mirrored, kmode):
                    for p in (kid.u, kid.apex, kid.v):
                        keep(p)
                    if fr.gen + 1 <= max_gen and kid.v >= lo and kid.u <= hi:
                        if kid.contains(anchor) or kid.length >= detail:
                            frames.append(kid)
                if ends[0] <= anchor <= ends[1] or ends[1] - ends[0] >= detail:
                    refine = True
            if refine and node.m < level_limit:
                nodes += [tree.node(node.m + 1, 2 * node.p - 1), tree.node(node.m + 1, 2 * node.p)]
    pts.discard(anchor)
    return pts


@dataclass(frozen=True)
class ScaleRecord:
    scale: Fraction
    max_lb: Fraction
    min_ub: Fraction
    samples: int
    running_max_lb: Fraction
    running_min_ub: Fraction
    band_max_abs_lb: Fraction

    @property
    def max_abs_lb(self) -> Fraction:
        """Certified lower bound of the largest ``|quotient|`` in the window."""
        return max(self.max_lb, -self.min_ub)


@dataclass
class DiniScan:
    x: Fraction
    side: str
    records: list[ScaleRecord] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scale", "side", "max_lb", "min_ub", "samples"])
        for r in self.records:
            w.writerow([fmt(r.scale), self.side, fmt(r.max_lb), fmt(r.min_ub), r.samples])
        return buf.getvalue()


def dini_scan(
    x,
    side: str,
    scales,
    samples: int = 16,
    target: PLMap | None = None,
    eps=DEFAULT_QUOTIENT_EPS,
    max_gen: int = 4,
    level_limit: int = 10,
    kmode: str = "exact",
) -> DiniScan:
    """Bound one-sided difference quotients at ``x`` over shrinking windows.

    For each scale ``h`` the window is ``(x, x + h]`` (right) or ``[x - h, x)``
    (left).  Window bounds can only shrink with ``h``; ``band_max_abs_lb``
    covers just the probes farther out than the next scale, which is where
    growth toward finer scales shows.  ``target`` switches from ``f`` to a
    piecewise-linear map.
    """
    x = _unit(x, "x")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if samples < 1:
        raise ValueError("samples must be positive")
    scales = [as_rational(h) for h in scales]
    if not scales or any(h <= 0 for h in scales):
        raise ValueError("scales must be positive")
    if any(h1 >= h0 for h0, h1 in zip(scales, scales[1:])):
        raise ValueError("scales must be strictly decreasing")
    sign = 1 if side == "right" else -1
    far = x + sign * scales[0]
    if not ZERO <= far <= ONE:
        raise ValueError(f"window of scale {scales[0]} on the {side} of {x} leaves [0, 1]")

    lo, hi = (x, far) if sign > 0 else (far, x)
    if target is not None:
        structure = {p for p in target.breakpoints if lo <= p <= hi and p != x}
    else:
        structure = structural_points(x, lo, hi, scales[0] / samples, max_gen, level_limit, kmode)

    cache: dict[Fraction, Enclosure] = {}

    def q(y: Fraction) -> Enclosure:
        if y not in cache:
            cache[y] = quotient(x, y, eps, target, kmode).value
        return cache[y]

    scan = DiniScan(x, side)
    run_lb = run_ub = None
    for i, h in enumerate(scales):
        inner = scales[i + 1] if i + 1 < len(scales) else ZERO
        probes = {x + sign * h * k / samples for k in range(1, samples + 1)}
        probes |= {p for p in structure if 0 < sign * (p - x) <= h}
        values = {y: q(y) for y in probes}
        max_lb = max(v.lo for v in values.values())
        min_ub = min(v.hi for v in values.values())
        band = [v for y, v in values.items() if sign * (y - x) > inner]
        band_abs = max((max(v.lo, -v.hi) for v in band), default=ZERO)
        run_lb = max_lb if run_lb is None else max(run_lb, max_lb)
        run_ub = min_ub if run_ub is None else min(run_ub, min_ub)
        scan.records.append(ScaleRecord(h, max_lb, min_ub, len(values), run_lb, run_ub, band_abs))
    return scan


def morse_report(points, scales, threshold, samples: int = 16, target: PLMap | None = None, **scan_kw) -> dict:
    """Per point and side: is some certified ``|quotient|`` above ``threshold`` in the finest window?

    This is finite-scale evidence for infinite one-sided Dini derivatives, not a proof.
    """
    threshold = as_rational(threshold)
    scales = [as_rational(h) for h in scales]
    report: dict = {"threshold": fmt(threshold), "finest_scale": fmt(scales[-1]), "points": {}}
    all_flagged = True
    any_flagged = False
    for pt in points:
        pt = _unit(pt, "point")
        entry = {}
        for side in ("left", "right"):
            if (side == "left" and pt == 0) or (side == "right" and pt == 1):
                continue
            usable = [h for h in scales if ZERO <= pt + (h if side == "right" else -h) <= ONE]
            scan = dini_scan(pt, side, usable, samples, target, **scan_kw)
            finest = scan.records[-1]
            flagged = finest.max_abs_lb > threshold
            all_flagged &= flagged
            any_flagged |= flagged
            entry[side] = {"flagged": flagged, "max_abs_lb": fmt(finest.max_abs_lb), "scale": fmt(finest.scale)}
        report["points"][fmt(pt)] = entry
    report["all_flagged"] = all_flagged
    report["any_flagged"] = any_flagged
    return report
