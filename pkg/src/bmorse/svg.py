"""Standalone SVG polylines of graphs over the unit square."""

from __future__ import annotations

from collections.abc import Iterable
from fractions import Fraction


def _num(q: Fraction) -> str:
    return f"{float(q):.9g}"


def polyline_svg(points: Iterable[tuple[Fraction, Fraction]], size: int = 800) -> str:
    """Graph through ``points`` in a ``0 0 1 1`` view box, y pointing up."""
    coords = " ".join(f"{_num(x)},{_num(1 - y)}" for x, y in points)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 1 1">\n'
        '  <rect x="0" y="0" width="1" height="1" fill="white" stroke="#bbbbbb" '
        'stroke-width="1" vector-effect="non-scaling-stroke"/>\n'
        f'  <polyline fill="none" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke" points="{coords}"/>\n'
        "</svg>\n"
    )
