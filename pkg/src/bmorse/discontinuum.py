"""Irregular Cantor staircases on ``[0, 1/2]``.

For a positive integer ``sigma`` the interval ``[0, 1/2]`` is split level by
level: every surviving closed interval ``[c, d]`` at level ``m`` loses an open
middle piece ``(a, b)``.

* odd ``m``: ``b`` is the midpoint of ``[c, d]`` and ``(b - a)/(d - c)`` is
  ``1/2 - 2**-(m + sigma)``;
* even ``m``: ``a - c = d - b = (d - c)/K(m)`` for the level's expansion
  factor ``K(m)``.

The staircase is constant on every removed interval, with the plateau chosen
so the chord from ``(c, f(c))`` to ``(b, plateau)`` has the same slope as the
chord over the whole interval.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from bmorse.errors import ConstructionError, ResourceLimitError
from bmorse.numerics import HALF, ONE, ZERO, Enclosure, as_rational, fmt

KMODES = ("exact", "ceil")
DEFAULT_LEVEL_CUTOFF = 64


@dataclass(frozen=True)
class StaircaseNode:
    m: int
    p: int
    c: Fraction
    a: Fraction
    b: Fraction
    d: Fraction
    vc: Fraction
    plateau: Fraction
    vd: Fraction

    @property
    def length(self) -> Fraction:
        return self.d - self.c

    @property
    def gap(self) -> Fraction:
        """Rise of the staircase across ``[c, d]``."""
        return self.vd - self.vc

    @property
    def ratio(self) -> Fraction:
        return self.gap / self.length

    @property
    def removed(self) -> tuple[Fraction, Fraction]:
        return self.a, self.b

    def children(self) -> tuple[tuple[Fraction, Fraction, Fraction, Fraction], ...]:
        """The two next-level intervals as ``(c, d, vc, vd)``."""
        return (self.c, self.a, self.vc, self.plateau), (self.b, self.d, self.plateau, self.vd)


def _k_from_ratio(max_ratio: Fraction, kmode: str) -> Fraction:
    exact = 1 + 2 * max_ratio
    if kmode == "exact":
        return exact
    # smallest power of two >= exact
    k = 0
    while Fraction(2**k) < exact:
        k += 1
    return Fraction(2**k)


class StaircaseTree:
    """Lazily deepened tree of staircase nodes for one ``sigma``.

    Nodes are created on demand by :meth:`node`; ``depth`` counts the levels
    that have been fully materialised by :meth:`deepen`. Creating nodes and
    expansion factors happens under a lock, reads of existing nodes do not.
    """

    def __init__(self, sigma: int, kmode: str = "exact"):
        if sigma < 1:
            raise ValueError("sigma must be a positive integer")
        if kmode not in KMODES:
            raise ValueError(f"unknown kmode {kmode!r}")
        self.sigma = sigma
        self.kmode = kmode
        self.depth = 0
        self._nodes: dict[tuple[int, int], StaircaseNode] = {}
        self._k: dict[int, Fraction] = {}
        self._lock = threading.RLock()

    def __repr__(self) -> str:
        return f"StaircaseTree(sigma={self.sigma}, kmode={self.kmode!r}, depth={self.depth})"

    @property
    def kfactors(self) -> dict[int, Fraction]:
        return dict(self._k)

    @property
    def levels(self) -> list[list[StaircaseNode]]:
        return [self.level(m) for m in range(1, self.depth + 1)]

    def level(self, m: int) -> list[StaircaseNode]:
        return [self.node(m, p) for p in range(1, 2 ** (m - 1) + 1)]

    def node(self, m: int, p: int) -> StaircaseNode:
        key = (m, p)
        found = self._nodes.get(key)
        if found is not None:
            return found
        if m < 1 or not 1 <= p <= 2 ** (m - 1):
            raise ValueError(f"no node ({m}, {p})")
        with self._lock:
            found = self._nodes.get(key)
            if found is None:
                found = self._make_node(m, p)
                self._nodes[key] = found
            return found

    def _make_node(self, m: int, p: int) -> StaircaseNode:
        if m == 1:
            c, d, vc, vd = ZERO, HALF, ZERO, ONE
        else:
            parent = self.node(m - 1, (p + 1) // 2)
            c, d, vc, vd = parent.children()[(p + 1) % 2]
        length = d - c
        if m % 2:
            b = (c + d) / 2
            a = b - length * (HALF - Fraction(1, 2 ** (m + self.sigma)))
        else:
            margin = length / self.k(m)
            a, b = c + margin, d - margin
        plateau = vc + (b - c) / length * (vd - vc)
        return StaircaseNode(m, p, c, a, b, d, vc, plateau, vd)

    def k(self, m: int) -> Fraction:
        """Expansion factor ``K(m) = 2**k_sigma(m)`` for even ``m``."""
        if m < 2 or m % 2:
            raise ValueError(f"expansion factor is defined for even m >= 2, got {m}")
        found = self._k.get(m)
        if found is not None:
            return found
        with self._lock:
            if m not in self._k:
                # Splitting never lowers a rise/length ratio ([b, d] keeps it,
                # [c, a] multiplies it), so the leftmost interval is the steepest.
                c, d, vc, vd = self.node(m - 1, 1).children()[0]
                k = _k_from_ratio((vd - vc) / (d - c), self.kmode)
                prev = self.k(m - 2) if m > 2 else None
                if prev is not None and not k > prev:
                    raise ConstructionError(
                        f"K({m}) = {k} does not exceed K({m - 2}) = {prev} for sigma={self.sigma}"
                    )
                self._k[m] = k
            return self._k[m]

    def deepen(self, depth: int) -> None:
        """Materialise every level up to ``depth`` and check the level rules."""
        with self._lock:
            for m in range(self.depth + 1, depth + 1):
                if m % 2 == 0:
                    intervals = [iv for n in self.level(m - 1) for iv in n.children()]
                    brute = max((vd - vc) / (d - c) for c, d, vc, vd in intervals)
                    if self.k(m) != _k_from_ratio(brute, self.kmode):
                        raise ConstructionError(f"K({m}) disagrees with the level maximum")
                self.level(m)
                self.depth = m

    def locate_node(self, s: Fraction, m: int) -> StaircaseNode | None:
        """Level-``m`` node whose closed interval holds ``s`` (``None`` if removed earlier)."""
        node = self.node(1, 1)
        if not node.c <= s <= node.d:
            raise ValueError("s outside [0, 1/2]")
        for level in range(1, m):
            if s <= node.a:
                node = self.node(level + 1, 2 * node.p - 1)
            elif s >= node.b:
                node = self.node(level + 1, 2 * node.p)
            else:
                return None
        return node

    def to_json(self) -> dict:
        return {
            "sigma": self.sigma,
            "kmode": self.kmode,
            "levels": [
                {
                    "m": m,
                    "nodes": [
                        {key: fmt(getattr(n, key)) for key in ("c", "a", "b", "d", "vc", "plateau", "vd")}
                        for n in self.level(m)
                    ],
                }
                for m in range(1, self.depth + 1)
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


@lru_cache(maxsize=None)
def get_tree(sigma: int, kmode: str = "exact") -> StaircaseTree:
    """Process-wide shared tree for ``(sigma, kmode)``."""
    return StaircaseTree(sigma, kmode)


def build_staircase(sigma: int, depth: int, kmode: str = "exact") -> StaircaseTree:
    if depth < 1:
        raise ValueError("depth must be positive")
    tree = StaircaseTree(sigma, kmode)
    tree.deepen(depth)
    return tree


def expansion_factor(tree: StaircaseTree, m: int) -> Fraction:
    if m % 2 or m < 2 or m > tree.depth:
        raise ValueError(f"m={m} must be even and within built depth {tree.depth}")
    return tree.k(m)


def staircase_eval(
    tree: StaircaseTree,
    s: Fraction | int,
    eps: Fraction | int,
    level_cutoff: int = DEFAULT_LEVEL_CUTOFF,
) -> Enclosure:
    """Enclosure of the symmetric staircase at ``s`` in ``[0, 1]`` of width ``<= eps``.

    The descent always runs through the tree's built depth, so points of
    removed intervals and node endpoints within that depth come out exact
    whatever ``eps`` is; past the built depth it stops once the value gap
    fits in ``eps``.
    """
    s, eps = as_rational(s), as_rational(eps)
    if not ZERO <= s <= ONE:
        raise ValueError("s outside [0, 1]")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if s > HALF:
        s = 1 - s
    node = tree.node(1, 1)
    while True:
        if s == node.c:
            return Enclosure.point(node.vc)
        if s == node.d:
            return Enclosure.point(node.vd)
        if node.a <= s <= node.b:
            return Enclosure.point(node.plateau)
        if node.gap <= eps and node.m >= tree.depth:
            return Enclosure(node.vc, node.vd)
        if node.m >= level_cutoff:
            raise ResourceLimitError(f"staircase descent passed level {level_cutoff}")
        node = tree.node(node.m + 1, 2 * node.p - (s < node.a))


def survivor_length(tree: StaircaseTree, M: int) -> Fraction:
    """Total length of the ``2**M`` intervals left after removing levels ``1..M``."""
    if M < 0 or M > tree.depth:
        raise ValueError(f"M={M} outside built depth {tree.depth}")
    if M == 0:
        return HALF
    return sum(((n.a - n.c) + (n.d - n.b) for n in tree.level(M)), ZERO)


def survivor_factor(tree: StaircaseTree, m: int) -> Fraction:
    """Fraction of each level-``m`` interval that survives the level-``m`` removal."""
    if m % 2:
        return HALF + Fraction(1, 2 ** (m + tree.sigma))
    return 2 / tree.k(m)


def check_node(tree: StaircaseTree, node: StaircaseNode) -> list[str]:
    """Exact invariant violations of one node (empty when all hold)."""
    bad = []
    if not node.c < node.a < node.b < node.d:
        bad.append("endpoints not ordered c < a < b < d")
    if node.m % 2:
        if node.b != (node.c + node.d) / 2:
            bad.append("center property")
        if (node.b - node.a) / node.length != HALF - Fraction(1, 2 ** (node.m + tree.sigma)):
            bad.append("removed-length ratio")
    else:
        k = tree.k(node.m)
        if node.a - node.c != node.length / k or node.d - node.b != node.length / k:
            bad.append("even margins")
        if not k > 4:
            bad.append("K <= 4")
        slope_to_a = (node.vd - node.plateau) / (node.d - node.a)
        if not ZERO < slope_to_a <= HALF:
            bad.append("slope from a to d outside (0, 1/2]")
    if (node.plateau - node.vc) / (node.b - node.c) != node.gap / node.length:
        bad.append("chord-slope equality")
    if not node.vc < node.plateau < node.vd:
        bad.append("plateau not strictly inside value gap")
    if node.gap < 2 * node.length:
        bad.append("rise/length ratio below 2")
    return bad
