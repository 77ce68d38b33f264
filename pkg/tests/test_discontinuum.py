import json
import threading
from fractions import Fraction as F
from math import prod

import pytest
from hypothesis import given, settings

from bmorse.discontinuum import (
    StaircaseTree,
    build_staircase,
    check_node,
    expansion_factor,
    get_tree,
    staircase_eval,
    survivor_factor,
    survivor_length,
)
from bmorse.errors import ConstructionError
from bmorse.numerics import Enclosure

from conftest import unit_rationals

DEPTH = 8


@pytest.fixture(scope="module", params=[1, 2, 4])
def tree(request):
    return build_staircase(request.param, DEPTH)


@pytest.fixture(scope="module")
def tree1():
    return build_staircase(1, DEPTH)


def reference_levels(sigma, depth):
    """Straight transcription of the removal rules, one whole level at a time."""
    intervals = [(F(0), F(1, 2), F(0), F(1))]
    out = []
    for m in range(1, depth + 1):
        if m % 2 == 0:
            k = 1 + 2 * max((vd - vc) / (d - c) for c, d, vc, vd in intervals)
        level, nxt = [], []
        for c, d, vc, vd in intervals:
            if m % 2:
                b = (c + d) / 2
                a = b - (d - c) * (F(1, 2) - F(1, 2 ** (m + sigma)))
            else:
                a, b = c + (d - c) / k, d - (d - c) / k
            w = vc + (b - c) / (d - c) * (vd - vc)
            level.append((c, a, b, d, vc, w, vd))
            nxt += [(c, a, vc, w), (b, d, w, vd)]
        out.append(level)
        intervals = nxt
    return out


def test_matches_reference_construction(tree):
    ref = reference_levels(tree.sigma, 6)
    for m, level in enumerate(ref, start=1):
        got = [(n.c, n.a, n.b, n.d, n.vc, n.plateau, n.vd) for n in tree.level(m)]
        assert got == level


def test_every_node_satisfies_the_level_rules(tree):
    for level in tree.levels:
        for node in level:
            assert check_node(tree, node) == [], (node.m, node.p)


def test_levels_tile_the_half_interval(tree):
    for m in range(1, DEPTH + 1):
        level = tree.level(m)
        assert level[0].c == 0 and level[-1].d == F(1, 2)
        for left, right in zip(level, level[1:]):
            assert left.d < right.c
            assert left.vd <= right.vc


def test_values_are_monotone_across_each_level(tree):
    for level in tree.levels:
        vals = [v for n in level for v in (n.vc, n.plateau, n.vd)]
        assert vals == sorted(vals)
    assert staircase_eval(tree, 0, F(1, 2**30)).is_exact
    assert staircase_eval(tree, F(1, 2), 1) == staircase_eval(tree, F(1, 2), F(1, 10**9))
    assert staircase_eval(tree, F(1, 2), 1).lo == 1


def test_first_levels_sigma_one(tree1):
    r11 = tree1.node(1, 1)
    assert (r11.a, r11.b, r11.plateau) == (F(1, 8), F(1, 4), F(1, 2))
    r21 = tree1.node(2, 1)
    assert (r21.c, r21.d) == (0, F(1, 8))
    assert (r21.a, r21.b, r21.plateau) == (F(1, 72), F(1, 9), F(4, 9))
    r31 = tree1.node(3, 1)
    assert (r31.c, r31.d) == (0, F(1, 72))
    assert (r31.a, r31.b, r31.plateau) == (F(1, 1152), F(1, 144), F(2, 9))
    assert r31.b - r31.a == F(7, 1152)


def test_k2_sigma_one(tree1):
    assert expansion_factor(tree1, 2) == 9


def test_k_strictly_increasing(tree):
    ks = [expansion_factor(tree, m) for m in range(2, DEPTH + 1, 2)]
    assert all(k1 > k0 for k0, k1 in zip(ks, ks[1:]))
    assert ks[1] > 9 or tree.sigma != 1


def test_k_equals_level_maximum(tree):
    for m in range(2, DEPTH + 1, 2):
        intervals = [iv for n in tree.level(m - 1) for iv in n.children()]
        brute = 1 + 2 * max((vd - vc) / (d - c) for c, d, vc, vd in intervals)
        assert tree.k(m) == brute


def test_k2_sigma_two():
    t = build_staircase(2, 2)
    r = t.node(1, 1)
    # the steeper of the two level-2 intervals is the left one
    assert expansion_factor(t, 2) == 1 + 2 * max(r.plateau / r.a, (1 - r.plateau) / (F(1, 2) - r.b))


@pytest.mark.parametrize("m", [1, 3, 10])
def test_expansion_factor_rejects(tree1, m):
    with pytest.raises(ValueError):
        expansion_factor(tree1, m)


def test_k_must_increase(monkeypatch):
    t = StaircaseTree(1)
    monkeypatch.setattr("bmorse.discontinuum._k_from_ratio", lambda ratio, kmode: F(9))
    with pytest.raises(ConstructionError):
        t.k(4)


@pytest.mark.parametrize("M, want", [(0, F(1, 2)), (1, F(3, 8)), (2, F(1, 12))])
def test_survivor_length_examples(tree1, M, want):
    assert survivor_length(tree1, M) == want


def test_survivor_length_oracles(tree):
    removed = F(0)
    for M in range(1, DEPTH + 1):
        removed += sum(n.b - n.a for n in tree.level(M))
        s = survivor_length(tree, M)
        assert s == F(1, 2) - removed
        assert s == F(1, 2) * prod(survivor_factor(tree, m) for m in range(1, M + 1))


def test_survivor_length_beyond_depth(tree1):
    with pytest.raises(ValueError):
        survivor_length(tree1, DEPTH + 1)


def test_leftmost_length_bounds(tree):
    k = {i: tree.k(2 * i) for i in range(1, DEPTH // 2 + 1)}
    for j in range(0, (DEPTH - 1) // 2 + 1):
        r = tree.node(2 * j + 1, 1)
        bound = F(1, 2 ** (2 + j * j + j) * prod(k[i] for i in range(1, j + 1)))
        assert r.b - r.a <= bound <= F(1, 2 ** (2 * j + 1))
    for j in range(1, DEPTH // 2 + 1):
        r = tree.node(2 * j, 1)
        bound = F(1, 2 ** (1 + j * j + j) * prod(k[i] for i in range(1, j)))
        assert r.b - r.a <= bound <= F(1, 2 ** (2 * j))


def test_r31_length_bound(tree1):
    r = tree1.node(3, 1)
    assert r.b - r.a == F(7, 1152) <= F(1, 4 * 4 * 9) <= F(1, 8)


@pytest.mark.parametrize(
    "s, want",
    [(F(0), F(0)), (F(3, 16), F(1, 2)), (1 - F(1, 18), F(4, 9)), (F(1, 8), F(1, 2)), (F(1, 72), F(4, 9))],
)
def test_staircase_eval_examples(tree1, s, want):
    for eps in (F(1), F(1, 2**40)):
        assert staircase_eval(tree1, s, eps) == Enclosure.point(want)


@settings(max_examples=200, deadline=None)
@given(unit_rationals, unit_rationals)
def test_staircase_eval_width_and_nesting(s, e):
    tree = get_tree(1)
    eps = F(1, 2**30) + e / 4
    wide = staircase_eval(tree, s, eps)
    narrow = staircase_eval(tree, s, eps / 7)
    assert wide.width <= eps
    assert narrow in wide
    assert staircase_eval(tree, 1 - s, eps / 7) == narrow


@settings(max_examples=100, deadline=None)
@given(unit_rationals, unit_rationals)
def test_staircase_is_nondecreasing_on_left_half(s, t):
    tree = get_tree(2)
    s, t = sorted((s / 2, t / 2))
    eps = F(1, 2**20)
    assert staircase_eval(tree, s, eps).lo <= staircase_eval(tree, t, eps).hi


def test_staircase_eval_argument_errors(tree1):
    with pytest.raises(ValueError):
        staircase_eval(tree1, F(3, 2), F(1))
    with pytest.raises(ValueError):
        staircase_eval(tree1, F(1, 3), F(0))


def test_json_dump(tree1):
    data = json.loads(build_staircase(1, 2).dumps())
    assert data["sigma"] == 1 and data["kmode"] == "exact"
    assert [lv["m"] for lv in data["levels"]] == [1, 2]
    assert data["levels"][0]["nodes"][0] == {
        "c": "0/1", "a": "1/8", "b": "1/4", "d": "1/2", "vc": "0/1", "plateau": "1/2", "vd": "1/1",
    }
    assert data["levels"][1]["nodes"][0]["a"] == "1/72"


def test_ceil_mode_rounds_up_to_powers_of_two():
    t = build_staircase(1, 6, "ceil")
    assert t.k(2) == 16
    for m in (2, 4, 6):
        k = t.k(m)
        assert k.denominator == 1 and k.numerator & (k.numerator - 1) == 0
    for level in t.levels:
        for node in level:
            assert check_node(t, node) == []


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        StaircaseTree(0)
    with pytest.raises(ValueError):
        StaircaseTree(1, "floor")
    with pytest.raises(ValueError):
        build_staircase(1, 0)


def test_concurrent_lazy_nodes_agree():
    t = StaircaseTree(3)
    seen = [[] for _ in range(8)]

    def work(i):
        for m in range(1, 9):
            seen[i].append(t.node(m, 1 + (i * 7) % 2 ** (m - 1)))

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    ref = build_staircase(3, 8)
    for i, nodes in enumerate(seen):
        for n in nodes:
            assert n is t.node(n.m, n.p)
            assert n == ref.node(n.m, n.p)
