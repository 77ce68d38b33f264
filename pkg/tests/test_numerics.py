from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bmorse.numerics import Enclosure, fmt, hull, normalize, parse_rational

from conftest import rationals


@pytest.mark.parametrize(
    "num, den, want",
    [(2, 4, F(1, 2)), (-3, -6, F(1, 2)), (0, 7, F(0))],
)
def test_normalize_examples(num, den, want):
    q = normalize(num, den)
    assert q == want
    assert q.denominator > 0


def test_normalize_zero_denominator():
    with pytest.raises(ValueError):
        normalize(1, 0)


def test_zero_serialises_with_unit_denominator():
    assert fmt(normalize(0, 7)) == "0/1"


@pytest.mark.parametrize(
    "a, b, want",
    [
        ((0, F(1, 4)), (F(1, 8), F(1, 2)), (0, F(1, 2))),
        ((F(1, 3), F(1, 3)), (F(1, 3), F(1, 3)), (F(1, 3), F(1, 3))),
        ((0, 0), (1, 1), (0, 1)),
    ],
)
def test_hull_examples(a, b, want):
    assert hull(Enclosure(*map(F, a)), Enclosure(*map(F, b))) == Enclosure(*map(F, want))


def test_empty_enclosure_rejected():
    with pytest.raises(ValueError):
        Enclosure(F(1), F(0))


@pytest.mark.parametrize("text, want", [("3/4", F(3, 4)), ("-6/4", F(-3, 2)), ("5", F(5)), (" 1/2 ", F(1, 2))])
def test_parse_rational(text, want):
    assert parse_rational(text) == want


@pytest.mark.parametrize("text", ["0.5", "1/0", "a/b", "", "1/2/3"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_enclosure_arithmetic():
    a = Enclosure(F(1, 4), F(1, 2))
    b = Enclosure(F(0), F(1, 8))
    assert a - b == Enclosure(F(1, 8), F(1, 2))
    assert a + b == Enclosure(F(1, 4), F(5, 8))
    assert a.scale(-2) == Enclosure(F(-1), F(-1, 2))
    assert str(a) == "[1/4, 1/2]"
    assert F(1, 3) in a and b not in a


@given(rationals, rationals)
def test_addition_round_trip(a, b):
    assert (a + b) - b == a


@given(rationals.filter(lambda q: q != 0))
def test_reciprocal(a):
    assert a * (1 / a) == 1


@given(rationals)
def test_format_round_trip(q):
    assert parse_rational(fmt(q)) == q


enclosures = st.tuples(rationals, rationals).map(lambda p: Enclosure.spanning(*p))


@given(enclosures, enclosures)
def test_hull_commutative(a, b):
    assert hull(a, b) == hull(b, a)


@given(enclosures, enclosures, enclosures)
def test_hull_associative(a, b, c):
    assert hull(hull(a, b), c) == hull(a, hull(b, c))


@given(enclosures)
def test_hull_idempotent(a):
    assert hull(a, a) == a


@given(enclosures, enclosures)
def test_hull_is_smallest_cover(a, b):
    h = hull(a, b)
    assert a in h and b in h
    assert h.lo in (a.lo, b.lo) and h.hi in (a.hi, b.hi)
