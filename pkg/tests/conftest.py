from fractions import Fraction

from hypothesis import strategies as st

from bmorse.plmap import build_g, tent

# maps whose measure preservation is checked exactly; built once per session
_MAPS: dict = {}


def verified_map(n: int, cutoff: int):
    key = (n, cutoff)
    if key not in _MAPS:
        _MAPS[key] = tent() if n == 0 else build_g(n, cutoff)
    return _MAPS[key]


VERIFIED_SCHEDULES = [(0, 1)] + [(1, c) for c in range(1, 6)] + [(2, c) for c in range(1, 4)]

rationals = st.fractions(max_denominator=10**6).filter(lambda q: abs(q) < 10**6)
unit_rationals = st.fractions(min_value=0, max_value=1, max_denominator=10**6)


def f(num, den=1):
    return Fraction(num, den)
