import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from finitude.arith import CongruenceClass, crt, ext_gcd, solve_linear_congruence


def test_ext_gcd_examples():
    assert ext_gcd(6, 4) == (2, 1, -1)
    assert ext_gcd(0, 0) == (0, 0, 0)
    assert ext_gcd(5, 3) == (1, -1, 2)


@given(st.integers(-10**12, 10**12), st.integers(-10**12, 10**12))
def test_ext_gcd_identity(a, b):
    g, u, v = ext_gcd(a, b)
    assert g == math.gcd(a, b)
    assert u * a + v * b == g
    assert g >= 0
    if g:
        assert a % g == 0 and b % g == 0


def test_congruence_class_normalizes_residue():
    assert CongruenceClass(4, 7).residue == 3
    assert CongruenceClass(4, -1).residue == 3
    assert 7 in CongruenceClass(4, 3)
    with pytest.raises(ValueError):
        CongruenceClass(0, 0)


def test_solve_linear_congruence_examples():
    assert solve_linear_congruence(2, 1, 4) is None
    assert solve_linear_congruence(3, 0, 4) == CongruenceClass(4, 0)
    assert solve_linear_congruence(2, 2, 4) == CongruenceClass(2, 1)


@given(
    st.integers(-100, 100),
    st.integers(-100, 100),
    st.integers(1, 120),
)
def test_solve_linear_congruence_vs_enumeration(coeff, const, modulus):
    result = solve_linear_congruence(coeff, const, modulus)
    brute = {x for x in range(modulus) if (coeff * x + const) % modulus == 0}
    if result is None:
        assert brute == set()
    else:
        assert brute == set(range(result.residue, modulus, result.modulus))


def test_crt_examples():
    assert crt([CongruenceClass(2, 1), CongruenceClass(3, 2)]) == CongruenceClass(6, 5)
    assert crt([CongruenceClass(2, 0), CongruenceClass(2, 1)]) is None
    assert crt([]) == CongruenceClass(1, 0)


classes = st.builds(
    CongruenceClass, st.integers(1, 40), st.integers(0, 10**6)
)


@given(st.lists(classes, min_size=1, max_size=3))
def test_crt_vs_enumeration(cs):
    result = crt(cs)
    total = math.lcm(*(c.modulus for c in cs))
    brute = {x for x in range(total) if all(x in c for c in cs)}
    if result is None:
        assert brute == set()
    else:
        assert result.modulus == total
        assert brute == set(range(result.residue, total, result.modulus))


@given(st.lists(classes, min_size=2, max_size=4), st.randoms(use_true_random=False))
def test_crt_order_insensitive(cs, rng):
    shuffled = list(cs)
    rng.shuffle(shuffled)
    assert crt(shuffled) == crt(cs)
