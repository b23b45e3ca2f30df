from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_roots import PadicNumber, PadicPolynomial
from padic_roots.catalog import get_catalog
from padic_roots.errors import DivisionByIndistinguishableZero
from padic_roots.extension import (dist_to_base, index_of_generated_order, min_poly_degree, norm_and_valuation,
                                   norm_map)
from padic_roots.padic import reverse_poly
from padic_roots.qvalue import QValue


def unram(p):
    return get_catalog(p).fields(2, 2)[0]


def field(p, label):
    return get_catalog(p).by_label(label)


# ---- arithmetic ----

def test_unit_product():
    x = PadicNumber.from_rational(2, 3) * PadicNumber.from_rational(2, 5)
    assert x.to_fraction() == 15 and x.valuation == 0


def test_sum_gains_valuation():
    x = PadicNumber.from_rational(2, 2) + PadicNumber.from_rational(2, 2)
    assert x.to_fraction() == 4 and x.valuation == 2


def test_uniformizer_square_p5():
    K = field(5, "Q5[x^2-5]")
    theta = K.generator()
    assert theta.valuation() == Fraction(1, 2)
    sq = theta * theta
    assert sq.valuation() == 1
    assert sq.coords[1] == 0 and sq.coords[0] * 5 ** sq.shift % 5 ** 40 == 5


def test_division_by_zero_flagged():
    with pytest.raises(DivisionByIndistinguishableZero):
        PadicNumber.from_rational(3, 1) / PadicNumber.zero(3)


def test_division_loses_precision():
    x = PadicNumber.from_rational(2, 1, prec=20)
    y = PadicNumber.from_rational(2, 8, prec=20)
    z = x / y
    assert z.valuation == -3 and z.absprec <= x.absprec - y.valuation


# ---- valuations, norms, distances ----

def test_norm_and_valuation_examples():
    Z4 = unram(2)
    zeta = Z4.generator()
    assert norm_and_valuation(zeta * 2)[0] == 1
    assert (zeta * 2).norm() == QValue(2, Fraction(1, 2))
    R = field(2, "Q2[x^2+2x-2]")
    pi = R.generator()
    assert norm_and_valuation(pi)[0] == Fraction(1, 2)
    assert pi.norm() == QValue(2, 1, Fraction(-1, 2))
    assert norm_and_valuation(pi + 1)[0] == 0


def test_norm_map_examples():
    K = get_catalog(3).fields(3)[0]
    assert norm_map(K.element((3,))).to_fraction() == 27
    R = field(2, "Q2[x^2+2x-2]")
    assert (norm_map(R.generator()) + 2).is_zero()
    assert norm_map(unram(2).generator()).norm() == 1


def test_dist_to_base_examples():
    Z4 = unram(2)
    assert dist_to_base(Z4.generator() * 2) == QValue(2, Fraction(1, 2))
    assert dist_to_base(Z4.element((7,))).is_zero()
    R = field(2, "Q2[x^2+2x-2]")
    assert dist_to_base(R.generator() + 1) == QValue(2, 1, Fraction(-1, 2))


def test_index_examples():
    Z4 = unram(2)
    zeta = Z4.generator()
    assert index_of_generated_order(zeta).exponent == 0
    assert index_of_generated_order(zeta * 2).exponent == 1
    # a + pi^v u in a totally ramified prime-degree field, v prime to r: q^((v-1)(r-1)/2)
    for p, label, r in ((2, "Q2[x^2-2]", 2), (3, "Q3[x^3+3]", 3), (5, "Q5[x^3-5]", 3)):
        K = field(p, label)
        pi = K.generator()
        for v in (1, 2, 4, 5, 7):
            if v % r == 0:
                continue
            x = pi ** v * (1 + pi) + 7
            assert index_of_generated_order(x).exponent == (v - 1) * (r - 1) // 2


def test_min_poly_degree_examples():
    Z4 = unram(2)
    assert min_poly_degree(Z4.element((5,))) == 1
    assert min_poly_degree(Z4.generator()) == 2


def test_reverse_poly_examples():
    P = PadicPolynomial(2, (0, 1))
    assert reverse_poly(P, 1).coeffs == (1, 0)
    assert reverse_poly(PadicPolynomial(2, (1, 2)), 1).coeffs == (2, 1)


def test_reverse_poly_maps_large_roots_to_small():
    # 4x^2 - 33x + 8 has roots 8 and 1/4; the reversal 8x^2 - 33x + 4 has roots 1/8 and 4
    P = PadicPolynomial.from_rationals(2, [8, -33, 4])
    rev = reverse_poly(P)
    M = 2 ** 48
    assert [c % M for c in rev.coeffs] == [4, (-33) % M, 8]


# ---- properties ----

coords = st.integers(min_value=1, max_value=2 ** 20)


@settings(max_examples=200)
@given(st.sampled_from([2, 3, 5]), coords, coords, coords, coords)
def test_ultrametric_and_multiplicative(p, a, b, c, d):
    for K in get_catalog(p).fields(2):
        x, y = K.element((a, b)), K.element((c, d))
        vx, vy = x.valuation(), y.valuation()
        assert (x * y).valuation() == vx + vy
        s = x + y
        if not s.is_zero():
            vs = s.valuation()
            assert vs >= min(vx, vy)
            if vx != vy:
                assert vs == min(vx, vy)


@settings(max_examples=200)
@given(st.sampled_from([2, 3, 5]), coords, coords, coords)
def test_norm_map_matches_norm(p, a, b, c):
    for K in get_catalog(p).fields(3):
        x = K.element((a, b, c))
        assert norm_map(x).norm() == (x.norm() ** K.r).to_fraction()


def _brute_dist(x, k):
    K = x.parent
    p = K.p
    best = None
    for a in range(p ** k):
        y = x - a
        if y.is_zero():
            continue
        v = y.valuation()
        best = v if best is None or v > best else best
    return best


@pytest.mark.parametrize("p", [2, 3, 5])
def test_dist_scan_matches_brute_force(p, rng):
    """dist_to_base equals the best approximation by base residues mod p^k."""
    k = {2: 6, 3: 4, 5: 3}[p]
    cases = 0
    for K in get_catalog(p).all_fields()[1:]:
        for _ in range(1000 // len(get_catalog(p).all_fields()[1:]) + 1):
            cs = [rng.randrange(p ** k) for _ in range(K.r)]
            cs[1] = cs[1] or 1
            x = K.element(cs)
            d = dist_to_base(x)
            best = _brute_dist(x, k)
            assert d == QValue.norm(p, best)
            cases += 1
    assert cases >= 1000 // 1


@settings(max_examples=300)
@given(st.sampled_from([2, 3, 5]), coords, coords, st.integers(0, 10 ** 6))
def test_index_translation_invariant(p, a, b, t):
    for K in get_catalog(p).fields(2):
        x = K.element((a, b))
        i1 = index_of_generated_order(x)
        i2 = index_of_generated_order(x + t)
        assert i1 == i2


@settings(max_examples=300)
@given(st.sampled_from([2, 3, 5]), coords, coords)
def test_index_inversion_invariant(p, a, b):
    for K in get_catalog(p).fields(2):
        x = K.element((a, b))
        if x.is_zero() or x.valuation() != 0:
            continue
        assert index_of_generated_order(x) == index_of_generated_order(1 / x)
