import random
from fractions import Fraction

import pytest

from padic_roots import PadicNumber, PadicPolynomial
from padic_roots.catalog import get_catalog, unramified_extension
from padic_roots.errors import DegenerateRoot
from padic_roots.extension import dist_to_base
from padic_roots.padic import reverse_poly
from padic_roots.qvalue import QValue
from padic_roots.roots import (NEW, OLD, classify_etale, count_roots, kac_rice_estimate, monomial_kac_rice_value,
                               multiplicity_weight, square_class, stable_s)


def poly(p, coeffs, N=48):
    return PadicPolynomial.from_rationals(p, coeffs, N)


def test_x2_minus_1_odd():
    for p in (3, 5, 7):
        rs = count_roots(poly(p, [-1, 0, 1]), get_catalog(p).base)
        assert rs.count() == 2
        assert all(r.certified and r.multiplicity == 1 for r in rs)
        vals = sorted(int(r.location.coeffs[0].to_fraction()) % p ** 30 for r in rs)
        assert vals == [1, p ** 30 - 1]


def test_x2_plus_1_p2():
    P = poly(2, [1, 0, 1])
    assert count_roots(P, get_catalog(2).base).count() == 0
    # Q_2(sqrt(-1)) is the ramified field with discriminant class -1 (x^2 + 2x + 2 has roots -1 +- i)
    K = [K for K in get_catalog(2).fields(2) if K.label == "Q2[x^2+2x+2]"][0]
    rs = count_roots(P, K)
    assert rs.count(new_only=True) == 2


def test_x2_minus_2_p2():
    K = get_catalog(2).by_label("Q2[x^2-2]")
    rs = count_roots(poly(2, [-2, 0, 1]), K)
    assert rs.count(new_only=True) == 2
    for r in rs:
        assert dist_to_base(r.location) == QValue(2, 1, Fraction(-1, 2))


def test_roots_outside_ring():
    # 4x^2 - 33x + 8 = (4x - 1)(x - 8): 8 lies in Z_2, 1/4 has norm 4
    rs = count_roots(poly(2, [8, -33, 4]), get_catalog(2).base)
    assert rs.count(in_ring=True) == 1 and rs.count(in_ring=False) == 1
    outside = [r for r in rs if not r.in_ring][0]
    assert outside.location.valuation() == -2


def test_multiplicity_weight():
    assert multiplicity_weight(1, 2) == 1
    assert multiplicity_weight(2, 2) == Fraction(2, 3)
    assert abs(multiplicity_weight(60, 3) - Fraction(2, 3)) < Fraction(1, 3 ** 50)


def test_kac_rice_x():
    assert kac_rice_estimate(poly(2, [0, 1]), get_catalog(2).base, 3) == 1


def test_kac_rice_x_squared():
    for p in (3, 5):
        K = get_catalog(p).base
        P = poly(p, [0, 0, 1])
        for s in (4, 6, 8):
            assert kac_rice_estimate(P, K, s, check_degenerate=False) == Fraction(p, p + 1)


def test_kac_rice_rejects_double_root():
    with pytest.raises(DegenerateRoot):
        kac_rice_estimate(poly(3, [1, -2, 1]), get_catalog(3).base, 5)


def test_monomial_values():
    # coprime multiplicities match the weight exactly
    for p in (2, 3):
        for K in (get_catalog(p).base, unramified_extension(p, 2)):
            Q = p ** K.f
            for mu in range(1, 5):
                if mu % p:
                    assert monomial_kac_rice_value(mu, K) == multiplicity_weight(mu, Q)
                s = 2 * mu
                P = poly(p, [0] * mu + [1])
                assert kac_rice_estimate(P, K, s, check_degenerate=False) == monomial_kac_rice_value(mu, K)


def _random_separable(p, n, rng, N=48):
    while True:
        c = [rng.randrange(p ** N) for _ in range(n + 1)]
        P = PadicPolynomial(p, tuple(c), N)
        if c[-1] % p ** N:
            return P


@pytest.mark.parametrize("p", [2, 3, 5])
def test_kac_rice_matches_count_roots(p):
    rng = random.Random(p)
    fields = [get_catalog(p).base] + list(get_catalog(p).fields(2))
    for i in range(150):
        K = fields[i % len(fields)]
        P = _random_separable(p, rng.randint(1, 5), rng)
        rs = count_roots(P, K, locate=False)
        if rs.degenerate:
            continue
        s = stable_s(P, K)
        assert kac_rice_estimate(P, K, s) == rs.count(in_ring=True)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_reversal_consistency(p):
    """Roots of P of norm > 1 match the nonzero roots of the reversal in the maximal ideal."""
    rng = random.Random(10 + p)
    for K in get_catalog(p).all_fields()[:4]:
        for _ in range(30):
            P = _random_separable(p, 4, rng)
            rs = count_roots(P, K, locate=False)
            rev = count_roots(reverse_poly(P), K)
            small = sum(1 for r in rev if r.in_ring and r.certified and r.location.valuation() > 0)
            assert rs.count(in_ring=False) == small


@pytest.mark.parametrize("p", [2, 3, 5])
def test_prime_degree_new_iff_off_base(p):
    rng = random.Random(20 + p)
    for K in get_catalog(p).fields(2) + get_catalog(p).fields(3):
        for _ in range(15):
            P = _random_separable(p, 4, rng)
            for r in count_roots(P, K):
                if r.certified and r.location is not None:
                    off = not dist_to_base(r.location).is_zero()
                    assert (r.is_new == NEW) == off


@pytest.mark.parametrize("p", [2, 5])
def test_new_roots_bounded_by_degree(p):
    """Roots of degree <= 3 over the base, counted in the algebraic closure, never exceed n."""
    rng = random.Random(30 + p)
    cat = get_catalog(p)
    for _ in range(40):
        n = 4
        P = _random_separable(p, n, rng)
        total = count_roots(P, cat.base, locate=False).count()
        for K in cat.fields(2) + cat.fields(3):
            new = count_roots(P, K, locate=False).count(new_only=True)
            assert new % K.aut_count == 0
            total += new * K.embedded_multiplicity
        assert total <= n


def test_classify_etale_examples():
    cat2 = get_catalog(2)
    E = classify_etale(poly(2, [-1, 0, 1]), cat2)
    assert E.factors == ((cat2.base, 2),)
    E = classify_etale(poly(2, [-5, 0, 1]), cat2)
    assert E.factors[0][0].label == "Q2^unr2"
    cat5 = get_catalog(5)
    E = classify_etale(poly(5, [-2, 0, 0, 1]), cat5)
    assert E.degree == 3


def test_classify_etale_is_distribution():
    rng = random.Random(4)
    cat = get_catalog(3)
    counts = {}
    total = 0
    for _ in range(300):
        P = _random_separable(3, 2, rng)
        E = classify_etale(P, cat)
        counts[E] = counts.get(E, 0) + 1
        total += 1
    assert sum(counts.values()) == total


def test_square_class_examples():
    assert square_class(PadicNumber.from_rational(2, 1)) == (0, 1)
    assert square_class(PadicNumber.from_rational(2, 17)) == (0, 1)
    assert square_class(PadicNumber.from_rational(5, 10)) == (1, -1)
