import itertools
from fractions import Fraction
from math import gcd

import sympy

import pytest
from hypothesis import given, strategies as st

from padic_roots import asymptotics as A
from padic_roots.catalog import unramified_extension
from padic_roots.density import rho_mass_quadratic
from padic_roots.catalog import get_catalog


def test_generator_count_examples():
    for q in (2, 3, 4, 5):
        assert A.generator_count(1, q) == q
        assert A.generator_count(2, q) == q * q - q
        assert A.generator_count(6, q) == q ** 6 - q ** 3 - q ** 2 + q


@pytest.mark.parametrize("q", [2, 3])
def test_generator_count_brute_force(q):
    """Generators of F_{q^f} over F_q are the roots of monic irreducibles of degree f."""
    x = sympy.symbols("x")
    for f in (1, 2, 3, 4, 6):
        irreducible = 0
        for tail in itertools.product(range(q), repeat=f):
            poly = sympy.Poly([1] + list(tail), x, modulus=q)
            if poly.is_irreducible:
                irreducible += 1
        assert A.generator_count(f, q) == f * irreducible


def test_identity_suite():
    for q in (2, 3, 4, 5, 7, 9):
        for f in range(1, 41):
            assert A.generator_count_roundtrip(f, q)
    assert all(A.mobius_over_n(n) for n in range(1, 10 ** 4 + 1))
    for q in (2, 3, 4, 5, 7, 9):
        for r in range(1, 101):
            assert A.generator_sum_identity(r, q)
    for q in (2, 3, 5):
        for f in range(1, 41):
            assert A.strict_divisor_count_bound(f, q)


def test_residue_degree_terms_f1():
    for q in (2, 3, 5):
        for r in (1, 2, 3):
            main, br = A.residue_degree_terms(r, 1, q, A.MINIMAL)
            c = Fraction(q ** (r + 1) - q ** r, q ** (r + 1) - 1)
            assert main == 1 and br.main == c
            assert br.lo == c - Fraction(1, q) and br.hi == c + Fraction(4, q)


def test_unramified_bracket_contains_known_totals():
    br = A.bracket_for(unramified_extension(2, 2), 3)
    assert br.contains(Fraction(17, 31))
    assert br.lo == Fraction(4, 5) * Fraction(2, 4) - Fraction(1, 4)
    assert br.hi == Fraction(4, 5) * Fraction(2, 4) + Fraction(4, 4)


def test_bracket_contains_exact_quadratic_masses():
    for p in (2, 3, 5, 7):
        for K in get_catalog(p).fields(2):
            for n in (2, 3, 4):
                assert A.bracket_for(K, n).contains(rho_mass_quadratic(K, n))


def test_unramified_mid_range():
    q, r = 2, 3
    for n in (3, 4, 5):
        br = A.unramified_bracket(r, n, q)
        m = min(n, 2 * r - 1)
        c = Fraction(q ** (m + 1) - q ** r, q ** (m + 1) - 1) * Fraction(A.generator_count(r, q), q ** r)
        assert br.lo == c - Fraction(1, q ** r) and br.hi == c + Fraction(4, q ** r)


def test_all_fields_main_term():
    assert A.all_fields_main_term(2, 2) == Fraction(3, 2)
    assert A.all_fields_main_term(1, 5) == 1


def test_excess_leading_term():
    assert A.excess_leading_term(2, 2)[0] == 1
    assert A.excess_leading_term(2, 7)[0] == Fraction(2, 7)
    assert A.excess_leading_term(3, 2)[0] == Fraction(3, 4)
    assert A.delta_function(1) == 0


@given(st.integers(1, 300))
def test_mobius_phi_multiplicative(n):
    for m in range(1, 30):
        if gcd(n, m) == 1:
            assert A.mobius(n * m) == A.mobius(n) * A.mobius(m)
            assert A.euler_phi(n * m) == A.euler_phi(n) * A.euler_phi(m)
