from fractions import Fraction

import pytest

from padic_roots.catalog import (enumerate_extensions, etale_classes, get_catalog, mass_closed_form,
                                 unramified_extension, validate_mass)
from padic_roots.errors import UnsupportedDegree
from padic_roots.extension import EISENSTEIN


def test_p2_quadratics():
    ext = enumerate_extensions(2, 2)
    assert len(ext.classes) == 7
    norms = sorted(K.disc_norm for K in ext.classes)
    assert norms == [Fraction(1, 8)] * 4 + [Fraction(1, 4)] * 2 + [1]


def test_p5_quadratics():
    ext = enumerate_extensions(5, 2)
    assert len(ext.classes) == 3
    assert sorted(K.disc_norm for K in ext.classes) == [Fraction(1, 5), Fraction(1, 5), 1]


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_tame_ramified_quadratics(p):
    ram = [K for K in get_catalog(p).fields(2) if K.e == 2]
    assert len(ram) == 2


def test_unramified_extension():
    assert unramified_extension(3, 1).r == 1
    Q4 = unramified_extension(2, 2)
    assert Q4.aut_count == 2 and Q4.e == 1
    K = unramified_extension(5, 3)
    assert K.aut_count == 3 and K.disc_norm == 1


def test_mass_examples():
    cat2 = get_catalog(2)
    assert validate_mass(cat2, 2, 1) == 2 * Fraction(1, 4) + 4 * Fraction(1, 8) == 1
    assert validate_mass(get_catalog(5), 2, 1) == Fraction(2, 5)
    for p in (2, 3, 5):
        assert validate_mass(get_catalog(p), 3, 3) == 1


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_validate_mass_all(p):
    cat = get_catalog(p)
    for r in (1, 2, 3):
        for f in range(1, r + 1):
            if r % f == 0:
                assert validate_mass(cat, r, f) == mass_closed_form(p, r, f)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_embedded_count(p):
    for r in (2, 3):
        ext = enumerate_extensions(p, r)
        assert ext.embedded == sum(Fraction(r, K.aut_count) for K in ext.classes)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_eisenstein_shape(p):
    for K in get_catalog(p).all_fields():
        if K.kind != EISENSTEIN:
            continue
        g = K.poly
        assert g[-1] == 1
        assert all(c % p == 0 for c in g[:-1])
        assert g[0] % (p * p) != 0


def test_etale_classes():
    classes = etale_classes(5, 2)
    assert len(classes) == 4
    assert sorted(E.aut_count for E in classes) == [2, 2, 2, 2]
    assert [E.aut_count for E in etale_classes(5, 1)] == [1]
    cubic = etale_classes(5, 3)
    by_shape = {}
    for E in cubic:
        shape = tuple(sorted(K.r for K, a in E.factors for _ in range(a)))
        by_shape.setdefault(shape, []).append(E.aut_count)
    assert by_shape[(1, 1, 1)] == [6]
    assert by_shape[(1, 2)] == [2, 2, 2]
    cat = get_catalog(5)
    assert sorted(by_shape[(3,)]) == sorted(3 if K.galois else 1 for K in cat.fields(3))


def test_unsupported_degree():
    with pytest.raises(UnsupportedDegree):
        enumerate_extensions(2, 4)
    with pytest.raises(UnsupportedDegree):
        etale_classes(2, 4)
