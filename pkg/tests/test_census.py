import random

import pytest

from padic_roots import PadicPolynomial
from padic_roots.catalog import get_catalog
from padic_roots.census import CensusEngine
from padic_roots.roots import count_roots


def _engine(p, **kw):
    return CensusEngine(p, get_catalog(p).all_fields(), **kw)


def _oracle(p, coeffs, fields):
    P = PadicPolynomial(p, tuple(coeffs), 48)
    base = count_roots(P, get_catalog(p).base, locate=False)
    if base.degenerate:
        return None
    out = [base.count(in_ring=True), base.count(in_ring=False)]
    for K in fields:
        rs = count_roots(P, K, locate=False)
        if rs.degenerate:
            return None
        out.append(rs.count(new_only=True))
    return out


def _near_collision(p, n, rng):
    """Polynomials with clustered roots: products of linear factors with close roots."""
    roots = [rng.randrange(p ** 3)]
    while len(roots) < n:
        roots.append(roots[-1] + p ** rng.randint(1, 4) * rng.randrange(1, p ** 2))
    c = [1]
    for a in roots:
        c = [(-a * x) for x in c] + [0]
        for i in range(len(c) - 1, 0, -1):
            c[i] += c[i - 1] if i - 1 < len(c) - 1 else 0
    lead = rng.randrange(1, p ** 2)
    return [(x * lead + rng.randrange(p ** 20) * p ** 20) % p ** 48 for x in c]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_census_matches_count_roots(p):
    rng = random.Random(p)
    eng = _engine(p)
    checked = 0
    for i in range(250):
        n = rng.randint(1, 5)
        if i % 3 == 0:
            coeffs = _near_collision(p, max(n, 2), rng)
        else:
            coeffs = [rng.randrange(p ** 48) for _ in range(n + 1)]
        s = eng.census(coeffs)
        expect = _oracle(p, coeffs, eng.fields)
        if s.flagged or expect is None:
            continue
        assert [s.roots_ring, s.roots_outside] + s.new == expect
        checked += 1
    assert checked > 200


def test_flags_zero_polynomial():
    assert _engine(2).census([0, 0, 0]).flagged


def test_locations_are_roots():
    p, depth = 2, 5
    cat = get_catalog(p)
    labels = [K.label for K in cat.all_fields() if K.r > 1]
    tracked = [labels.index("Q2^unr2"), labels.index("Q2[x^2+2x-2]")]
    eng = _engine(p, location_depth=depth, tracked=tracked)
    rng = random.Random(7)
    M = p ** depth
    for _ in range(200):
        coeffs = [rng.randrange(p ** 48) for _ in range(5)]
        s = eng.census(coeffs)
        if s.flagged:
            continue
        assert len(s.base_locations) == s.roots_ring
        P = PadicPolynomial(p, tuple(coeffs), 48)
        ring = sorted(int(r.location.coeffs[0].to_fraction()) % M
                      for r in count_roots(P, cat.base) if r.in_ring)
        assert sorted(s.base_locations) == ring
        for idx in tracked:
            K = eng.fields[idx]
            pts = sorted(s.new_locations.get(idx, []))
            found = sorted(tuple(int(c) % M for c in r.location.integral_coords(depth))
                           for r in count_roots(P, K) if r.in_ring and r.is_new == "new")
            assert pts == found
