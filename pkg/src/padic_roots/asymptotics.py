"""Generator counts, Moebius and totient identities, and brackets for the expected number of new roots."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import divisors as _divisors
from sympy import mobius as _mobius
from sympy import primefactors
from sympy import totient as _totient

MINIMAL, STABLE = "minimal", "stable"


@lru_cache(maxsize=None)
def mobius(n: int) -> int:
    return int(_mobius(n))


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return int(_totient(n))


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple:
    return tuple(int(d) for d in _divisors(n))


@lru_cache(maxsize=None)
def generator_count(f: int, q: int) -> int:
    """Number of elements of F_{q^f} generating it over F_q."""
    if f < 1:
        raise ValueError("f must be positive")
    return sum(mobius(f // m) * q ** m for m in divisors(f))


def generator_count_roundtrip(f: int, q: int) -> bool:
    """Every element of F_{q^f} generates exactly one subfield F_{q^m}, m | f."""
    return sum(generator_count(m, q) for m in divisors(f)) == q ** f


def strict_divisor_count_bound(f: int, q: int) -> bool:
    """sum over strict divisors m of f of G_m q^m is at most 2 q^f."""
    return sum(generator_count(m, q) * q ** m for m in divisors(f) if m < f) <= 2 * q ** f


def mobius_over_n(n: int) -> bool:
    """sum_{m | n} mu(m)/m == phi(n)/n."""
    return sum(Fraction(mobius(m), m) for m in divisors(n)) == Fraction(euler_phi(n), n)


def generator_sum_identity(r: int, q: int) -> bool:
    """r * sum_{f | r} G_f / f == sum_{m | r} phi(r/m) q^m."""
    lhs = r * sum(Fraction(generator_count(f, q), f) for f in divisors(r))
    rhs = sum(euler_phi(r // m) * q ** m for m in divisors(r))
    return lhs == rhs


def regime_factor(r: int, q: int, n: int | None = None, regime: str = STABLE) -> Fraction:
    """Value of the density on generators of O_K, divided by ||D_K||."""
    if regime == MINIMAL:
        return Fraction(q ** (r + 1) - q ** r, q ** (r + 1) - 1)
    if regime == STABLE:
        return Fraction(q ** r, q ** r + 1)
    # unramified mid-range r <= n <= 2r - 1
    if n is None or not r <= n <= 2 * r - 1:
        raise ValueError("n must lie in [r, 2r-1]")
    return Fraction(q ** (n + 1) - q ** r, q ** (n + 1) - 1)


@dataclass(frozen=True)
class Bracket:
    main: Fraction
    lo: Fraction
    hi: Fraction

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi


def residue_degree_terms(r: int, f: int, q: int, regime: str = STABLE, disc_norm=Fraction(1)):
    """Main term and the certified bracket for the expected number of new roots in K.

    Returns (sum_{m|f} mu(f/m) q^(m-f), Bracket) where the bracket encloses
    rho_n(K) for n = r (minimal) or n >= 2r-1 (stable):
    c G_f/q^f - q^-f <= rho_n(K)/||D_K|| <= c G_f/q^f + 4 q^-f.
    """
    if r % f:
        raise ValueError("f must divide r")
    main_sum = sum(Fraction(mobius(f // m) * q ** m, q ** f) for m in divisors(f))
    c = regime_factor(r, q, regime=regime)
    centre = c * Fraction(generator_count(f, q), q ** f)
    D = Fraction(disc_norm)
    return main_sum, Bracket(D * centre, D * (centre - Fraction(1, q ** f)), D * (centre + Fraction(4, q ** f)))


def unramified_bracket(r: int, n: int, q: int) -> Bracket:
    """Enclosure of rho_n(K) for K unramified of degree r and r <= n <= 2r-1."""
    c = regime_factor(r, q, n=n, regime="mid")
    centre = c * Fraction(generator_count(r, q), q ** r)
    return Bracket(centre, centre - Fraction(1, q ** r), centre + Fraction(4, q ** r))


def bracket_for(K, n: int) -> Bracket:
    """Best certified bracket for rho_n(K) from the minimal/stable estimates and monotony in n."""
    r, q, f = K.r, K.p, K.f
    if n < r:
        return Bracket(Fraction(0), Fraction(0), Fraction(0))
    if K.e == 1 and n <= 2 * r - 1:
        return unramified_bracket(r, n, q)
    if n == r:
        return residue_degree_terms(r, f, q, MINIMAL, K.disc_norm)[1]
    stable = residue_degree_terms(r, f, q, STABLE, K.disc_norm)[1]
    if n >= 2 * r - 1:
        return stable
    minimal = residue_degree_terms(r, f, q, MINIMAL, K.disc_norm)[1]
    # rho_n(K) is nondecreasing in n
    return Bracket(stable.main, max(Fraction(0), minimal.lo), stable.hi)


def all_fields_main_term(r: int, q: int) -> Fraction:
    """sum_{m | r} phi(r/m) q^(m-r)."""
    return sum(Fraction(euler_phi(r // m) * q ** m, q ** r) for m in divisors(r))


def all_fields_sum_bracket(r: int, q: int) -> Bracket:
    """|sum_K rho_n(K) - (r/q^r) sum_{f|r} G_f/f| <= (5/q^r) sum_{f|r} f, for n >= 2r-1."""
    centre = Fraction(r, q ** r) * sum(Fraction(generator_count(f, q), f) for f in divisors(r))
    err = Fraction(5, q ** r) * sum(divisors(r))
    return Bracket(centre, centre - err, centre + err)


def delta_function(n: int) -> int:
    return euler_phi(n) - mobius(n)


def excess_leading_term(r: int, q: int):
    """(l q^(-r(1-1/l)) with l the smallest prime factor of r, full sum of delta(r/m) q^(m-r))."""
    if r < 2:
        raise ValueError("r must be at least 2")
    ell = min(primefactors(r))
    leading = ell * Fraction(1, q) ** (r - r // ell)
    full = sum(Fraction(delta_function(r // m) * q ** m, q ** r) for m in divisors(r))
    return leading, full


def unramified_main_term(r: int, n: int, q: int) -> Fraction:
    """(1 - q^-(n-r+1)) sum_{m|r} mu(r/m) q^(m-r), valid for r <= n <= 2r-1."""
    return (1 - Fraction(1, q ** (n - r + 1))) * sum(Fraction(mobius(r // m) * q ** m, q ** r) for m in divisors(r))
