"""Exact density functions of new roots and their integrals."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import (BudgetExceeded, InvalidDistance, NonPrimeDegree, NotGenerator, OverlappingBalls)
from .extension import (EISENSTEIN, UNRAMIFIED, ExtElement, ExtensionField, dist_to_base,
                        index_of_generated_order, min_poly_degree)
from .linalg import elementary_divisors
from .padic import SAFETY_MARGIN, PadicNumber
from .qvalue import QValue

DEFAULT_LATTICE_DEPTH = 3
DEFAULT_CELL_CAP = 10 ** 7


@dataclass(frozen=True)
class DensityValue:
    """An exact rational (lo == hi) or a rigorous enclosure [lo, hi]."""
    lo: Fraction
    hi: Fraction

    @classmethod
    def exact(cls, x):
        x = Fraction(x)
        return cls(x, x)

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError("empty enclosure")

    @property
    def is_exact(self):
        return self.lo == self.hi

    @property
    def value(self) -> Fraction:
        if not self.is_exact:
            raise ValueError(f"enclosure [{self.lo}, {self.hi}] is not exact")
        return self.lo

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def intersect(self, other: "DensityValue") -> "DensityValue":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError(f"disjoint enclosures {self} and {other}")
        return DensityValue(lo, hi)

    def scale(self, c):
        c = Fraction(c)
        return DensityValue(self.lo * c, self.hi * c)

    def __repr__(self):
        if self.is_exact:
            return f"DensityValue({self.lo})"
        return f"DensityValue([{self.lo}, {self.hi}])"


def norm_integral(q: int, r: int) -> Fraction:
    """Integral of ||t||^r over O_F: (q^(r+1) - q^r) / (q^(r+1) - 1)."""
    return Fraction(q ** (r + 1) - q ** r, q ** (r + 1) - 1)


# ---- base field ----

def rho_base(x_norm, n: int, q: int) -> DensityValue:
    """Density of roots in F at a point of the given norm."""
    if n < 1:
        raise ValueError("n must be positive")
    x_norm = Fraction(x_norm)
    c = Fraction(q, q + 1)
    if x_norm <= 1:
        return DensityValue.exact(c)
    return DensityValue.exact(c / x_norm ** 2)


# ---- quadratic and prime-degree closed forms ----

def _as_qvalue(delta, q):
    if isinstance(delta, QValue):
        return delta
    return QValue.of(q, delta)


def _check_delta(delta: QValue, K: ExtensionField):
    """delta must be 0 or q^(-s/e) with s >= 1 not divisible by e (e > 1), s >= 0 otherwise."""
    if delta.is_zero():
        return None
    v = delta.valuation
    if delta != QValue.norm(K.p, v):
        raise InvalidDistance(f"{delta} is not a power of {K.p}")
    if K.kind == EISENSTEIN:
        s = v * K.e
        if s.denominator != 1 or s < 1 or s % K.e == 0:
            raise InvalidDistance(f"{delta} is not a distance to the base field in {K.label}")
    else:
        if v.denominator != 1 or v < 0:
            raise InvalidDistance(f"{delta} is not a distance to the base field in {K.label}")
    return v


def rho_quadratic(delta, K: ExtensionField, n: int) -> DensityValue:
    """Density at x in O_K from delta = dist(x, F), for a quadratic extension K.

    Unramified: q^2/(q^2+q+1) delta, plus q^3/((q^2+1)(q^2+q+1)) delta^4 when n >= 3.
    Ramified: ||D_K|| (q^(5/2)/(q^2+q+1) delta, plus q^3/((q+1)(q^2+q+1)) delta^4 when n >= 3).
    """
    if K.r != 2:
        raise ValueError("quadratic extension expected")
    if n < 2:
        return DensityValue.exact(0)
    q = K.p
    d = _as_qvalue(delta, q)
    _check_delta(d, K)
    if d.is_zero():
        return DensityValue.exact(0)
    s = q * q + q + 1
    if K.kind == UNRAMIFIED:
        val = Fraction(q * q, s) * d
        if n >= 3:
            val = val + Fraction(q ** 3, (q * q + 1) * s) * d ** 4
    else:
        val = QValue(q, Fraction(1, s), Fraction(5, 2)) * d
        if n >= 3:
            val = val + Fraction(q ** 3, (q + 1) * s) * d ** 4
        val = val * K.disc_norm
    return DensityValue.exact(val.to_fraction())


def rho_prime_degree_minimal(delta, K: ExtensionField) -> DensityValue:
    """Density in degree n = r at x in O_K, for K of prime degree r, from delta = dist(x, F).

    Unramified: c_r delta^(r(r-1)/2); totally ramified: ||D_K|| q^((r-1)/2) c_r delta^(r(r-1)/2),
    with c_r the integral of ||t||^r over O_F.
    """
    r = K.r
    if r < 2 or any(r % k == 0 for k in range(2, r)):
        raise NonPrimeDegree(f"degree {r} is not prime")
    q = K.p
    d = _as_qvalue(delta, q)
    _check_delta(d, K)
    if d.is_zero():
        return DensityValue.exact(0)
    D = r * (r - 1) // 2
    c = norm_integral(q, r)
    if K.kind == UNRAMIFIED:
        return DensityValue.exact((c * d ** D).to_fraction())
    val = QValue(q, c, Fraction(r - 1, 2)) * d ** D * K.disc_norm
    return DensityValue.exact(val.to_fraction())


def rho_unramified_generator(n: int, r: int, q: int) -> DensityValue:
    """Density at x with O_F[x] = O_K in an unramified K of degree r."""
    if n < r:
        return DensityValue.exact(0)
    m = min(n, 2 * r - 1)
    return DensityValue.exact(Fraction(q ** (m + 1) - q ** r, q ** (m + 1) - 1))


def _homography_inverse(x: ExtElement):
    """(1/x, ||x||^(-2r)) for x outside O_K."""
    K = x.parent
    y = 1 / x
    scale = (x.norm() ** (-2 * K.r)).to_fraction()
    return y, scale


def rho_closed_form(x: ExtElement, n: int) -> DensityValue:
    """Closed-form density at any x in a cataloged field of degree 1, 2 or prime degree at n = r."""
    K = x.parent
    if x.is_zero():
        if K.r == 1:
            return rho_base(0, n, K.p)
        return DensityValue.exact(0)
    if K.r == 1:
        return rho_base(x.norm().to_fraction(), n, K.p)
    scale = Fraction(1)
    if not x.is_integral():
        x, scale = _homography_inverse(x)
    delta = dist_to_base(x)
    if K.r == 2:
        return rho_quadratic(delta, K, n).scale(scale)
    if n == K.r:
        return rho_prime_degree_minimal(delta, K).scale(scale)
    raise NotImplementedError("no closed form for this degree")


# ---- generic route through the index and the lattice integral ----

def _power_coords(x: ExtElement, count: int, N: int):
    K = x.parent
    ops = K.ops(N)
    xs = x.integral_coords(N)
    out = [ops.one]
    for _ in range(count - 1):
        out.append(ops.mul(out[-1], xs))
    return ops, out


def _lattice_integral_by_divisors(x: ExtElement, m: int, margin: int = SAFETY_MARGIN):
    """Exact lattice integral from elementary divisors, or None if precision does not allow it.

    With A the map Q -> Q(x), the measure of {Q : v(Q(x)) >= k} is
    p^(c_k - f k), where p^c_k is the index of A(O_F^(m+1)) + pi^k O_K in O_K.
    If p^c times the saturation of the image lies in the image (c the largest
    elementary divisor of A), these measures shrink by p^(m+1) every e steps
    from k = e c on, so the tail is geometric.
    """
    K = x.parent
    p, e, f, r = K.p, K.e, K.f, K.r
    N = max(x.absprec, 1)
    ops, pw = _power_coords(x, m + 1, N)
    cols = [list(c) for c in pw]
    divs = elementary_divisors([list(row) for row in zip(*cols)], p, N)
    if any(d is None or d >= N - margin for d in divs):
        return None
    k0 = e * max(divs, default=0)
    if k0 + e >= e * (N - margin):
        return None
    units = [tuple(int(i == j) for i in range(r)) for j in range(r)]

    def measure(k):
        pik = ops.pi_power(k)
        extra = [list(ops.mul(pik, u)) for u in units]
        rows = [list(row) for row in zip(*(cols + extra))]
        ds = elementary_divisors(rows, p, N)
        if any(d is None for d in ds):
            raise BudgetExceeded("index of the image is beyond the working precision")
        c = sum(ds)
        return Fraction(p ** c, p ** (f * k))

    mu = [measure(k) for k in range(k0 + e + 1)]
    terms = [Fraction(1, p ** (f * k)) * (mu[k] - mu[k + 1]) for k in range(k0 + e)]
    geo = 1 - Fraction(1, p ** (r + m + 1))
    return sum(terms[:k0]) + sum(terms[k0:]) / geo


def lattice_norm_integral(x: ExtElement, m: int, depth: int = DEFAULT_LATTICE_DEPTH,
                          cell_cap: int = DEFAULT_CELL_CAP, max_depth: int = 40,
                          use_divisors: bool = True) -> DensityValue:
    """Integral of ||Q(x)||^r over polynomials Q of degree <= m with coefficients in O_F.

    When Q -> Q(x) is injective the value comes from elementary divisors (see
    _lattice_integral_by_divisors). Otherwise, or with use_divisors=False,
    coefficient vectors are refined modulo p^d. A cell is resolved once v(Q(x)) < d
    (in p-units) at its representative, because then ||Q(x)|| is constant on it.
    When the unresolved residues at level d+1 are exactly p times those at level d,
    the unresolved part is self-similar and is summed as a geometric series, which
    gives the exact value. Otherwise refinement stops at `depth` (or when the
    closure is found, if that happens first) and the unresolved cells are bounded
    by the largest value the integrand can take on them.
    """
    K = x.parent
    if x.shift < 0:
        raise ValueError("x must lie in O_K")
    p, e, f, r = K.p, K.e, K.f, K.r
    N = max(x.absprec, 1)
    ops, pw = _power_coords(x, m + 1, N)
    M = ops.M
    cells = 0

    def qval(u):
        acc = [0] * r
        for ui, c in zip(u, pw):
            if ui:
                for t in range(r):
                    acc[t] += ui * c[t]
        return ops.val(tuple(a % M for a in acc))

    injective = _evaluation_injective(x, m)
    if injective and use_divisors:
        value = _lattice_integral_by_divisors(x, m)
        if value is not None:
            return DensityValue.exact(value)
    resolved = Fraction(0)
    unresolved = [tuple([0] * (m + 1))]  # level 0: the whole space
    d = 0
    levels = [set(unresolved)]
    digits = list(itertools.product(range(p), repeat=m + 1))
    while True:
        nxt = []
        part = Fraction(0)
        pd = p ** d
        for u in unresolved:
            for t in digits:
                child = tuple(ui + pd * ti for ui, ti in zip(u, t))
                cells += 1
                if cells > cell_cap:
                    raise BudgetExceeded(f"more than {cell_cap} cells")
                v = qval(child)
                if v is not None and v < e * (d + 1):
                    part += Fraction(1, p ** ((d + 1) * (m + 1) + f * v))
                else:
                    nxt.append(child)
        resolved += part
        d += 1
        unresolved = nxt
        if not unresolved:
            return DensityValue.exact(resolved)
        cur = set(unresolved)
        prev = levels[-1]
        Md = p ** d
        levels.append(cur)
        if len(cur) == len(prev) and {tuple(p * a % Md for a in u) for u in prev} == cur:
            # unresolved(d) = p * unresolved(d-1); the part below level d-1 is self-similar
            geo = 1 - Fraction(1, p ** (r + m + 1))
            tail = part / geo
            return DensityValue.exact(resolved - part + tail)
        if d >= max_depth or (d >= depth and not injective):
            break
    width = Fraction(len(unresolved), p ** (r * d + d * (m + 1)))
    return DensityValue(resolved, resolved + width)


def _evaluation_injective(x, m):
    """Q -> Q(x) is injective on degree <= m; then the self-similar closure is guaranteed."""
    try:
        return min_poly_degree(x) > m
    except Exception:
        return False


def rho_generic(x: ExtElement, n: int, strict: bool = False, depth: int = DEFAULT_LATTICE_DEPTH) -> DensityValue:
    """Density at x in O_K via the index of O_F[x] and the lattice integral."""
    K = x.parent
    r, q = K.r, K.p
    if x.shift < 0:
        raise ValueError("x must lie in O_K; apply the homography first")
    if n < r:
        return DensityValue.exact(0)
    if r > 1 and (x.is_zero() or min_poly_degree(x) < r):
        if strict:
            raise NotGenerator("x lies in a proper subfield")
        return DensityValue.exact(0)
    if r == 1:
        return rho_base(0, n, q)
    idx = index_of_generated_order(x)
    if not idx.certified:
        raise NotGenerator("index not certified at this precision")
    base = K.disc_norm / Fraction(q ** idx.exponent)
    lower = DensityValue.exact(base * norm_integral(q, r))
    if n == r:
        return lower
    if n >= 2 * r - 1:
        return lattice_norm_integral(x, r - 1, depth).scale(base)
    direct = lattice_norm_integral(x, n - r, depth).scale(base)
    upper = lattice_norm_integral(x, r - 1, depth).scale(base)
    return direct.intersect(DensityValue(lower.lo, upper.hi))


# ---- integrals of the density ----

def alpha_moment(d: int, q: int) -> Fraction:
    """(q - 1) / (q^(d+1) - 1)."""
    return Fraction(q - 1, q ** (d + 1) - 1)


def dist_tail(K: ExtensionField, S):
    """Haar measure of {x in O_K : dist(x, F) <= q^(-S/e)}."""
    q, r = K.p, K.r
    if K.kind == UNRAMIFIED:
        return Fraction(1, q ** (S * (r - 1)))
    if K.kind == EISENSTEIN:
        tot = 0
        for i in range(1, r):
            tot += max(0, -((i - S) // r))
        return Fraction(1, q ** tot)
    raise ValueError("prime-degree unramified or Eisenstein field expected")


def dist_moment(K: ExtensionField, d: int) -> QValue:
    """Integral over O_K of dist(x, F)^d, summed from the distribution of dist."""
    q, r = K.p, K.r
    period = 1 if K.kind == UNRAMIFIED else r
    start = 0 if K.kind == UNRAMIFIED else 1
    total = QValue(q, 0)
    for S in range(start, start + period):
        mass = dist_tail(K, S) - dist_tail(K, S + 1)
        if mass:
            total = total + QValue(q, mass, -Fraction(S * d, K.e))
    shrink = dist_tail(K, start + period) / dist_tail(K, start) * Fraction(1, q ** d)
    return total * (1 / (1 - shrink))


def dist_moment_integrals(K: ExtensionField, d: int):
    """(integral over O_K, integral over m_K) of dist(x, F)^d."""
    full = dist_moment(K, d)
    if K.kind == UNRAMIFIED:
        # m_K = p O_K: dist scales by 1/q and the measure by q^-r
        return full, full * Fraction(1, K.p ** (K.r + d))
    # dist only depends on the non-constant coordinates; m_K fixes the constant one mod p
    return full, full * Fraction(1, K.p)


def dist_moment_closed_form(K: ExtensionField, d: int) -> QValue:
    """q^d alpha_d (unramified quadratic) or q^(d/2) alpha_d (ramified quadratic)."""
    if K.r != 2:
        raise ValueError("quadratic extension expected")
    a = alpha_moment(d, K.p)
    if K.kind == UNRAMIFIED:
        return QValue(K.p, a * K.p ** d)
    return QValue(K.p, a, Fraction(d, 2))


def rho_mass_quadratic(K: ExtensionField, n: int) -> Fraction:
    """Total expected number of new roots in a quadratic K."""
    q = K.p
    if n < 2:
        return Fraction(0)
    if K.kind == UNRAMIFIED:
        if n == 2:
            return Fraction(q * q - q + 1, q * q + q + 1)
        return Fraction(q ** 4 + 1, q ** 4 + q ** 3 + q * q + q + 1)
    if n == 2:
        return K.disc_norm * Fraction(q * q, q * q + q + 1)
    return K.disc_norm * Fraction(q * q * (q * q + 1), q ** 4 + q ** 3 + q * q + q + 1)


def integrate_quadratic(K: ExtensionField, n: int) -> Fraction:
    """Integral of rho_quadratic over K, through the moments of dist(x, F).

    The part of K outside O_K is carried to m_K by x -> 1/x.
    """
    q = K.p
    if n < 2:
        return Fraction(0)
    s = q * q + q + 1
    if K.kind == UNRAMIFIED:
        terms = [(QValue(q, Fraction(q * q, s)), 1)]
        if n >= 3:
            terms.append((QValue(q, Fraction(q ** 3, (q * q + 1) * s)), 4))
    else:
        terms = [(QValue(q, Fraction(1, s), Fraction(5, 2)) * K.disc_norm, 1)]
        if n >= 3:
            terms.append((QValue(q, Fraction(q ** 3, (q + 1) * s)) * K.disc_norm, 4))
    total = QValue(q, 0)
    for coef, d in terms:
        inner, outer = dist_moment_integrals(K, d)
        total = total + coef * (inner + outer)
    return total.to_fraction()


def rho_mass_prime_degree(K: ExtensionField) -> Fraction:
    """Total expected number of new roots in K of prime degree r for n = r."""
    r, q = K.r, K.p
    D = r * (r - 1) // 2
    c = norm_integral(q, r)
    inner, outer = dist_moment_integrals(K, D)
    if K.kind == UNRAMIFIED:
        return (c * (inner + outer)).to_fraction()
    return (QValue(q, c, Fraction(r - 1, 2)) * K.disc_norm * (inner + outer)).to_fraction()


# ---- pairs of roots in F ----

def _pair_constants(q):
    s = q * q + q + 1
    return Fraction(q * q, s), Fraction(q ** 3, (q + 1) ** 2 * s)


def rho_F2(x, y, n: int) -> DensityValue:
    """Density of ordered pairs of distinct roots of a random polynomial at (x, y) in F^2."""
    if n < 2:
        return DensityValue.exact(0)
    if not isinstance(x, PadicNumber):
        raise TypeError("PadicNumber expected")
    q = x.p
    A, B = _pair_constants(q)
    nx, ny = x.norm(), y.norm()
    if nx <= 1 and ny <= 1:
        d = (x - y).norm()
        val = A * d - (B * d ** 4 if n >= 3 else 0)
    elif nx <= 1 or ny <= 1:
        big = max(nx, ny)
        c = A if n == 2 else Fraction(q * q, (q + 1) ** 2)
        val = c / big ** 2
    else:
        # (x, y) -> (1/x, 1/y) with Jacobian ||xy||^-2
        d = (x - y).norm()
        xy = nx * ny
        val = A * d / xy ** 3 - (B * d ** 4 / xy ** 6 if n >= 3 else 0)
    return DensityValue.exact(val)


def pair_mass_F2(q: int, n: int) -> Fraction:
    """Integral of rho_F2 over F^2, i.e. E[Z(Z-1)] for Z the number of roots in F."""
    if n < 2:
        return Fraction(0)
    A, B = _pair_constants(q)
    inside = A * q * alpha_moment(1, q) - (B * q ** 4 * alpha_moment(4, q) if n >= 3 else 0)
    c = A if n == 2 else Fraction(q * q, (q + 1) ** 2)
    mixed = 2 * c * Fraction(1, q)  # integral of ||y||^-2 over ||y|| > 1 is 1/q
    outside = Fraction(1, q * q) * (A * alpha_moment(1, q) - (B * alpha_moment(4, q) if n >= 3 else 0))
    return inside + mixed + outside


def pair_mass_in_ring(q: int, n: int) -> Fraction:
    """Integral of rho_F2 over O_F^2."""
    A, B = _pair_constants(q)
    return A * q * alpha_moment(1, q) - (B * q ** 4 * alpha_moment(4, q) if n >= 3 else 0)


def covariance_disjoint_balls(dist, n: int, q: int, ball_measures=None):
    """(normalized covariance Cov/(E E), raw covariance) of root counts in disjoint balls of O_F.

    dist is the constant value of ||u - v|| on U x V; ball_measures = (lambda(U), lambda(V)).
    """
    dist = Fraction(dist)
    if n < 3:
        raise ValueError("n >= 3 expected")
    if not 0 < dist <= 1:
        raise OverlappingBalls("balls must be disjoint subsets of O_F")
    if ball_measures is not None and any(Fraction(m) > dist for m in ball_measures):
        raise OverlappingBalls("ball radius must be below the distance between the balls")
    s = q * q + q + 1
    norm = -1 + Fraction((q + 1) ** 2, s) * dist - Fraction(q, s) * dist ** 4
    raw = None
    if ball_measures is not None:
        lu, lv = (Fraction(m) for m in ball_measures)
        raw = norm * Fraction(q, q + 1) ** 2 * lu * lv
    return norm, raw


def second_moment_nested(lam_U, lam_V, n: int, q: int) -> Fraction:
    """E[Z_U Z_V] for balls V inside U of O_F."""
    lu, lv = Fraction(lam_U), Fraction(lam_V)
    if n < 3:
        raise ValueError("n >= 3 expected")
    if lv > lu:
        raise ValueError("V must be contained in U")
    s = q * q + q + 1
    return (Fraction(q, q + 1) * lv + Fraction(q ** 3, (q + 1) * s) * lu ** 2 * lv
            - Fraction(q ** 7, (q + 1) ** 2 * s * (q ** 4 + q ** 3 + q * q + q + 1)) * lu ** 5 * lv)
