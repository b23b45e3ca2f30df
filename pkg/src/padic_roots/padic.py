"""Fixed precision arithmetic in Q_p and integral polynomials over Z_p."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByIndistinguishableZero, PrecisionExhausted

DEFAULT_PRECISION = 48
SAFETY_MARGIN = 8


def vp(x: int, p: int, cap: int | None = None) -> int | None:
    """p-adic valuation of an integer; None for 0 (or for values divisible by p^cap)."""
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if cap is not None and v >= cap:
            return None
    return v


def vp_mod(x: int, p: int, N: int) -> int | None:
    """Valuation of a residue mod p^N, None when it is 0 mod p^N."""
    x %= p ** N
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def vp_fraction(x: Fraction, p: int) -> int | None:
    if x == 0:
        return None
    return (vp(x.numerator, p) or 0) - (vp(x.denominator, p) or 0)


@dataclass(frozen=True)
class PadicNumber:
    """unit * p^valuation, with the unit known modulo p^prec.

    A zero at this precision has unit 0, prec 0 and valuation equal to the
    absolute precision it is known to.
    """
    p: int
    unit: int
    valuation: int
    prec: int

    @classmethod
    def from_rational(cls, p, x, prec=DEFAULT_PRECISION):
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, prec)
        v = vp_fraction(x, p)
        y = x / Fraction(p) ** v
        M = p ** prec
        u = y.numerator * pow(y.denominator, -1, M) % M
        return cls(p, u, v, prec)

    @classmethod
    def from_residue(cls, p, x, absprec=DEFAULT_PRECISION):
        """Element of Z_p given by an integer known modulo p^absprec."""
        x %= p ** absprec
        v = vp(x, p)
        if v is None:
            return cls.zero(p, absprec)
        return cls(p, x // p ** v, v, absprec - v)

    @classmethod
    def zero(cls, p, absprec=DEFAULT_PRECISION):
        return cls(p, 0, absprec, 0)

    def is_zero(self):
        return self.unit == 0

    @property
    def absprec(self):
        return self.valuation + self.prec

    def norm(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return Fraction(1, self.p ** self.valuation) if self.valuation >= 0 else Fraction(self.p ** -self.valuation)

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return PadicNumber.from_rational(self.p, other, max(self.prec, 1) + 2 * abs(self.valuation) + 8)
        if other.p != self.p:
            raise ValueError("mismatched primes")
        return other

    def __add__(self, other):
        other = self._check(other)
        A = min(self.absprec, other.absprec)
        s = min(self.valuation, other.valuation)
        x = 0
        for a in (self, other):
            if not a.is_zero():
                x += a.unit * self.p ** (a.valuation - s)
        width = A - s
        if width <= 0:
            return PadicNumber.zero(self.p, A)
        x %= self.p ** width
        v = vp(x, self.p)
        if v is None:
            return PadicNumber.zero(self.p, A)
        return PadicNumber(self.p, x // self.p ** v, s + v, width - v)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicNumber(self.p, (-self.unit) % self.p ** self.prec, self.valuation, self.prec)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if self.is_zero() or other.is_zero():
            a = self.absprec + (0 if other.is_zero() else other.valuation)
            b = other.absprec + (0 if self.is_zero() else self.valuation)
            return PadicNumber.zero(self.p, min(a, b))
        prec = min(self.prec, other.prec)
        return PadicNumber(self.p, self.unit * other.unit % self.p ** prec, self.valuation + other.valuation, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other.is_zero():
            raise DivisionByIndistinguishableZero("divisor is zero at working precision")
        if self.is_zero():
            return PadicNumber.zero(self.p, self.absprec - other.valuation)
        prec = min(self.prec, other.prec)
        if prec <= 0:
            raise PrecisionExhausted("no significant digit left")
        M = self.p ** prec
        return PadicNumber(self.p, self.unit * pow(other.unit, -1, M) % M, self.valuation - other.valuation, prec)

    def __rtruediv__(self, other):
        return self._check(other) / self

    def to_fraction(self) -> Fraction:
        """Rational representative unit * p^valuation (the unit is taken in [0, p^prec))."""
        if self.valuation >= 0:
            return Fraction(self.unit * self.p ** self.valuation)
        return Fraction(self.unit, self.p ** -self.valuation)

    def residue(self, absprec: int) -> int:
        """Integer representative modulo p^absprec (requires integrality)."""
        if self.is_zero():
            return 0
        if self.valuation < 0:
            raise ValueError("not integral")
        return self.unit * self.p ** self.valuation % self.p ** absprec

    def equals(self, other) -> bool:
        """Equality at the common precision."""
        return (self - other).is_zero()

    def __repr__(self):
        if self.is_zero():
            return f"O({self.p}^{self.absprec})"
        return f"{self.unit}*{self.p}^{self.valuation} + O({self.p}^{self.absprec})"


@dataclass(frozen=True)
class PadicPolynomial:
    """Polynomial with coefficients in Z_p, stored as residues mod p^N (low degree first)."""
    p: int
    coeffs: tuple
    N: int = DEFAULT_PRECISION

    def __post_init__(self):
        M = self.p ** self.N
        object.__setattr__(self, "coeffs", tuple(int(c) % M for c in self.coeffs))

    @classmethod
    def from_rationals(cls, p, coeffs, N=DEFAULT_PRECISION):
        """Clear denominators (roots are unchanged) and reduce mod p^N."""
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // _gcd(den, c.denominator)
        ints = [int(c * den) for c in fr]
        v = min((vp(c, p) for c in ints if c), default=0)
        return cls(p, tuple(c // p ** v for c in ints), N)

    @property
    def degree_bound(self):
        return len(self.coeffs) - 1

    def degree(self):
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    def coefficients(self):
        return [PadicNumber.from_residue(self.p, c, self.N) for c in self.coeffs]

    def gauss_valuation(self):
        vals = [vp(c, self.p) for c in self.coeffs if c]
        return min(vals) if vals else None

    def __call__(self, x: int) -> int:
        acc = 0
        M = self.p ** self.N
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % M
        return acc

    def derivative(self):
        return PadicPolynomial(self.p, tuple(i * c for i, c in enumerate(self.coeffs))[1:] or (0,), self.N)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def reverse_poly(P: PadicPolynomial, n: int | None = None) -> PadicPolynomial:
    """X^n P(1/X) for deg P <= n."""
    n = P.degree_bound if n is None else n
    if P.degree() > n:
        raise ValueError("degree exceeds n")
    c = list(P.coeffs) + [0] * (n + 1 - len(P.coeffs))
    return PadicPolynomial(P.p, tuple(reversed(c[: n + 1])), P.N)


def taylor_shift(coeffs, c, M):
    """Coefficients of P(c + y) for integer coefficients and integer c, mod M."""
    b = list(coeffs)
    n = len(b) - 1
    for i in range(n):
        for k in range(n - 1, i - 1, -1):
            b[k] = (b[k] + c * b[k + 1]) % M
    return b


def hasse_at(coeffs, x, M):
    return taylor_shift(coeffs, x, M)
