"""Exact values of the form mantissa * q^exponent with rational exponent."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class QValue:
    q: int
    mant: Fraction
    exp: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "mant", Fraction(self.mant))
        object.__setattr__(self, "exp", Fraction(self.exp) if self.mant != 0 else Fraction(0))

    @classmethod
    def norm(cls, q, valuation):
        """q^(-valuation); valuation None means the norm of 0."""
        if valuation is None:
            return cls(q, 0)
        return cls(q, 1, -Fraction(valuation))

    @classmethod
    def of(cls, q, x):
        return cls(q, Fraction(x))

    def is_zero(self):
        return self.mant == 0

    @property
    def valuation(self):
        """-log_q of the value for a pure power (mantissa must be a power of q or 1)."""
        if self.is_zero():
            return None
        m = self.mant
        e = self.exp
        while m.numerator % self.q == 0:
            m /= self.q
            e += 1
        while m.denominator % self.q == 0:
            m *= self.q
            e -= 1
        return -e

    def _coerce(self, other):
        if isinstance(other, QValue):
            if other.q != self.q:
                raise ValueError("different bases")
            return other
        return QValue(self.q, Fraction(other))

    def __mul__(self, other):
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            return QValue(self.q, 0)
        return QValue(self.q, self.mant * o.mant, self.exp + o.exp)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError
        return QValue(self.q, self.mant / o.mant, self.exp - o.exp)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if self.is_zero():
            return QValue(self.q, 0 if k else 1)
        return QValue(self.q, self.mant ** k, self.exp * k)

    def __neg__(self):
        return QValue(self.q, -self.mant, self.exp)

    def __add__(self, other):
        o = self._coerce(other)
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        d = self.exp - o.exp
        if d.denominator != 1:
            raise ValueError("incommensurable exponents in a sum")
        base = min(self.exp, o.exp)
        m = self.mant * Fraction(self.q) ** int(self.exp - base) + o.mant * Fraction(self.q) ** int(o.exp - base)
        return QValue(self.q, m, base)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def to_fraction(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if self.exp.denominator != 1:
            raise ValueError(f"{self} is not rational")
        return self.mant * Fraction(self.q) ** int(self.exp)

    def is_rational(self):
        return self.is_zero() or self.exp.denominator == 1

    def __float__(self):
        return float(self.mant) * float(self.q) ** float(self.exp)

    def _cmp_key(self, other):
        o = self._coerce(other)
        return float(self) - float(o), o

    def __eq__(self, other):
        if not isinstance(other, (QValue, int, Fraction)):
            return NotImplemented
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            return self.is_zero() and o.is_zero()
        d = self.exp - o.exp
        if d.denominator != 1:
            return False
        return (self - o).is_zero()

    def __hash__(self):
        return hash((self.q, float(self)))

    def __lt__(self, other):
        o = self._coerce(other)
        if (self.exp - o.exp).denominator == 1:
            return (o - self).mant > 0
        return float(self) < float(o)

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return self._coerce(other) < self

    def __ge__(self, other):
        return self == other or self > other

    def __repr__(self):
        if self.is_zero():
            return "0"
        if self.exp == 0:
            return str(self.mant)
        return f"{self.mant}*{self.q}^({self.exp})"
