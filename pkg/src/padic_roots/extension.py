"""Finite extensions of Q_p given by an unramified lift or an Eisenstein polynomial."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AmbiguousRank, DivisionByIndistinguishableZero, PrecisionExhausted
from .linalg import det_exact, elementary_divisors, solve_mod
from .padic import DEFAULT_PRECISION, SAFETY_MARGIN, PadicNumber, vp
from .qvalue import QValue
from .resfield import ResidueField

BASE, UNRAMIFIED, EISENSTEIN = "base", "unramified", "eisenstein"


def _vp2(x):
    return (x & -x).bit_length() - 1


def _make_vp(p):
    if p == 2:
        def v(x):
            return (x & -x).bit_length() - 1
    else:
        def v(x):
            k = 0
            while x % p == 0:
                x //= p
                k += 1
            return k
    return v


@dataclass(eq=False)
class ExtensionField:
    """A finite extension K = Q_p[X]/(g) with O_K = Z_p[theta]."""
    p: int
    poly: tuple
    kind: str
    label: str = ""
    disc_valuation: int | None = None
    aut_count: int | None = None
    galois: bool | None = None
    square_class: int | None = None
    _ops: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.poly = tuple(int(c) for c in self.poly)
        if self.poly[-1] != 1:
            raise ValueError("defining polynomial must be monic")
        self.r = len(self.poly) - 1
        p = self.p
        if self.kind == BASE:
            if self.poly != (0, 1):
                raise ValueError("base field is presented by X")
            self.e, self.f = 1, 1
        elif self.kind == UNRAMIFIED:
            self.e, self.f = 1, self.r
        elif self.kind == EISENSTEIN:
            self.e, self.f = self.r, 1
            if any(c % p for c in self.poly[:-1]) or self.poly[0] % (p * p) == 0:
                raise ValueError(f"{self.poly} is not Eisenstein at {p}")
        else:
            raise ValueError("ramified extensions must be given by Eisenstein polynomials")
        if self.kind == UNRAMIFIED:
            self.residue = ResidueField(p, tuple(c % p for c in self.poly))
        else:
            self.residue = ResidueField(p, (0, 1))
        if self.kind == EISENSTEIN:
            u0 = (self.poly[0] // p) % p
            self.w_inv = pow((-u0) % p, -1, p)
        else:
            self.w_inv = 1
        if self.disc_valuation is None:
            self.disc_valuation = self.computed_disc_valuation()
        if self.aut_count is None and self.r == 1:
            self.aut_count = 1
        if self.galois is None and self.aut_count is not None:
            self.galois = self.aut_count == self.r
        if not self.label:
            self.label = f"Q{p}[{self.poly}]"

    @property
    def q(self):
        return self.p

    @property
    def disc_norm(self) -> Fraction:
        return Fraction(1, self.p ** self.disc_valuation)

    @property
    def embedded_multiplicity(self) -> int:
        return self.r // self.aut_count

    def computed_disc_valuation(self) -> int:
        """v_p(disc g); equals v_p(D_K) because the power basis is integral."""
        return vp(poly_discriminant(self.poly), self.p)

    def ops(self, N: int = DEFAULT_PRECISION) -> "FieldOps":
        o = self._ops.get(N)
        if o is None:
            o = FieldOps(self, N)
            self._ops[N] = o
        return o

    def element(self, coords, N: int = DEFAULT_PRECISION) -> "ExtElement":
        coords = tuple(coords) + (0,) * (self.r - len(coords))
        return ExtElement.from_coords(self, coords, N)

    def generator(self, N: int = DEFAULT_PRECISION) -> "ExtElement":
        if self.r == 1:
            return self.element((0,), N)
        return self.element((0, 1), N)

    def __repr__(self):
        return f"ExtensionField({self.label})"


def poly_discriminant(g) -> int:
    """Discriminant of a monic integer polynomial via the Sylvester resultant."""
    n = len(g) - 1
    if n == 1:
        return 1
    dg = [i * c for i, c in enumerate(g)][1:]
    m = n - 1
    size = n + m
    rows = []
    hi_g = list(reversed(g))
    hi_d = list(reversed(dg))
    for i in range(m):
        rows.append([0] * i + hi_g + [0] * (size - i - len(hi_g)))
    for i in range(n):
        rows.append([0] * i + hi_d + [0] * (size - i - len(hi_d)))
    res = det_exact(rows)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * res


class FieldOps:
    """Coordinate arithmetic in O_K modulo p^N on tuples of integers."""

    def __init__(self, K: ExtensionField, N: int):
        self.K = K
        self.N = N
        p = K.p
        self.p = p
        self.M = p ** N
        self.r, self.e, self.f = K.r, K.e, K.f
        self.vp = _make_vp(p)
        r = self.r
        g = K.poly
        # coordinates of theta^(r+k), k = 0..r-2, exact integers
        red = []
        cur = [-c for c in g[:-1]]
        for k in range(max(r - 1, 0)):
            red.append(list(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [c - top * gc for c, gc in zip(cur, g[:-1])]
        self.red = red
        self.zero = (0,) * r
        self.one = (1,) + (0,) * (r - 1)
        self._pipow = [self.one]
        self.residue = K.residue
        self.q_res = K.residue.q
        self.eN = self.e * N

    def embed(self, x: int):
        return (x % self.M,) + (0,) * (self.r - 1)

    def add(self, a, b):
        M = self.M
        return tuple((x + y) % M for x, y in zip(a, b))

    def sub(self, a, b):
        M = self.M
        return tuple((x - y) % M for x, y in zip(a, b))

    def neg(self, a):
        M = self.M
        return tuple((-x) % M for x in a)

    def smul(self, c, a):
        M = self.M
        return tuple(c * x % M for x in a)

    def mul(self, a, b):
        r = self.r
        M = self.M
        if r == 1:
            return (a[0] * b[0] % M,)
        if r == 2:
            c0 = a[0] * b[0]
            c1 = a[0] * b[1] + a[1] * b[0]
            c2 = a[1] * b[1]
            t = self.red[0]
            return ((c0 + t[0] * c2) % M, (c1 + t[1] * c2) % M)
        conv = [0] * (2 * r - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    conv[i + j] += x * y
        out = conv[:r]
        for k, row in enumerate(self.red):
            c = conv[r + k]
            if c:
                for i in range(r):
                    out[i] += c * row[i]
        return tuple(x % M for x in out)

    def mul_pi(self, a):
        """Multiply by the uniformizer (p when unramified, theta when Eisenstein)."""
        M = self.M
        if self.e == 1:
            p = self.p
            return tuple(p * x % M for x in a)
        top = a[-1]
        row = self.red[0] if self.r > 1 else [-self.K.poly[0]]
        shifted = (0,) + tuple(a[:-1])
        return tuple((x + top * t) % M for x, t in zip(shifted, row))

    def pi_power(self, k):
        while len(self._pipow) <= k:
            self._pipow.append(self.mul_pi(self._pipow[-1]))
        return self._pipow[k]

    def val(self, a):
        """pi-adic valuation, None when a vanishes modulo p^N."""
        vp_ = self.vp
        e = self.e
        best = None
        if e == 1:
            for x in a:
                if x:
                    v = vp_(x)
                    if best is None or v < best:
                        best = v
            return best
        for i, x in enumerate(a):
            if x:
                v = e * vp_(x) + i
                if best is None or v < best:
                    best = v
        return best

    def lead(self, a, v):
        """Residue of a / pi^v for v = val(a) (as a residue-field code)."""
        p = self.p
        if self.e == 1:
            pv = p ** v
            code = 0
            for x in reversed(a):
                code = code * p + (x // pv) % p
            return code
        s, i0 = divmod(v, self.e)
        u = (a[i0] // p ** s) % p
        return u * pow(self.K.w_inv, s, p) % p

    def lift(self, code):
        """Small representative in O_K of a residue-field element."""
        if self.e == 1:
            p = self.p
            out = []
            for _ in range(self.r):
                out.append(code % p)
                code //= p
            return tuple(out)
        return (code,) + (0,) * (self.r - 1)

    def residue_of(self, a):
        """Image of a in the residue field (a must be integral)."""
        p = self.p
        if self.e == 1:
            code = 0
            for x in reversed(a):
                code = code * p + x % p
            return code
        return a[0] % p

    def is_base_residue(self, code):
        return code < self.p

    def mult_matrix(self, b):
        """Matrix of y -> b*y in the power basis (rows indexed by output coordinate)."""
        cols = []
        t = self.one
        theta = (0, 1) + (0,) * (self.r - 2) if self.r > 1 else None
        for j in range(self.r):
            cols.append(self.mul(b, t))
            if theta is not None:
                t = self.mul(t, theta)
        return [[cols[j][i] for j in range(self.r)] for i in range(self.r)]

    def norm(self, b) -> int:
        return det_exact(self.mult_matrix(b)) % self.M

    def divide(self, a, b):
        """a / b for integral a, b with a/b integral; returns (quotient, digits lost)."""
        if self.val(b) is None:
            raise DivisionByIndistinguishableZero("divisor vanishes at working precision")
        y, lost = solve_mod(self.mult_matrix(b), list(a), self.p, self.N)
        return tuple(y), lost

    def taylor(self, coeffs, c):
        """Coefficients of P(c + y) given the coefficients of P (tuples)."""
        b = list(coeffs)
        n = len(b) - 1
        add, mul = self.add, self.mul
        for i in range(n):
            for k in range(n - 1, i - 1, -1):
                b[k] = add(b[k], mul(c, b[k + 1]))
        return b

    def taylor_int(self, coeffs, c: int):
        """Taylor shift by an integer c (cheap coordinatewise)."""
        b = [list(x) for x in coeffs]
        n = len(b) - 1
        M = self.M
        for i in range(n):
            for k in range(n - 1, i - 1, -1):
                hi = b[k + 1]
                lo = b[k]
                for t in range(self.r):
                    lo[t] = (lo[t] + c * hi[t]) % M
        return [tuple(x) for x in b]

    def evaluate(self, coeffs, x):
        acc = self.zero
        for c in reversed(coeffs):
            acc = self.add(self.mul(acc, x), c)
        return acc


@dataclass(frozen=True)
class ExtElement:
    """p^shift * sum coords[i] theta^i with coords known modulo p^N."""
    parent: ExtensionField
    coords: tuple
    shift: int
    N: int

    @classmethod
    def from_coords(cls, K, coords, N=DEFAULT_PRECISION, shift=0):
        M = K.p ** N
        coords = tuple(coords) + (0,) * (K.r - len(coords))
        return cls(K, tuple(int(c) % M for c in coords), shift, N)._normalize()

    @classmethod
    def from_padic(cls, K, x: PadicNumber, N=None):
        N = N or max(x.prec, 1)
        if x.is_zero():
            return cls(K, (0,) * K.r, x.absprec, N)
        return cls(K, (x.unit % K.p ** N,) + (0,) * (K.r - 1), x.valuation, N)

    def _normalize(self):
        vals = [vp(c, self.parent.p) for c in self.coords if c]
        if not vals:
            return self
        m = min(vals)
        if m == 0:
            return self
        pm = self.parent.p ** m
        return ExtElement(self.parent, tuple(c // pm for c in self.coords), self.shift + m, self.N - m)

    @property
    def coeffs(self):
        K = self.parent
        return [PadicNumber.from_residue(K.p, c, self.N) * PadicNumber.from_rational(K.p, Fraction(K.p) ** self.shift, self.N)
                if c else PadicNumber.zero(K.p, self.N + self.shift) for c in self.coords]

    def is_zero(self):
        return not any(self.coords)

    @property
    def absprec(self):
        return self.shift + self.N

    def _align(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExtElement.from_padic(self.parent, PadicNumber.from_rational(self.parent.p, other, self.N + 4), self.N)
        if other.parent is not self.parent:
            raise ValueError("elements of different fields")
        return other

    def __add__(self, other):
        other = self._align(other)
        K = self.parent
        p = K.p
        s = min(self.shift, other.shift)
        A = min(self.absprec, other.absprec)
        width = A - s
        if width <= 0:
            return ExtElement(K, (0,) * K.r, A, 0)
        M = p ** width
        a = [c * p ** (self.shift - s) for c in self.coords]
        b = [c * p ** (other.shift - s) for c in other.coords]
        return ExtElement(K, tuple((x + y) % M for x, y in zip(a, b)), s, width)._normalize()

    __radd__ = __add__

    def __neg__(self):
        M = self.parent.p ** self.N
        return ExtElement(self.parent, tuple((-c) % M for c in self.coords), self.shift, self.N)

    def __sub__(self, other):
        return self + (-self._align(other))

    def __rsub__(self, other):
        return self._align(other) - self

    def __mul__(self, other):
        other = self._align(other)
        K = self.parent
        N = min(self.N, other.N)
        ops = K.ops(N)
        prod = ops.mul(tuple(c % ops.M for c in self.coords), tuple(c % ops.M for c in other.coords))
        return ExtElement(K, prod, self.shift + other.shift, N)._normalize()

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._align(other)
        K = self.parent
        if other.is_zero():
            raise DivisionByIndistinguishableZero("divisor vanishes at working precision")
        N = min(self.N, other.N)
        # after normalization v(other) < 1, so one factor p makes the quotient integral
        t = 1 if (K.ops(N).val(other.coords) or 0) > 0 else 0
        ops = K.ops(N + t)
        num = tuple(c * K.p ** t for c in self.coords)
        y, lost = ops.divide(num, other.coords)
        Nq = N - lost
        if Nq <= 0:
            raise PrecisionExhausted("quotient has no significant digits")
        Mq = K.p ** Nq
        return ExtElement(K, tuple(c % Mq for c in y), self.shift - other.shift - t, Nq)._normalize()

    def __rtruediv__(self, other):
        return self._align(other) / self

    def __pow__(self, k: int):
        out = ExtElement.from_coords(self.parent, (1,), self.N)
        base = self
        if k < 0:
            base = 1 / self
            k = -k
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def valuation(self) -> Fraction:
        """v(x) in (1/e)Z, normalized so that v(p) = 1."""
        K = self.parent
        v = K.ops(self.N).val(self.coords) if self.N > 0 else None
        if v is None:
            raise PrecisionExhausted("element indistinguishable from 0")
        return Fraction(v, K.e) + self.shift

    def norm(self) -> QValue:
        return QValue.norm(self.parent.p, self.valuation())

    def is_integral(self):
        return self.is_zero() or self.valuation() >= 0

    def integral_coords(self, absprec=None):
        """Coordinates as integers modulo p^absprec (element must lie in O_K)."""
        K = self.parent
        absprec = self.absprec if absprec is None else absprec
        if self.shift < 0 and not self.is_zero():
            raise ValueError("element is not in O_K")
        M = K.p ** absprec
        return tuple(c * K.p ** self.shift % M for c in self.coords) if self.shift >= 0 else tuple(0 for _ in self.coords)

    def __repr__(self):
        return f"ExtElement({self.parent.label}, {self.coords}, p^{self.shift}, N={self.N})"


def norm_and_valuation(x: ExtElement):
    v = x.valuation()
    return v, -v


def norm_map(x: ExtElement) -> PadicNumber:
    """Determinant of multiplication by x."""
    K = x.parent
    ops = K.ops(x.N)
    d = det_exact(ops.mult_matrix(x.coords))
    return PadicNumber.from_residue(K.p, d, x.N) * PadicNumber.from_rational(K.p, Fraction(K.p) ** (K.r * x.shift), x.N)


def dist_to_base(x: ExtElement) -> QValue:
    """min over a in Q_p of ||x - a||, read from the non-constant coordinates.

    The power basis is orthogonal for the norm: unramified coordinates all have
    weight 1 and the i-th Eisenstein coordinate has weight q^(-i/e).
    """
    K = x.parent
    p = K.p
    best = None
    for i, c in enumerate(x.coords[1:], start=1):
        if c % p ** x.N:
            v = Fraction(vp(c, p)) + x.shift + (Fraction(i, K.e) if K.e > 1 else 0)
            if best is None or v < best:
                best = v
    return QValue.norm(p, best)


@dataclass(frozen=True)
class IndexValue:
    """#(O_K / O_F[x]) = q^exponent; exponent None means infinite."""
    exponent: int | None
    certified: bool

    @property
    def infinite(self):
        return self.exponent is None

    def value(self, q):
        if self.exponent is None:
            return None
        return q ** self.exponent


def power_matrix(x: ExtElement, count: int, N: int):
    K = x.parent
    if x.shift < 0:
        raise ValueError("x must be integral")
    ops = K.ops(N)
    xs = x.integral_coords(N)
    cols = [ops.one]
    for _ in range(count - 1):
        cols.append(ops.mul(cols[-1], xs))
    return [[cols[j][i] for j in range(count)] for i in range(K.r)]


def index_of_generated_order(x: ExtElement, margin: int = SAFETY_MARGIN) -> IndexValue:
    K = x.parent
    N = x.absprec
    divs = elementary_divisors(power_matrix(x, K.r, N), K.p, N)
    if any(d is None for d in divs):
        return IndexValue(None, False)
    total = sum(divs)
    if max(divs) >= N - margin:
        return IndexValue(None, False)
    return IndexValue(total, True)


def min_poly_degree(x: ExtElement, margin: int = SAFETY_MARGIN) -> int:
    """Rank of (1, x, ..., x^r); raises AmbiguousRank inside the safety margin."""
    K = x.parent
    if x.shift < 0:
        x = 1 / x
    N = x.absprec
    divs = elementary_divisors(power_matrix(x, K.r + 1, N), K.p, N)
    rank = 0
    for d in divs:
        if d is None:
            continue
        if d >= N - margin:
            raise AmbiguousRank(f"elementary divisor p^{d} too close to precision p^{N}")
        rank += 1
    return rank
