"""Root isolation in a cataloged extension, Kac-Rice evaluation, etale classification."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (DegenerateRoot, InseparableAtPrecision, KacRiceUnresolved, PrecisionExhausted)
from .extension import ExtElement, ExtensionField, dist_to_base
from .padic import (DEFAULT_PRECISION, SAFETY_MARGIN, PadicNumber, PadicPolynomial, reverse_poly, taylor_shift, vp)

NEW, OLD, AMBIGUOUS = "new", "old", "ambiguous"


@dataclass
class RootRecord:
    location: ExtElement | None
    in_ring: bool
    is_new: str
    multiplicity: int = 1
    certified: bool = True
    radius: Fraction | None = None  # valuation of the isolating disk (p-units)


class RootList(list):
    """List of RootRecord plus a flag for uncertified outcomes."""

    @property
    def degenerate(self):
        return any(not r.certified for r in self)

    def count(self, new_only=False, in_ring=None):
        return sum(1 for r in self if r.certified and (not new_only or r.is_new == NEW)
                   and (in_ring is None or r.in_ring == in_ring))


def _scaled(ops, h, k):
    """b_l = h_l * pi^(k l) for integer Hasse coefficients h."""
    return [ops.smul(x, ops.pi_power(k * l)) for l, x in enumerate(h)]


def _residue_poly(ops, b, limit):
    vals = [ops.val(x) for x in b]
    known = [v for v in vals if v is not None]
    if not known:
        return None, None
    m = min(known)
    if m >= limit:
        return m, None
    R = [ops.lead(x, m) if v == m else 0 for x, v in zip(b, vals)]
    while len(R) > 1 and R[-1] == 0:
        R.pop()
    return m, tuple(R)


def _search(K: ExtensionField, coeffs, N, margin=SAFETY_MARGIN, restrict_zero=False, max_nodes=100000,
            start=None, trace=None):
    """Roots of an integral polynomial in O_K (or in m_K when restrict_zero).

    Returns a list of tuples (kind, payload, multiplicity, certified):
    kind 'base' with payload (x0, k) for a simple root in a disk meeting Q_p,
    kind 'new' with payload (center tuple, k) for a simple root in a disk avoiding Q_p,
    kind 'cluster' for disks where certification failed.
    When trace is a list, the content valuation of every visited node is appended.
    """
    ops = K.ops(N)
    p, e = K.p, K.e
    M = ops.M
    limit = e * (N - margin)
    res = K.residue
    out = []
    # base-mode entries ("b", x0, k, restrict); general entries ("g", coefficients, center, k)
    stack = list(start) if start is not None else [("b", 0, 0, restrict_zero)]
    nodes = 0
    while stack:
        nodes += 1
        if nodes > max_nodes:
            out.append(("cluster", None, 0, False))
            break
        item = stack.pop()
        if item[0] == "b":
            _, x0, k, restrict = item
            h = taylor_shift(coeffs, x0, M)
            b = _scaled(ops, h, k)
            center = ops.embed(x0)
        else:
            _, b, center, k = item
            restrict = False
        m, R = _residue_poly(ops, b, limit)
        if trace is not None and m is not None:
            trace.append(m)
        if R is None:
            deg = len(b) - 1
            out.append(("cluster", (center, k), deg, False))
            continue
        if len(R) == 1:
            continue
        for c, mu in res.roots(R):
            if restrict and c != 0:
                continue
            if item[0] == "b":
                if k % e == 0:
                    base_child = c < p
                    if base_child:
                        t = c * pow(K.w_inv, -(k // e), p) % p if e > 1 else c
                        x_child = x0 + p ** (k // e) * t
                else:
                    base_child = c == 0
                    x_child = x0
                if base_child:
                    if mu == 1:
                        out.append(("base", (x_child, k + 1), 1, True))
                    else:
                        stack.append(("b", x_child, k + 1, False))
                    continue
            if mu == 1:
                lc = ops.lift(c)
                out.append(("new", (ops.add(center, ops.mul(ops.pi_power(k), lc)), k + 1), 1, True))
            else:
                stack.append(nonbase_child(ops, b, center, k, c))
    return out


def nonbase_child(ops, b, center, k, c):
    """Search entry for the disk center + pi^k (lift(c) + pi O_K), given coefficients b at level k."""
    lc = ops.lift(c)
    shifted = ops.taylor(b, lc)
    child = [ops.mul(x, ops.pi_power(l)) for l, x in enumerate(shifted)]
    return ("g", child, ops.add(center, ops.mul(ops.pi_power(k), lc)), k + 1)


def _newton_base(coeffs, x, p, N, digits):
    """Refine an integer approximation of a simple root of an integral polynomial."""
    M = p ** N
    dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]

    def ev(cs, t):
        acc = 0
        for c in reversed(cs):
            acc = (acc * t + c) % M
        return acc

    for _ in range(64):
        fx = ev(coeffs, x)
        if fx == 0:
            break
        dx = ev(dcoeffs, x)
        a = vp(dx, p)
        if a is None:
            break
        vf = vp(fx, p)
        if vf >= digits + a:
            break
        pa = p ** a
        step = (fx // pa) * pow(dx // pa, -1, M) % M
        x = (x - step) % M
    return x


def _newton_ext(ops, coeffs_t, x, rounds=12):
    dco = [ops.smul(i, c) for i, c in enumerate(coeffs_t)][1:]
    for _ in range(rounds):
        fx = ops.evaluate(coeffs_t, x)
        if ops.val(fx) is None:
            break
        dx = ops.evaluate(dco, x)
        if ops.val(dx) is None:
            break
        try:
            step, _ = ops.divide(fx, dx)
        except ZeroDivisionError:
            break
        x = ops.sub(x, step)
    return x


def count_roots(P: PadicPolynomial, K: ExtensionField, prec: int | None = None, locate: bool = True,
                margin: int = SAFETY_MARGIN) -> RootList:
    """All roots of P in K, certified by residue refinement and Hensel's lemma."""
    N = prec or P.N
    p = K.p
    if not any(c % p ** N for c in P.coeffs):
        raise PrecisionExhausted("polynomial vanishes at working precision")
    ops = K.ops(N)
    out = RootList()
    prime_degree_new = K.r > 1
    for in_ring, poly in ((True, P), (False, reverse_poly(P))):
        coeffs = list(poly.coeffs)
        if not in_ring and coeffs[0] % p ** N == 0:
            # leading coefficient of P indistinguishable from 0: a root at infinity cannot be excluded
            out.append(RootRecord(None, False, AMBIGUOUS, 1, False))
        found = _search(K, coeffs, N, margin, restrict_zero=not in_ring)
        tcoeffs = [ops.embed(c) for c in coeffs]
        for kind, payload, mu, certified in found:
            if not certified:
                out.append(RootRecord(None, in_ring, AMBIGUOUS, mu, False))
                continue
            if kind == "base":
                x0, k = payload
                loc = None
                if locate:
                    loc_int = _newton_base(coeffs, x0, p, N, N - margin)
                    loc = K.element((loc_int,), N - margin)
                status = NEW if not prime_degree_new else OLD
                radius = Fraction(k, K.e)
            else:
                cen, k = payload
                loc = None
                if locate:
                    loc = ExtElement.from_coords(K, _newton_ext(ops, tcoeffs, cen), N - margin)
                status = NEW
                radius = Fraction(k, K.e)
            if not in_ring and loc is not None:
                if loc.is_zero():
                    out.append(RootRecord(None, False, AMBIGUOUS, 1, False))
                    continue
                loc = 1 / loc
            out.append(RootRecord(loc, in_ring, status, mu, True, radius))
    return out


def multiplicity_weight(mu: int, q: int) -> Fraction:
    """(q^mu - q^(mu-1)) / (q^mu - 1), the displayed contribution of a root of multiplicity mu."""
    if mu < 1:
        raise ValueError("multiplicity must be positive")
    return Fraction(q ** mu - q ** (mu - 1), q ** mu - 1)


def monomial_kac_rice_value(mu: int, K: ExtensionField) -> Fraction:
    """Exact Kac-Rice value of X^mu over O_K at any s divisible by mu.

    Equals ||mu||^r (Q^mu - Q^(mu-1)) / (Q^mu - 1) with Q = q^f, which differs
    from the multiplicity weight by the factor ||mu||^r when p divides mu.
    """
    Q = K.p ** K.f
    v = vp(mu, K.p) or 0
    return Fraction(1, K.p ** (K.r * v)) * Fraction(Q ** mu - Q ** (mu - 1), Q ** mu - 1)


def kac_rice_estimate(P: PadicPolynomial, K: ExtensionField, s: int, grid_depth: int = 0,
                      max_depth: int | None = None, check_degenerate: bool = True) -> Fraction:
    """Exact value of q^(s r) * integral over O_K of ||P'||^r 1{||P|| <= q^-s}.

    Cells x0 + pi^k O_K are subdivided until both the indicator and ||P'|| are
    constant on them, or until a closed form applies (Hensel cells and
    monomial cells).
    """
    if check_degenerate:
        _check_separable_roots(P, K)
    N = P.N
    ops = K.ops(N)
    p, e, f, r = K.p, K.e, K.f, K.r
    Q = p ** f
    target = e * s
    limit = e * (N - SAFETY_MARGIN)
    max_depth = max_depth if max_depth is not None else limit
    res = K.residue
    total = Fraction(0)
    coeffs = [ops.embed(c) for c in P.coeffs]
    derivative_mult = [ops.embed(j) for j in range(len(coeffs))]
    stack = [(coeffs, 0)]
    # start from the grid of residues mod pi^grid_depth
    for _ in range(max(grid_depth, 0)):
        nxt = []
        for b, k in stack:
            for c in range(res.q):
                lc = ops.lift(c)
                shifted = ops.taylor(b, lc)
                nxt.append(([ops.mul(x, ops.pi_power(l)) for l, x in enumerate(shifted)], k + 1))
        stack = nxt
    while stack:
        b, k = stack.pop()
        vals = [ops.val(x) for x in b]
        INF = float("inf")
        v = [x if x is not None else INF for x in vals]
        if v[0] < min([target] + v[1:]):
            continue
        n = len(b) - 1
        if n == 0:
            raise DegenerateRoot("constant polynomial vanishing to high order")
        rest_f = min(v[2:], default=INF)
        dvals = [INF] * (n + 1)
        for j in range(2, n + 1):
            if vals[j] is not None:
                dj = ops.val(ops.mul(derivative_mult[j], b[j]))
                dvals[j] = dj if dj is not None else INF
        rest_d = min(dvals[2:], default=INF)
        measure = Fraction(1, Q ** k)
        if v[1] < rest_f and v[0] >= v[1]:
            # Hensel cell: y -> P is b_1 times an isometry of O_K
            deriv_exp = f * (v[1] - k)
            total += measure * Fraction(1, p ** deriv_exp) * Fraction(1, Q ** max(0, target - v[1]))
            continue
        if min(v) >= target and v[1] < rest_d:
            total += measure * Fraction(1, p ** (f * (v[1] - k)))
            continue
        nonzero = [j for j in range(n + 1) if vals[j] is not None]
        if k == 0 and len(nonzero) == 1 and nonzero[0] >= 1:
            # only at the top cell are vanishing coefficients known to be exact zeros
            mu = nonzero[0]
            bmu = b[mu]
            vmu = vals[mu]
            dmu = ops.val(ops.mul(derivative_mult[mu], bmu))
            if dmu is None:
                raise KacRiceUnresolved("derivative vanishes at precision")
            t0 = max(0, -((vmu - target) // mu))
            geo = Fraction(Q - 1, Q) * Fraction(1, Q ** (t0 * mu)) / (1 - Fraction(1, Q ** mu))
            total += measure * Fraction(1, p ** (f * (dmu - k))) * geo
            continue
        if k >= max_depth or min(v) >= limit:
            raise KacRiceUnresolved(f"cell subdivision did not terminate (depth {k})")
        for c in range(res.q):
            lc = ops.lift(c)
            shifted = ops.taylor(b, lc)
            stack.append(([ops.mul(x, ops.pi_power(l)) for l, x in enumerate(shifted)], k + 1))
    return total * Fraction(p ** (s * r))


def _check_separable_roots(P, K):
    """Raise DegenerateRoot when a repeated root is detected in O_K."""
    roots = count_roots(P, K, locate=False)
    if any(not rr.certified for rr in roots):
        raise DegenerateRoot("multiple root or uncertified cluster")


def stable_s(P: PadicPolynomial, K: ExtensionField) -> int:
    """An s beyond which the Kac-Rice value equals the number of roots in O_K.

    Taken from the valuations met while isolating the roots and the critical points.
    """
    N = P.N
    ops = K.ops(N)
    M = ops.M
    worst = 0
    coeffs = list(P.coeffs)
    contents = []
    for kind, payload, mu, cert in _search(K, coeffs, N, trace=contents):
        worst = max(worst, payload[1] if payload else 0)
    # on a cell without roots ||P|| is the content of the node; s must exceed it
    worst = max([worst] + [m // K.e + 1 for m in contents])
    # values of P at roots of P' in O_K bound where the indicator can stay ambiguous
    dP = PadicPolynomial(P.p, tuple(i * c for i, c in enumerate(P.coeffs))[1:] or (0,), N)
    if any(dP.coeffs):
        tco = [ops.embed(c) for c in coeffs]
        dco = list(dP.coeffs)
        for kind, payload, mu, cert in _search(K, dco, N):
            if not payload:
                continue
            cen, k = payload
            # refine the critical point before reading off the valuation of P there
            if kind == "base":
                cen = ops.embed(_newton_base(dco, payload[0], P.p, N, N - SAFETY_MARGIN))
            elif kind == "new":
                cen = _newton_ext(ops, [ops.embed(c) for c in dco], cen)
            val = ops.val(ops.evaluate(tco, cen))
            worst = max(worst, k, val if val is not None else 0)
    return worst + 2


def square_class(a: PadicNumber):
    """(valuation parity, unit class): Legendre symbol for odd p, unit mod 8 for p = 2."""
    if a.is_zero():
        raise PrecisionExhausted("zero has no square class")
    p = a.p
    par = a.valuation % 2
    if p == 2:
        if a.prec < 3:
            raise PrecisionExhausted("need three digits of the unit")
        return par, a.unit % 8
    u = a.unit % p
    return par, 1 if pow(u, (p - 1) // 2, p) == 1 else -1


def square_class_rep(p: int, cls) -> int:
    """A small integer in the given square class."""
    par, u = cls
    if p == 2:
        return 2 ** par * u
    if u == 1:
        return p ** par
    nr = next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1)
    return nr * p ** par


def disc_of(P: PadicPolynomial) -> PadicNumber:
    d = poly_discriminant_general(P.coeffs)
    return PadicNumber.from_residue(P.p, d, P.N)


def poly_discriminant_general(c):
    """Discriminant of a (not necessarily monic) integer polynomial of degree 2 or 3."""
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    n = len(c) - 1
    if n == 2:
        a0, a1, a2 = c
        return a1 * a1 - 4 * a0 * a2
    if n == 3:
        d, cc, b, a = c
        return b * b * cc * cc - 4 * a * cc ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d + 18 * a * b * cc * d
    raise ValueError("degree 2 or 3 expected")


def classify_etale(P: PadicPolynomial, catalog):
    """Isomorphism class of Q_p[X]/P for separable P of degree 2 or 3."""
    from .catalog import EtaleClass
    n = P.degree()
    if n != P.degree_bound or n not in (2, 3):
        raise ValueError("P must have exact degree 2 or 3")
    disc = disc_of(P)
    if disc.is_zero() or disc.valuation >= P.N - SAFETY_MARGIN:
        raise InseparableAtPrecision("discriminant indistinguishable from 0")
    base = catalog.base
    if n == 2:
        cls = square_class(disc)
        if cls == square_class(PadicNumber.from_rational(P.p, 1)):
            return EtaleClass(((base, 2),))
        for K in catalog.fields(2):
            if square_class(PadicNumber.from_rational(P.p, K.square_class)) == cls:
                return EtaleClass(((K, 1),))
        raise LookupError("quadratic square class missing from catalog")
    z = count_roots(P, base, locate=False)
    if z.degenerate:
        raise InseparableAtPrecision("uncertified root cluster")
    zf = z.count()
    if zf == 3:
        return EtaleClass(((base, 3),))
    if zf == 1:
        # the quadratic factor has the discriminant of P up to squares
        cls = square_class(disc)
        for K in catalog.fields(2):
            if square_class(PadicNumber.from_rational(P.p, K.square_class)) == cls:
                return EtaleClass(((base, 1), (K, 1)))
        raise LookupError("no quadratic factor field found")
    for L in catalog.fields(3):
        rr = count_roots(P, L, locate=False)
        if rr.count() >= 1:
            return EtaleClass(((L, 1),))
    raise LookupError("no cubic field found")
