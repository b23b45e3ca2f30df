"""Table-driven arithmetic in residue fields F_{p^f}.

Elements are encoded as integers sum d_i p^i where (d_i) are coordinates in
the basis 1, t, ..., t^(f-1) and t is a root of the chosen modulus.
"""
from __future__ import annotations


class ResidueField:
    def __init__(self, p: int, modulus: tuple):
        # modulus: monic irreducible polynomial mod p, low degree first
        self.p = p
        self.f = len(modulus) - 1
        self.modulus = tuple(c % p for c in modulus)
        self.q = p ** self.f
        q, f = self.q, self.f
        digits = [self._digits(c) for c in range(q)]
        self.add = [[self._code([(a + b) % p for a, b in zip(digits[x], digits[y])]) for y in range(q)] for x in range(q)]
        self.neg = [self._code([(-a) % p for a in digits[x]]) for x in range(q)]
        self.mul = [[0] * q for _ in range(q)]
        for x in range(q):
            for y in range(x, q):
                z = self._code(self._mulpoly(digits[x], digits[y]))
                self.mul[x][y] = z
                self.mul[y][x] = z
        self.inv = [0] * q
        for x in range(1, q):
            row = self.mul[x]
            for y in range(1, q):
                if row[y] == 1:
                    self.inv[x] = y
                    break
        self._root_cache = {}

    def _digits(self, c):
        out = []
        for _ in range(self.f):
            out.append(c % self.p)
            c //= self.p
        return out

    def _code(self, d):
        c = 0
        for x in reversed(d):
            c = c * self.p + x
        return c

    def _mulpoly(self, a, b):
        p, f = self.p, self.f
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % p
        m = self.modulus
        for k in range(2 * f - 2, f - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for i in range(f):
                    prod[k - f + i] = (prod[k - f + i] - c * m[i]) % p
        return prod[:f]

    def in_prime_field(self, c):
        return c < self.p

    def evaluate(self, R, x):
        acc = 0
        add, mul = self.add, self.mul
        for c in reversed(R):
            acc = add[mul[acc][x]][c]
        return acc

    def divide_linear(self, R, x):
        """Quotient and remainder of R by (y - x)."""
        add, mul = self.add, self.mul
        n = len(R) - 1
        quo = [0] * n
        acc = 0
        for k in range(n, 0, -1):
            acc = add[mul[acc][x]][R[k]]
            quo[k - 1] = acc
        rem = add[mul[acc][x]][R[0]]
        return quo, rem

    def roots(self, R: tuple):
        """Roots of R (codes, low degree first, nonzero) as a tuple of (root, multiplicity)."""
        hit = self._root_cache.get(R)
        if hit is not None:
            return hit
        n = len(R) - 1
        while n > 0 and R[n] == 0:
            n -= 1
        poly = list(R[: n + 1])
        out = []
        if n > 0:
            found = 0
            for x in range(self.q):
                if self.evaluate(poly, x) == 0:
                    mult = 0
                    cur = poly
                    while len(cur) > 1:
                        quo, rem = self.divide_linear(cur, x)
                        if rem:
                            break
                        mult += 1
                        cur = quo
                    out.append((x, mult))
                    found += mult
                    if found == n:
                        break
        res = tuple(out)
        if len(self._root_cache) < 2_000_000:
            self._root_cache[R] = res
        return res


def find_irreducible(p: int, f: int) -> tuple:
    """Lexicographically first monic irreducible polynomial of degree f over F_p."""
    if f == 1:
        return (0, 1)
    import itertools
    for tail in itertools.product(range(p), repeat=f):
        poly = tuple(tail) + (1,)
        if poly[0] == 0:
            continue
        if _is_irreducible(poly, p):
            return poly
    raise ValueError("no irreducible polynomial found")


def _polymod(a, m, p):
    a = [x % p for x in a]
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            break
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i in range(dm + 1):
            a[shift + i] = (a[shift + i] - c * m[i]) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymulmod(a, b, m, p):
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    return _polymod(prod, m, p)


def _polygcd(a, b, p):
    a = _polymod(a, [1], p) if False else [x % p for x in a]
    while a and a[-1] == 0:
        a.pop()
    b = [x % p for x in b]
    while b and b[-1] == 0:
        b.pop()
    while b:
        a, b = b, _polymod(a, b, p)
    return a


def _is_irreducible(poly, p):
    """Rabin-style test: x^(p^k) - x coprime to poly for k < f, and poly | x^(p^f) - x."""
    f = len(poly) - 1
    x = [0, 1]
    cur = x
    for k in range(1, f + 1):
        # cur = x^(p^k) mod poly
        res = [1]
        base = cur
        e = p
        while e:
            if e & 1:
                res = _polymulmod(res, base, poly, p)
            base = _polymulmod(base, base, poly, p)
            e >>= 1
        cur = res
        diff = list(cur) + [0] * max(0, 2 - len(cur))
        diff[1] = (diff[1] - 1) % p
        if k < f:
            if f % k == 0 and len(_polygcd(list(poly), diff, p)) > 1:
                return False
        else:
            while diff and diff[-1] == 0:
                diff.pop()
            return not diff
    return True
