"""Root census of one polynomial in Q_p and every cataloged extension at once.

A single residue tree over Z_p, with integer arithmetic, serves all fields:

* roots in Q_p are the simple F_p residue roots met along the tree;
* in an unramified K of degree f, the disks of O_K meeting Z_p are exactly the
  tree nodes, so the new roots of K come from the residue roots lying in
  F_{p^f} but not in F_p at each node;
* in an Eisenstein K of degree e, the tree nodes are the levels divisible by e,
  and the levels in between are evaluated below each repeated F_p root.

Repeated residue roots outside F_p (rare) are handed to the generic search of
the roots module. Samples in which any decision needs digits beyond the
working precision are flagged.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .extension import EISENSTEIN, UNRAMIFIED, ExtensionField
from .padic import SAFETY_MARGIN, taylor_shift
from .roots import _newton_base, _newton_ext, _scaled, _search, nonbase_child


@dataclass
class SampleCensus:
    roots_ring: int = 0          # roots in Z_p
    roots_outside: int = 0       # roots in Q_p of norm > 1
    new: list = field(default_factory=list)   # new-root counts per field (catalog order, base excluded)
    flagged: bool = False
    base_locations: list = field(default_factory=list)   # roots in Z_p modulo p^depth
    new_locations: dict = field(default_factory=dict)    # field index -> coordinate tuples mod p^depth

    @property
    def roots_total(self):
        return self.roots_ring + self.roots_outside


class CensusEngine:
    """Fast census for polynomials with integer coefficients modulo p^N."""

    def __init__(self, p: int, fields, N: int = 48, margin: int = SAFETY_MARGIN,
                 location_depth: int = 0, tracked=()):
        self.p = p
        self.N = N
        self.M = p ** N
        self.limit = N - margin
        self.margin = margin
        self.fields = [K for K in fields if K.r > 1]
        self.unram = [(i, K) for i, K in enumerate(self.fields) if K.kind == UNRAMIFIED]
        groups = {}
        for i, K in enumerate(self.fields):
            if K.kind == EISENSTEIN:
                groups.setdefault((K.e, K.w_inv), []).append(i)
        self.groups = [(e, w, idx) for (e, w), idx in sorted(groups.items())]
        self.location_depth = location_depth
        self.tracked = set(tracked)
        self._cache = {}
        self._pw = [p ** k for k in range(N + 2)]
        self._inv_cache = {}
        if p == 2:
            self._vp = lambda x: (x & -x).bit_length() - 1
        else:
            def vpp(x, p=p):
                v = 0
                while x % p == 0:
                    x //= p
                    v += 1
                return v
            self._vp = vpp
        self._fp = ExtensionField(p, (0, 1), "base").residue

    # ---- residue root tables ----

    def _roots(self, R):
        hit = self._cache.get(R)
        if hit is not None:
            return hit
        base = self._fp.roots(R)
        extra = []
        for i, K in self.unram:
            rs = K.residue.roots(R)
            extra.append(tuple((c, mu) for c, mu in rs if c >= self.p))
        val = (base, tuple(extra))
        self._cache[R] = val
        return val

    def _eis_roots(self, R):
        key = ("e", R)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._fp.roots(R)
            self._cache[key] = hit
        return hit

    # ---- main entry ----

    def census(self, coeffs) -> SampleCensus:
        M = self.M
        c = [int(x) % M for x in coeffs]
        out = SampleCensus(new=[0] * len(self.fields))
        if not any(c):
            out.flagged = True
            return out
        self._tree(c, c, out, in_ring=True)
        rev = c[::-1]
        if rev[0] == 0:
            # leading coefficient indistinguishable from 0
            out.flagged = True
        self._tree(rev, rev, out, in_ring=False)
        return out

    def _tree(self, coeffs, b0, out: SampleCensus, in_ring: bool):
        p, M, vp, pw = self.p, self.M, self._vp, self._pw
        limit = self.limit
        n = len(b0) - 1
        alive0 = tuple(range(len(self.groups)))
        # entries (b, x0, j, alive): b_l = h_l(x0) p^(j l)
        stack = [(b0, 0, 0, alive0)]
        while stack:
            b, x0, j, alive = stack.pop()
            vals = [vp(x) if x else None for x in b]
            m = min((v for v in vals if v is not None), default=None)
            if m is None or m >= limit:
                out.flagged = True
                continue
            pm = pw[m]
            R = tuple((x // pm) % p if v == m else 0 for x, v in zip(b, vals))
            deg = len(R) - 1
            while deg > 0 and R[deg] == 0:
                deg -= 1
            if deg == 0:
                continue
            R = R[: deg + 1]
            base_roots, extra = self._roots(R)
            root_node = j == 0 and x0 == 0
            restrict = root_node and not in_ring
            if in_ring or not root_node:
                for (i, K), rs in zip(self.unram, extra):
                    for code, mu in rs:
                        if mu == 1:
                            out.new[i] += 1
                            if i in self.tracked and in_ring:
                                self._locate_unram(out, i, K, coeffs, x0, j, code)
                        else:
                            self._fallback_unram(out, i, K, b, x0, j, code, coeffs, in_ring)
            for a, mu in base_roots:
                if restrict and a != 0:
                    continue
                x = x0 + pw[j] * a
                if mu == 1:
                    if in_ring:
                        out.roots_ring += 1
                        if self.location_depth:
                            out.base_locations.append(self._locate_base(coeffs, x, j + 1))
                    else:
                        out.roots_outside += 1
                    continue
                # shifted coefficients at x: h_l(x) p^(j l)
                sh = b[:]
                for s in range(n):
                    for k in range(n - 1, s - 1, -1):
                        sh[k] = (sh[k] + a * sh[k + 1]) % M
                still = []
                for g in alive:
                    if self._intermediate(out, g, coeffs, sh, x, j, in_ring):
                        still.append(g)
                child = [(v * pw[l]) % M for l, v in enumerate(sh)]
                stack.append((child, x, j + 1, tuple(still)))

    # ---- Eisenstein levels between two tree nodes ----

    def _intermediate(self, out, g, coeffs, sh, x, j, in_ring):
        """Levels e j + i, i = 1..e-1, of the disk x + pi^(e j) O_K.

        sh holds h_l(x) p^(j l). Returns True when the branch through the
        base point x survives to the next tree node.
        """
        e, w_inv, members = self.groups[g]
        p, vp = self.p, self._vp
        limit = e * self.limit
        vals = []
        leads = []
        for l, y in enumerate(sh):
            if y:
                v = vp(y)
                vals.append(v)
                leads.append((y // self._pw[v]) % p * pow(w_inv, v - j * l, p) % p)
            else:
                vals.append(None)
                leads.append(0)
        for i in range(1, e):
            kv = [e * v + i * l if v is not None else None for l, v in enumerate(vals)]
            m = min((v for v in kv if v is not None), default=None)
            if m is None or m >= limit:
                out.flagged = True
                return False
            R = tuple(leads[l] if kv[l] == m else 0 for l in range(len(kv)))
            deg = len(R) - 1
            while deg > 0 and R[deg] == 0:
                deg -= 1
            if deg == 0:
                return False
            R = R[: deg + 1]
            zero_mu = 0
            for c, mu in self._eis_roots(R):
                if c == 0:
                    zero_mu = mu
                    continue
                for idx in members:
                    K = self.fields[idx]
                    if mu == 1:
                        out.new[idx] += 1
                        if idx in self.tracked and in_ring:
                            self._locate_eis(out, idx, K, coeffs, x, e * j + i, c)
                    else:
                        self._fallback_eis(out, idx, K, coeffs, x, e * j + i, c, in_ring)
            if zero_mu <= 1:
                # a simple root near x would lie in Q_p; nothing new below
                return False
        return True

    # ---- rare paths through the generic search ----

    def _count_generic(self, out, idx, K, item, coeffs, in_ring):
        found = _search(K, coeffs, self.N, self.margin, start=[item])
        ops = K.ops(self.N)
        for kind, payload, mu, certified in found:
            if not certified:
                out.flagged = True
                continue
            out.new[idx] += 1
            if idx in self.tracked and in_ring:
                cen, _ = payload
                tco = [ops.embed(cf) for cf in coeffs]
                out.new_locations.setdefault(idx, []).append(self._reduce(K, _newton_ext(ops, tco, cen)))

    def _fallback_unram(self, out, idx, K, b, x0, j, code, coeffs, in_ring):
        ops = K.ops(self.N)
        bK = [ops.embed(v) for v in b]
        item = nonbase_child(ops, bK, ops.embed(x0), j, code)
        self._count_generic(out, idx, K, item, coeffs, in_ring)

    def _fallback_eis(self, out, idx, K, coeffs, x, k, c, in_ring):
        ops = K.ops(self.N)
        h = taylor_shift(coeffs, x, self.M)
        bK = _scaled(ops, h, k)
        item = nonbase_child(ops, bK, ops.embed(x), k, c)
        self._count_generic(out, idx, K, item, coeffs, in_ring)

    # ---- locations ----

    def _reduce(self, K, coords):
        D = self.p ** self.location_depth
        return tuple(int(t) % D for t in coords)

    def _locate_base(self, coeffs, x, known):
        if known < self.location_depth:
            x = _newton_base(coeffs, x, self.p, self.N, self.location_depth + 2)
        return x % self.p ** self.location_depth

    def _locate_unram(self, out, idx, K, coeffs, x0, j, code):
        ops = K.ops(self.N)
        cen = ops.add(ops.embed(x0), ops.smul(self._pw[j], ops.lift(code)))
        tco = [ops.embed(cf) for cf in coeffs]
        out.new_locations.setdefault(idx, []).append(self._reduce(K, _newton_ext(ops, tco, cen)))

    def _locate_eis(self, out, idx, K, coeffs, x, k, c):
        ops = K.ops(self.N)
        cen = ops.add(ops.embed(x), ops.mul(ops.pi_power(k), ops.lift(c)))
        tco = [ops.embed(cf) for cf in coeffs]
        out.new_locations.setdefault(idx, []).append(self._reduce(K, _newton_ext(ops, tco, cen)))
