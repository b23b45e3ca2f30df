"""Extensions of Q_p of degree at most 3, certified by the mass formula."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import MassMismatch, UnsupportedDegree
from .extension import BASE, EISENSTEIN, UNRAMIFIED, ExtensionField, poly_discriminant
from .padic import vp
from .resfield import find_irreducible

# Wild cases: (defining polynomial, disc valuation, #Aut).
# Quadratics over Q_2 by square class of the discriminant.
WILD_TABLE = {
    (2, 2): [
        ((-2, 2, 1), 2, 2),
        ((2, 2, 1), 2, 2),
        ((-2, 0, 1), 3, 2),
        ((2, 0, 1), 3, 2),
        ((-6, 0, 1), 3, 2),
        ((6, 0, 1), 3, 2),
    ],
    (2, 3): [
        ((-2, 0, 0, 1), 2, 1),
    ],
    # produced by scripts/generate_cubic_catalog.py
    (3, 3): [
        ((3, 0, 0, 1), 5, 1),
        ((3, 0, 3, 1), 4, 1),
        ((3, 0, 6, 1), 4, 3),
        ((3, 3, 0, 1), 3, 1),
        ((3, 6, 0, 1), 3, 1),
        ((3, 9, 0, 1), 5, 1),
        ((3, 18, 0, 1), 5, 1),
        ((6, 0, 3, 1), 4, 3),
        ((12, 0, 6, 1), 4, 3),
    ],
}


def _non_residue(p):
    return next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1)


def _non_cube(p):
    return next(a for a in range(2, p) if pow(a, (p - 1) // 3, p) != 1)


@lru_cache(maxsize=None)
def unramified_extension(p: int, f: int) -> ExtensionField:
    """The unramified extension of degree f, presented by a lifted irreducible polynomial."""
    if f < 1:
        raise ValueError("f must be positive")
    if f == 1:
        return ExtensionField(p, (0, 1), BASE, label=f"Q{p}", aut_count=1, galois=True)
    g = find_irreducible(p, f)
    return ExtensionField(p, g, UNRAMIFIED, label=f"Q{p}^unr{f}", disc_valuation=0, aut_count=f, galois=True)


def _ramified(p, r):
    if (p, r) in WILD_TABLE:
        return [(g, v, a) for g, v, a in WILD_TABLE[(p, r)]]
    if r == 2:
        if p == 2:
            raise AssertionError("wild table missing")
        return [((-p, 0, 1), 1, 2), ((-_non_residue(p) * p, 0, 1), 1, 2)]
    if r == 3:
        if p % 3 == 1:
            c = _non_cube(p)
            return [((-p * u, 0, 0, 1), 2, 3) for u in (1, c, c * c % p)]
        return [((-p, 0, 0, 1), 2, 1)]
    raise UnsupportedDegree(f"degree {r} ramified extensions are not cataloged")


@dataclass(frozen=True)
class Extensions:
    """Isomorphism classes of one degree and the number of embedded copies."""
    classes: tuple
    embedded: int


class Catalog:
    """All extensions of Q_p of degree 1, 2, 3; immutable after construction."""

    def __init__(self, p: int):
        self.p = p
        self.base = unramified_extension(p, 1)
        self._by_degree = {1: (self.base,)}
        for r in (2, 3):
            fields = [unramified_extension(p, r)]
            for i, (g, v, a) in enumerate(_ramified(p, r)):
                K = ExtensionField(p, g, EISENSTEIN, label=f"Q{p}[{_poly_str(g)}]",
                                   disc_valuation=v, aut_count=a, galois=(a == r))
                computed = K.computed_disc_valuation()
                if computed != v:
                    raise MassMismatch(computed, v, f"stored discriminant of {K.label}")
                fields.append(K)
            if r == 2:
                for K in fields:
                    K.square_class = poly_discriminant(K.poly)
            self._by_degree[r] = tuple(fields)
        for r in (1, 2, 3):
            for f in range(1, r + 1):
                if r % f == 0:
                    validate_mass(self, r, f)

    def fields(self, r: int, f: int | None = None):
        if r not in self._by_degree:
            raise UnsupportedDegree(f"degree {r} is not cataloged")
        return tuple(K for K in self._by_degree[r] if f is None or K.f == f)

    def all_fields(self):
        return tuple(K for r in (1, 2, 3) for K in self._by_degree[r])

    def by_label(self, label):
        for K in self.all_fields():
            if K.label == label:
                return K
        raise KeyError(label)

    def to_json(self):
        return [
            {"p": K.p, "r": K.r, "e": K.e, "f": K.f, "label": K.label, "poly": list(K.poly),
             "disc_valuation": K.disc_valuation, "aut_count": K.aut_count,
             "embedded_multiplicity": K.embedded_multiplicity}
            for K in self.all_fields()
        ]


def _poly_str(g):
    terms = []
    for i in range(len(g) - 1, -1, -1):
        c = g[i]
        if c == 0:
            continue
        mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if i == 0:
            terms.append(f"{c:+d}")
        elif c == 1:
            terms.append(f"+{mon}")
        elif c == -1:
            terms.append(f"-{mon}")
        else:
            terms.append(f"{c:+d}{mon}")
    s = "".join(terms)
    return s[1:] if s.startswith("+") else s


@lru_cache(maxsize=None)
def get_catalog(p: int) -> Catalog:
    return Catalog(p)


def enumerate_extensions(p: int, r: int) -> Extensions:
    if r not in (1, 2, 3):
        raise UnsupportedDegree(f"degree {r} is not cataloged")
    classes = get_catalog(p).fields(r)
    return Extensions(classes, sum(K.embedded_multiplicity for K in classes))


def mass_closed_form(p: int, r: int, f: int) -> Fraction:
    """Sum of ||D_K|| over embedded extensions of degree r and residue degree f."""
    return Fraction(r, p ** r) * Fraction(p ** f, f)


def validate_mass(catalog: Catalog, r: int, f: int) -> Fraction:
    """Exact check of the mass identity; returns the common value."""
    if r % f:
        raise ValueError("f must divide r")
    lhs = sum((K.embedded_multiplicity * K.disc_norm for K in catalog.fields(r, f)), Fraction(0))
    rhs = mass_closed_form(catalog.p, r, f)
    if lhs != rhs:
        raise MassMismatch(lhs, rhs, f"p={catalog.p} r={r} f={f}")
    return lhs


@dataclass(frozen=True)
class EtaleClass:
    """A product of fields; factors are (field, multiplicity) pairs."""
    factors: tuple

    @property
    def degree(self):
        return sum(K.r * a for K, a in self.factors)

    @property
    def aut_count(self):
        out = 1
        for K, a in self.factors:
            out *= math.factorial(a) * K.aut_count ** a
        return out

    @property
    def label(self):
        parts = []
        for K, a in self.factors:
            parts.append(K.label if a == 1 else f"{K.label}^{a}")
        return " x ".join(parts)

    def key(self):
        return tuple(sorted((K.label, a) for K, a in self.factors))

    def __eq__(self, other):
        return isinstance(other, EtaleClass) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"EtaleClass({self.label})"


def etale_classes(p: int, r: int):
    """All products of cataloged fields of total degree r."""
    if r not in (1, 2, 3):
        raise UnsupportedDegree(f"degree {r} is not cataloged")
    cat = get_catalog(p)
    pool = [K for d in range(1, r + 1) for K in cat.fields(d)]
    out = []
    for m in range(1, r + 1):
        for combo in itertools.combinations_with_replacement(range(len(pool)), m):
            if sum(pool[i].r for i in combo) != r:
                continue
            cnt = Counter(combo)
            out.append(EtaleClass(tuple((pool[i], a) for i, a in sorted(cnt.items()))))
    return out
