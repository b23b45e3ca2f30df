"""Find the isomorphism classes of totally ramified cubic extensions of Q_3.

Eisenstein cubics with small coefficients are grouped by root finding: two
Eisenstein polynomials define isomorphic fields exactly when one has a root in
the field of the other. The search stops once the classes found account for
the full mass sum of discriminant norms, 1/3.

Prints the table rows used by the catalog module.
"""
from fractions import Fraction
import argparse
import itertools

from padic_roots.extension import ExtensionField
from padic_roots.padic import PadicPolynomial
from padic_roots.roots import count_roots


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modulus", type=int, default=27, help="coefficients are enumerated modulo this power of 3")
    args = ap.parse_args()
    p, m = 3, args.modulus
    classes = []
    mass = Fraction(0)
    middle = [a for a in range(0, m, p)]
    consts = [a for a in range(p, m, p) if a % (p * p)]
    for a0, a1, a2 in itertools.product(consts, middle, middle):
        g = (a0, a1, a2, 1)
        P = PadicPolynomial(p, g)
        if any(count_roots(P, L, locate=False).count() for L in classes):
            continue
        K = ExtensionField(p, g, "eisenstein")
        aut = count_roots(P, K, locate=False).count()
        K.aut_count = aut
        classes.append(K)
        mass += Fraction(3, aut) * K.disc_norm
        print(f"({g}, {K.disc_valuation}, {aut}),  # mass so far {mass}")
        if mass == Fraction(1, 3):
            break
    print(f"{len(classes)} classes, mass {mass}")


if __name__ == "__main__":
    main()
