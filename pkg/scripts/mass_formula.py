"""Weighted sums of etale densities for r = 2 and r = 3, and the class frequencies at n = r.

Uses the cached p = 2 and p = 5 censuses.

    python3 scripts/mass_formula.py
"""
from padic_roots.harness import DEFAULT_CACHE, mass_formula_census, preset


def show(st):
    return f"{st['mean']:.4f} +- {st['se']:.4f} (z={st['z']:+.2f})"


def main():
    for p in (2, 5):
        cfg = preset(f"p{p}")
        for r in (2, 3):
            print(f"p={p} r={r}")
            for n, entry in sorted(mass_formula_census(cfg, r, DEFAULT_CACHE).items()):
                line = f"  n={n}: weighted sum {show(entry['weighted_sum'])}"
                if "symmetry" in entry and r == 2:
                    line += f"; Sigma(2,5) - Sigma(3,5) = {show(entry['symmetry'])}"
                print(line)
                for lab, st in sorted(entry.get("classes", {}).items()):
                    theory = st["theory"] or "-"
                    print(f"    {lab:<40} {st['mean']:.5f} (exact {theory})")


if __name__ == "__main__":
    main()
