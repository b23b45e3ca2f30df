"""Depth-5 class histograms of new roots in Q_4 and an Eisenstein quadratic over Q_2.

Counts come from the cached p = 2 census (n = 5). Each grid is written as CSV
in the refinement order of the classes, next to the exact expected counts,
and checked by a chi-square test with Bonferroni correction.

    python3 scripts/spatial_histograms.py [--out results]
"""
import argparse
from pathlib import Path

from padic_roots.catalog import get_catalog
from padic_roots.harness import (DEFAULT_CACHE, cached_census, class_ordering, degree_entry, grid_csv, preset,
                                 spatial_chi_square, spatial_expected)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(DEFAULT_CACHE))
    args = ap.parse_args()
    cfg = preset("p2")
    report = cached_census(cfg)
    depth = cfg.histogram_depth
    order = class_ordering(cfg.p, depth)
    level = cfg.chi2_level / len(cfg.tracked)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in cfg.tracked_degrees:
        d = degree_entry(report, n)
        valid = d["samples"] - d["flagged"]
        for lab in cfg.tracked:
            K = get_catalog(cfg.p).by_label(lab)
            grid = d["spatial"][lab]
            exp = spatial_expected(K, n, depth)
            expected = [[f"{float(exp[(a, b)] * valid):.2f}" for b in range(2 ** depth)] for a in range(2 ** depth)]
            stat, dof, pval = spatial_chi_square(grid, K, n, valid, depth)
            safe = lab.replace("^", "").replace("[", "_").replace("]", "").replace("+", "p").replace("-", "m")
            header = [f"new roots of {valid} random polynomials of degree {n} in {lab}, classes mod 2^{depth}",
                      "rows: coordinate on 1, columns: coordinate on the generator",
                      f"chi2 {stat:.2f} on {dof} dof, p-value {pval:.4f} (level {level})"]
            (out / f"histogram_{safe}_observed.csv").write_text(grid_csv(grid, order, header))
            (out / f"histogram_{safe}_expected.csv").write_text(grid_csv(expected, order, header))
            verdict = "pass" if pval > level else "FAIL"
            print(f"{lab} n={n}: chi2={stat:.2f} dof={dof} p={pval:.4f} {verdict}")


if __name__ == "__main__":
    main()
