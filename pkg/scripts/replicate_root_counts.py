"""Average number of new roots per extension for p = 2 and p = 5, degrees 2 to 5.

Runs (or loads from results/) the 500k-sample census and writes one CSV per
prime with the empirical mean, its standard error and the exact value when
one is known.

    python3 scripts/replicate_root_counts.py [--samples 500000] [--primes 2 5]
"""
import argparse
import csv
from dataclasses import replace
from pathlib import Path

from padic_roots.harness import DEFAULT_CACHE, cached_census, preset


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=500_000)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 5])
    ap.add_argument("--out", default=str(DEFAULT_CACHE))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for p in args.primes:
        cfg = replace(preset(f"p{p}"), sample_count=args.samples)
        report = cached_census(cfg)
        path = out / f"root_counts_p{p}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "field", "mean", "se", "theory", "bracket_lo", "bracket_hi", "z"])
            for d in report["degrees"]:
                for lab, st in d["fields"].items():
                    w.writerow([d["n"], lab, st["mean"], st["se"], st["theory"],
                                st["bracket"][0], st["bracket"][1], st["z"]])
        print(f"p={p}: wrote {path}")
        for d in report["degrees"]:
            print(f"  n={d['n']} roots in Q_{p}: {d['roots']['mean']:.4f} +- {d['roots']['se']:.4f}"
                  f"  flagged {d['flagged']}")


if __name__ == "__main__":
    main()
