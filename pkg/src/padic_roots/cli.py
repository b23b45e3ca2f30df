"""Command line entry points; every command prints JSON unless it writes files."""
from __future__ import annotations

import argparse
import json
import subprocess
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import asymptotics, density
from .catalog import get_catalog
from .errors import PadicError
from .harness import RunConfig, cached_census, preset, report_csv, run_census
from .padic import PadicPolynomial
from .qvalue import QValue
from .roots import count_roots


def _frac(x):
    if x is None:
        return None
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _density_json(v):
    return {"lo": _frac(v.lo), "hi": _frac(v.hi), "exact": v.is_exact}


def _field(p, label):
    cat = get_catalog(p)
    if label is None:
        return cat.base
    try:
        return cat.all_fields()[int(label)]
    except ValueError:
        return cat.by_label(label)


def parse_coefficient(text: str, p: int):
    """Decimal integer or fraction, or 'digits:d0.d1.d2...' (p-adic digits, least significant first)."""
    if text.startswith("digits:"):
        digits = [int(d) for d in text[len("digits:"):].split(".") if d]
        if any(not 0 <= d < p for d in digits):
            raise ValueError(f"digits must lie in [0, {p})")
        return sum(d * p ** i for i, d in enumerate(digits))
    return Fraction(text)


def parse_distance(text: str, p: int):
    """A rational, or p^(a/b) for distances that are fractional powers of p."""
    if "^" in text:
        base, exp = text.split("^", 1)
        if int(base) != p:
            raise ValueError(f"distance must be a power of {p}")
        return QValue.norm(p, -Fraction(exp.strip("()")))
    return Fraction(text)


def cmd_catalog(args):
    return get_catalog(args.p).to_json()


def cmd_density(args):
    K = _field(args.p, args.field)
    if args.action == "eval":
        if args.delta is not None:
            delta = parse_distance(args.delta, args.p)
            if K.r == 1:
                val = density.rho_base(delta, args.n, args.p)
            elif K.r == 2:
                val = density.rho_quadratic(delta, K, args.n)
            else:
                val = density.rho_prime_degree_minimal(delta, K)
            return {"field": K.label, "n": args.n, "delta": args.delta, "density": _density_json(val)}
        coords = [int(c) for c in args.coords.split(",")]
        x = K.element(coords, args.precision)
        out = {"field": K.label, "n": args.n, "coords": coords,
               "generic": _density_json(density.rho_generic(x, args.n))}
        try:
            out["closed_form"] = _density_json(density.rho_closed_form(x, args.n))
        except PadicError as exc:
            out["closed_form"] = None
            out["closed_form_error"] = str(exc)
        return out
    # integrate
    if K.r == 1:
        value = Fraction(1)
    elif K.r == 2:
        value = density.rho_mass_quadratic(K, args.n)
    elif args.n == K.r:
        value = density.rho_mass_prime_degree(K)
    else:
        br = asymptotics.bracket_for(K, args.n)
        return {"field": K.label, "n": args.n, "mass": None, "bracket": [_frac(br.lo), _frac(br.hi)]}
    return {"field": K.label, "n": args.n, "mass": _frac(value),
            "pairs_F2": _frac(density.pair_mass_F2(args.p, args.n))}


def cmd_asymptotics(args):
    r, q = args.r, args.q
    out = {"r": r, "q": q, "main_sum_all_fields": _frac(asymptotics.all_fields_main_term(r, q))}
    per_f = {}
    for f in asymptotics.divisors(r):
        row = {"generators": asymptotics.generator_count(f, q)}
        for regime in (asymptotics.MINIMAL, asymptotics.STABLE):
            main, br = asymptotics.residue_degree_terms(r, f, q, regime)
            row[regime] = {"main_sum": _frac(main), "bracket": [_frac(br.lo), _frac(br.hi)]}
        per_f[str(f)] = row
    out["per_residue_degree"] = per_f
    br = asymptotics.all_fields_sum_bracket(r, q)
    out["sum_bracket"] = [_frac(br.lo), _frac(br.hi)]
    if r >= 2:
        lead, full = asymptotics.excess_leading_term(r, q)
        out["excess_leading"] = _frac(lead)
        out["excess_full"] = _frac(full)
    return out


def cmd_roots(args):
    K = _field(args.p, args.field)
    coeffs = [parse_coefficient(c, args.p) for c in args.coeffs.split(",")]
    P = PadicPolynomial.from_rationals(args.p, coeffs, args.precision)
    out = []
    for rec in count_roots(P, K, args.precision):
        loc = None
        if rec.location is not None:
            loc = {"coords": [str(c) for c in rec.location.coords], "shift": rec.location.shift,
                   "relative_precision": rec.location.N}
        out.append({"location": loc, "in_ring": rec.in_ring, "is_new": rec.is_new,
                    "multiplicity": rec.multiplicity, "certified": rec.certified,
                    "radius": _frac(rec.radius)})
    return {"field": K.label, "roots": out}


def _config_from_args(args):
    if args.config:
        cfg = RunConfig.from_file(args.config)
    elif args.preset:
        cfg = preset(args.preset)
    else:
        cfg = RunConfig(p=args.p or 2, histogram_depth=0)
    changes = {}
    for name, attr in (("p", "p"), ("samples", "sample_count"), ("seed", "seed"), ("precision", "precision"),
                       ("depth", "histogram_depth"), ("workers", "workers"), ("out", "out")):
        val = getattr(args, name)
        if val is not None:
            changes[attr] = val
    if args.n:
        changes["degrees"] = tuple(args.n)
    return replace(cfg, **changes)


def cmd_simulate(args):
    cfg = _config_from_args(args)
    report = cached_census(cfg) if args.cache else run_census(cfg)
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(report, indent=1))
        return {"written": cfg.out}
    return report


def cmd_report(args):
    report = json.loads(Path(args.report).read_text())
    return {"written": [str(p) for p in report_csv(report, args.out)]}


def cmd_verify(args):
    tests = Path(__file__).resolve().parents[2] / "tests" / "test_acceptance.py"
    return subprocess.call([sys.executable, "-m", "pytest", "-q", "-s", str(tests)])


def build_parser():
    ap = argparse.ArgumentParser(prog="padic-roots")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("catalog", help="extensions of degree at most 3")
    s.add_argument("--p", type=int, required=True)
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("density", help="density of new roots")
    s.add_argument("action", choices=["eval", "integrate"])
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--field", help="catalog label or index (default: the base field)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--delta", help="distance to the base field, e.g. 1/2 or 2^(-3/2)")
    s.add_argument("--coords", help="coordinates of x on the power basis, e.g. 0,1")
    s.add_argument("--precision", type=int, default=48)
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("asymptotics", help="main terms and brackets for degree r")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.set_defaults(func=cmd_asymptotics)

    s = sub.add_parser("roots", help="roots of a polynomial in a cataloged field")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--field")
    s.add_argument("--coeffs", required=True, help="comma separated, constant term first; "
                   "each a decimal or digits:d0.d1... (use --coeffs=-1,0,1 for a leading minus)")
    s.add_argument("--precision", type=int, default=48)
    s.set_defaults(func=cmd_roots)

    s = sub.add_parser("simulate", help="Monte Carlo census")
    s.add_argument("--config", help="TOML or JSON RunConfig")
    s.add_argument("--preset", choices=["p2", "p5"])
    s.add_argument("--p", type=int)
    s.add_argument("--n", type=int, nargs="+")
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--precision", type=int)
    s.add_argument("--depth", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--out")
    s.add_argument("--cache", action="store_true", help="reuse stored accumulators")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("report", help="CSV grids from a census report")
    s.add_argument("report")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("verify", help="run the acceptance suite")
    s.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    result = args.func(args)
    if args.command == "verify":
        return result
    json.dump(result, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
