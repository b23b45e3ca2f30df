"""Monte Carlo census of random polynomials over Z_p.

Polynomials of degree at most n have n+1 coefficients drawn uniformly modulo
p^N. Every sample goes through the census engine once; the per-sample counts
feed exact integer accumulators that merge associatively across shards.
Reports carry the exact theoretical value beside each empirical mean.
"""
from __future__ import annotations

import hashlib
import json
import math
import sys
import time
from collections import Counter
from dataclasses import asdict, dataclass, field, fields as dc_fields
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import asymptotics, density
from .catalog import EtaleClass, get_catalog
from .census import CensusEngine
from .padic import PadicPolynomial
from .qvalue import QValue

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SCHEMA_VERSION = 1
PACKAGE_DIR = Path(__file__).resolve().parent
DEFAULT_CACHE = PACKAGE_DIR.parents[1] / "results"


@dataclass(frozen=True)
class RunConfig:
    p: int = 2
    degrees: tuple = (2, 3, 4, 5)
    sample_count: int = 500_000
    precision: int = 48
    seed: int = 20240601
    max_ext_degree: int = 3
    histogram_depth: int = 5            # residue classes mod p^depth; 0 disables locations
    tracked: tuple = ()                 # field labels with spatial histograms
    tracked_degrees: tuple = (5,)
    balls: tuple = ()                   # (u, v, k): balls u + p^k Z_p and v + p^k Z_p
    shard_size: int = 10_000
    workers: int = 1
    z_threshold: float = 4.0
    chi2_level: float = 0.01
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(n) for n in self.degrees))
        object.__setattr__(self, "tracked", tuple(self.tracked))
        object.__setattr__(self, "tracked_degrees", tuple(int(n) for n in self.tracked_degrees))
        object.__setattr__(self, "balls", tuple(tuple(int(t) for t in b) for b in self.balls))
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if self.histogram_depth > self.precision - 8:
            raise ValueError("histogram depth must not exceed precision - 8")
        if not 1 <= self.max_ext_degree <= 3:
            raise ValueError("extension scope is limited to degree 3")
        if any(n < 1 for n in self.degrees):
            raise ValueError("degrees must be positive")
        for u, v, k in self.balls:
            if k > self.histogram_depth:
                raise ValueError("ball radius finer than the histogram depth")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dc_fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        text = path.read_text()
        if path.suffix == ".toml":
            return cls.from_dict(tomllib.loads(text))
        return cls.from_dict(json.loads(text))


def preset(name: str) -> RunConfig:
    """Experiment presets for the root-count experiments."""
    if name == "p2":
        return RunConfig(p=2, tracked=("Q2^unr2", "Q2[x^2+2x-2]"), balls=((0, 1, 1), (0, 2, 2)))
    if name == "p5":
        return RunConfig(p=5, histogram_depth=0)
    raise KeyError(name)


# bump when sampling or accumulation changes
SAMPLER_VERSION = 1
# modules whose code determines the per-sample counts
ENGINE_MODULES = ("census.py", "roots.py", "resfield.py", "extension.py", "catalog.py", "padic.py", "linalg.py")


@lru_cache(maxsize=1)
def source_hash():
    h = hashlib.sha256(str(SAMPLER_VERSION).encode())
    for name in ENGINE_MODULES:
        h.update(name.encode())
        h.update((PACKAGE_DIR / name).read_bytes())
    return h.hexdigest()[:16]


# ---- sampling ----

def _chunk_digits(p):
    return int(math.floor(63 * math.log(2) / math.log(p)))


def sample_coefficients(p: int, n: int, N: int, rng: np.random.Generator, count: int):
    """count rows of n+1 integers uniform modulo p^N (low degree first)."""
    c = _chunk_digits(p)
    chunks = []
    left = N
    while left > 0:
        d = min(c, left)
        chunks.append(d)
        left -= d
    draws = [rng.integers(0, p ** d, size=(count, n + 1), dtype=np.uint64) for d in chunks]
    if len(draws) == 1:
        return draws[0].tolist()
    out = []
    lists = [a.tolist() for a in draws]
    for i in range(count):
        row = []
        for j in range(n + 1):
            x = 0
            for d, arr in zip(chunks, lists):
                x = x * p ** d + arr[i][j]
            row.append(x)
        out.append(row)
    return out


def shard_rng(seed: int, n: int, shard: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, n, shard])))


def sample_polynomial(p: int, n: int, N: int, seed: int, index: int, shard_size: int = 10_000) -> PadicPolynomial:
    """The index-th polynomial of the stream (seed, n); identical to what run_census draws."""
    shard, row = divmod(index, shard_size)
    rows = sample_coefficients(p, n, N, shard_rng(seed, n, shard), row + 1)
    return PadicPolynomial(p, tuple(rows[row]), N)


# ---- accumulators ----

class Moments:
    """Power sums of an integer statistic."""

    __slots__ = ("s1", "s2")

    def __init__(self, s1=0, s2=0):
        self.s1 = s1
        self.s2 = s2

    def add(self, x):
        self.s1 += x
        self.s2 += x * x

    def merge(self, other):
        self.s1 += other.s1
        self.s2 += other.s2

    def summary(self, count, scale=1):
        """(mean, standard error) of x / scale."""
        if count == 0:
            return None, None
        mean = Fraction(self.s1, count)
        var = Fraction(self.s2, count) - mean * mean
        se = math.sqrt(max(float(var), 0.0) / max(count - 1, 1)) if count > 1 else 0.0
        return mean / scale, se / scale

    def to_json(self):
        return [self.s1, self.s2]


class CrossMoments:
    """Sums of U^a V^b, a, b <= 2, for covariance estimates."""

    def __init__(self, table=None):
        self.t = [list(row) for row in table] if table else [[0] * 3 for _ in range(3)]

    def add(self, u, v):
        for a in range(3):
            for b in range(3):
                self.t[a][b] += u ** a * v ** b

    def merge(self, other):
        for a in range(3):
            for b in range(3):
                self.t[a][b] += other.t[a][b]

    def covariance(self, count):
        """Covariance of (U, V) and its standard error from the influence function."""
        E = [[Fraction(self.t[a][b], count) for b in range(3)] for a in range(3)]
        mu, mv = E[1][0], E[0][1]
        cov = E[1][1] - mu * mv
        # psi = (U - mu)(V - mv) - cov
        e_psi2 = (E[2][2] - 2 * mv * E[2][1] - 2 * mu * E[1][2] + mv * mv * E[2][0] + mu * mu * E[0][2]
                  + 4 * mu * mv * E[1][1] - 3 * mu * mu * mv * mv) - cov * cov
        se = math.sqrt(max(float(e_psi2), 0.0) / count)
        return cov, se, mu, mv


class Accumulator:
    """Exact counters for one degree n; merge is associative and commutative."""

    _MOMENTS = ("roots", "roots_ring", "pairs", "mass2", "mass3", "mass_diff")

    def __init__(self, p, n, labels, depth, tracked_labels, balls):
        self.p, self.n = p, n
        self.labels = list(labels)
        self.depth = depth
        self.tracked_labels = list(tracked_labels)
        self.balls = list(balls)
        self.samples = 0
        self.flagged = 0
        self.roots = Moments()
        self.roots_ring = Moments()
        self.pairs = Moments()            # Z(Z-1)
        self.new = [Moments() for _ in labels]
        self.mass2 = Moments()            # 6 * Sigma(2, n) per sample
        self.mass3 = Moments()            # 6 * Sigma(3, n) per sample
        self.mass_diff = Moments()        # 6 * (Sigma(2, n) - Sigma(3, n))
        self.root_hist = Counter()
        self.new_hist = [Counter() for _ in labels]
        self.classes = Counter()
        self.cross = [CrossMoments() for _ in balls]
        self.spatial = {lab: Counter() for lab in tracked_labels}
        self.base_spatial = Counter()
        self.pair_grid = Counter()

    def merge(self, o: "Accumulator"):
        if (o.p, o.n, o.labels) != (self.p, self.n, self.labels):
            raise ValueError("incompatible accumulators")
        self.samples += o.samples
        self.flagged += o.flagged
        for a, b in ((self.roots, o.roots), (self.roots_ring, o.roots_ring), (self.pairs, o.pairs),
                     (self.mass2, o.mass2), (self.mass3, o.mass3), (self.mass_diff, o.mass_diff)):
            a.merge(b)
        for a, b in zip(self.new, o.new):
            a.merge(b)
        self.root_hist.update(o.root_hist)
        for a, b in zip(self.new_hist, o.new_hist):
            a.update(b)
        self.classes.update(o.classes)
        for a, b in zip(self.cross, o.cross):
            a.merge(b)
        for lab in self.spatial:
            self.spatial[lab].update(o.spatial[lab])
        self.base_spatial.update(o.base_spatial)
        self.pair_grid.update(o.pair_grid)
        return self

    @property
    def valid(self):
        return self.samples - self.flagged

    def to_json(self):
        def pairs(c):
            return {",".join(map(str, k)) if isinstance(k, tuple) else str(k): v for k, v in c.items()}
        return {
            "p": self.p, "n": self.n, "labels": self.labels, "depth": self.depth,
            "tracked_labels": self.tracked_labels, "balls": [list(b) for b in self.balls],
            "samples": self.samples, "flagged": self.flagged,
            "moments": {name: getattr(self, name).to_json() for name in self._MOMENTS},
            "new": [m.to_json() for m in self.new],
            "root_hist": pairs(self.root_hist), "new_hist": [pairs(h) for h in self.new_hist],
            "classes": dict(self.classes), "cross": [[list(row) for row in c.t] for c in self.cross],
            "spatial": {lab: pairs(h) for lab, h in self.spatial.items()},
            "base_spatial": pairs(self.base_spatial), "pair_grid": pairs(self.pair_grid),
        }

    @classmethod
    def from_json(cls, d):
        def ints(c):
            return Counter({int(k): v for k, v in c.items()})

        def tuples(c):
            return Counter({tuple(int(t) for t in k.split(",")): v for k, v in c.items()})
        acc = cls(d["p"], d["n"], d["labels"], d["depth"], d["tracked_labels"], [tuple(b) for b in d["balls"]])
        acc.samples, acc.flagged = d["samples"], d["flagged"]
        for name in cls._MOMENTS:
            setattr(acc, name, Moments(*d["moments"][name]))
        acc.new = [Moments(*m) for m in d["new"]]
        acc.root_hist = ints(d["root_hist"])
        acc.new_hist = [ints(h) for h in d["new_hist"]]
        acc.classes = Counter(d["classes"])
        acc.cross = [CrossMoments(t) for t in d["cross"]]
        acc.spatial = {lab: tuples(h) for lab, h in d["spatial"].items()}
        acc.base_spatial = ints(d["base_spatial"])
        acc.pair_grid = tuples(d["pair_grid"])
        return acc


# ---- per-sample work ----

_ENGINES = {}


def _engine(cfg: RunConfig, n: int):
    key = (cfg.p, cfg.precision, cfg.max_ext_degree, cfg.histogram_depth,
           cfg.tracked if n in cfg.tracked_degrees else ())
    eng = _ENGINES.get(key)
    if eng is None:
        cat = get_catalog(cfg.p)
        fields = [K for K in cat.all_fields() if 1 < K.r <= cfg.max_ext_degree]
        labels = [K.label for K in fields]
        tracked = [labels.index(lab) for lab in key[4]]
        eng = CensusEngine(cfg.p, fields, N=cfg.precision, location_depth=cfg.histogram_depth,
                           tracked=tracked)
        _ENGINES[key] = eng
    return eng


def _class_label(p, n, z, eng, counts):
    """Isomorphism class of F[X]/P for deg P = n in {2, 3}, from the root counts."""
    cat = get_catalog(p)
    base = cat.base
    if z == n:
        return EtaleClass(((base, n),)).label
    quads = [K for K, c in zip(eng.fields, counts) if K.r == 2 and c]
    cubics = [K for K, c in zip(eng.fields, counts) if K.r == 3 and c]
    if n == 2 and z == 0 and len(quads) == 1:
        return EtaleClass(((quads[0], 1),)).label
    if n == 3 and z == 1 and len(quads) == 1:
        return EtaleClass(((base, 1), (quads[0], 1))).label
    if n == 3 and z == 0 and len(cubics) == 1:
        return EtaleClass(((cubics[0], 1),)).label
    return "unclassified"


def run_shard(cfg: RunConfig, n: int, shard: int, count: int) -> Accumulator:
    eng = _engine(cfg, n)
    p = cfg.p
    depth = cfg.histogram_depth
    tracked_labels = [eng.fields[i].label for i in sorted(eng.tracked)]
    acc = Accumulator(p, n, [K.label for K in eng.fields], depth, tracked_labels, cfg.balls)
    rows = sample_coefficients(p, n, cfg.precision, shard_rng(cfg.seed, n, shard), count)
    aut6 = [6 // K.aut_count if 6 % K.aut_count == 0 else None for K in eng.fields]
    quad_idx = [i for i, K in enumerate(eng.fields) if K.r == 2]
    cubic_idx = [i for i, K in enumerate(eng.fields) if K.r == 3]
    ball_mods = [(u, v, p ** k) for u, v, k in cfg.balls]
    for coeffs in rows:
        s = eng.census(coeffs)
        acc.samples += 1
        if s.flagged:
            acc.flagged += 1
            continue
        z = s.roots_total
        acc.roots.add(z)
        acc.roots_ring.add(s.roots_ring)
        acc.pairs.add(z * (z - 1))
        acc.root_hist[z] += 1
        for i, c in enumerate(s.new):
            acc.new[i].add(c)
            acc.new_hist[i][c] += 1
        # Sigma(r, n): etale subalgebras of degree r, weighted by 1/#Aut, times 6
        m2 = 3 * z * (z - 1) + sum(3 * s.new[i] for i in quad_idx)
        m3 = z * (z - 1) * (z - 2) + sum(3 * z * s.new[i] for i in quad_idx) \
            + sum(aut6[i] * s.new[i] for i in cubic_idx)
        acc.mass2.add(m2)
        acc.mass3.add(m3)
        acc.mass_diff.add(m2 - m3)
        if n in (2, 3) and n <= cfg.max_ext_degree:
            acc.classes[_class_label(p, n, z, eng, s.new)] += 1
        if depth:
            locs = s.base_locations
            for x in locs:
                acc.base_spatial[x] += 1
            for i, x in enumerate(locs):
                for j, y in enumerate(locs):
                    if i != j:
                        acc.pair_grid[(x, y)] += 1
            for cm, (u, v, mod) in zip(acc.cross, ball_mods):
                cm.add(sum(1 for x in locs if x % mod == u), sum(1 for x in locs if x % mod == v))
            for idx, pts in s.new_locations.items():
                hist = acc.spatial[eng.fields[idx].label]
                for pt in pts:
                    hist[pt] += 1
    return acc


def _shard_task(args):
    return run_shard(*args)


def run_accumulators(cfg: RunConfig, n: int) -> Accumulator:
    tasks = []
    left, shard = cfg.sample_count, 0
    while left > 0:
        c = min(cfg.shard_size, left)
        tasks.append((cfg, n, shard, c))
        left -= c
        shard += 1
    if cfg.workers > 1 and len(tasks) > 1:
        from multiprocessing import Pool
        with Pool(cfg.workers) as pool:
            parts = pool.map(_shard_task, tasks)
    else:
        parts = [_shard_task(t) for t in tasks]
    total = parts[0]
    for part in parts[1:]:
        total.merge(part)
    return total


# ---- theory columns ----

def field_theory(K, n):
    """Exact expected number of new roots in K when available, else None."""
    if n < K.r:
        return Fraction(0)
    if K.r == 2:
        return density.rho_mass_quadratic(K, n)
    if n == K.r:
        return density.rho_mass_prime_degree(K)
    return None


def field_bracket(K, n):
    if K.r == 1:
        return asymptotics.Bracket(Fraction(1), Fraction(1), Fraction(1))
    return asymptotics.bracket_for(K, n)


def class_theory(p, n, label):
    cat = get_catalog(p)
    if label == EtaleClass(((cat.base, n),)).label and n == 2:
        return density.pair_mass_F2(p, 2) / 2
    for K in cat.fields(n) if n in (2, 3) else ():
        if label == EtaleClass(((K, 1),)).label:
            exact = field_theory(K, n)
            return exact / K.aut_count
    return None


def _stat(mean, se, theory, threshold):
    out = {"mean": float(mean) if mean is not None else None, "se": se,
           "theory": _frac(theory), "theory_float": float(theory) if theory is not None else None}
    if theory is not None and mean is not None:
        diff = float(mean - theory)
        z = diff / se if se > 0 else (0.0 if diff == 0 else math.inf)
        out["z"] = z
        out["pass"] = abs(z) <= threshold
    else:
        out["z"] = None
        out["pass"] = None
    return out


def _frac(x):
    if x is None:
        return None
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def degree_report(cfg: RunConfig, acc: Accumulator) -> dict:
    p, n = cfg.p, acc.n
    cnt = acc.valid
    thr = cfg.z_threshold
    cat = get_catalog(p)
    fields_by_label = {K.label: K for K in cat.all_fields()}
    rep = {"n": n, "samples": acc.samples, "flagged": acc.flagged,
           "flagged_fraction": acc.flagged / acc.samples if acc.samples else 0.0}
    m, se = acc.roots.summary(cnt)
    rep["roots"] = _stat(m, se, Fraction(1), thr)
    m, se = acc.roots_ring.summary(cnt)
    rep["roots_in_ring"] = _stat(m, se, Fraction(p, p + 1), thr)
    m, se = acc.pairs.summary(cnt)
    rep["pair_moment"] = _stat(m, se, density.pair_mass_F2(p, n), thr)
    base_br = field_bracket(cat.base, n)
    rep["fields"] = {cat.base.label: dict(rep["roots"], r=1, e=1, f=1,
                                          bracket=[_frac(base_br.lo), _frac(base_br.hi)],
                                          in_bracket=_in_bracket(rep["roots"], base_br, thr))}
    for lab, mom, hist in zip(acc.labels, acc.new, acc.new_hist):
        K = fields_by_label[lab]
        m, se = mom.summary(cnt)
        st = _stat(m, se, field_theory(K, n), thr)
        br = field_bracket(K, n)
        st.update(r=K.r, e=K.e, f=K.f, aut=K.aut_count, disc_valuation=K.disc_valuation,
                  bracket=[_frac(br.lo), _frac(br.hi)], in_bracket=_in_bracket(st, br, thr),
                  histogram={str(k): v for k, v in sorted(hist.items())})
        rep["fields"][lab] = st
    one = Fraction(1)
    m, se = acc.mass2.summary(cnt, 6)
    rep["mass_sum_2"] = _stat(m, se, one if n >= 2 else Fraction(0), thr)
    if cfg.max_ext_degree >= 3:
        m, se = acc.mass3.summary(cnt, 6)
        rep["mass_sum_3"] = _stat(m, se, one if n >= 3 else Fraction(0), thr)
        if n == 5:
            m, se = acc.mass_diff.summary(cnt, 6)
            rep["mass_symmetry"] = _stat(m, se, Fraction(0), thr)
    rep["root_histogram"] = {str(k): v for k, v in sorted(acc.root_hist.items())}
    if acc.classes:
        total = sum(acc.classes.values())
        classes = {}
        for lab, c in sorted(acc.classes.items()):
            freq = Fraction(c, total)
            se = math.sqrt(float(freq) * (1 - float(freq)) / max(total - 1, 1))
            classes[lab] = dict(_stat(freq, se, class_theory(p, n, lab), thr), count=c)
        rep["classes"] = classes
        rep["class_total"] = total / acc.samples
    if acc.cross:
        balls = []
        mean_unit = Fraction(p, p + 1)
        for (u, v, k), cm in zip(acc.balls, acc.cross):
            cov, se, mu, mv = cm.covariance(cnt)
            lam = Fraction(1, p ** k)
            scale = mean_unit * lam * mean_unit * lam
            dist = _padic_norm(u - v, p)
            theory = density.covariance_disjoint_balls(dist, n, p)[0] if n >= 3 else None
            st = _stat(cov / scale, se / float(scale), theory, thr)
            st.update(u=u, v=v, k=k, distance=_frac(dist), mean_u=float(mu), mean_v=float(mv),
                      covariance=float(cov), covariance_se=se)
            balls.append(st)
        rep["balls"] = balls
    if acc.depth:
        D = p ** acc.depth
        rep["base_spatial"] = [acc.base_spatial.get(x, 0) for x in range(D)]
        rep["pair_grid"] = [[acc.pair_grid.get((x, y), 0) for y in range(D)] for x in range(D)]
        rep["spatial"] = {lab: [[h.get((a, b), 0) for b in range(D)] for a in range(D)]
                          for lab, h in acc.spatial.items()}
    return rep


def _in_bracket(st, br, thr):
    if st["mean"] is None:
        return None
    lo = st["mean"] - thr * st["se"]
    hi = st["mean"] + thr * st["se"]
    return hi >= float(br.lo) and lo <= float(br.hi)


def _padic_norm(x, p):
    if x == 0:
        return Fraction(0)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return Fraction(1, p ** v)


# ---- reports ----

def accumulator_key(cfg: RunConfig, n: int) -> str:
    d = cfg.to_dict()
    for k in ("workers", "out", "degrees", "z_threshold", "chi2_level"):
        d.pop(k)
    d["n"] = n
    if n not in cfg.tracked_degrees:
        d["tracked"] = []
    d.pop("tracked_degrees")
    blob = json.dumps(d, sort_keys=True) + source_hash()
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def census_accumulators(cfg: RunConfig, cache_dir=None):
    """Accumulators per degree; cached on disk when cache_dir is given."""
    out = {}
    for n in cfg.degrees:
        path = None
        if cache_dir is not None:
            path = Path(cache_dir) / f"acc_p{cfg.p}_n{n}_{accumulator_key(cfg, n)}.json"
            if path.exists():
                out[n] = Accumulator.from_json(json.loads(path.read_text()))
                continue
        acc = run_accumulators(cfg, n)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(acc.to_json()))
        out[n] = acc
    return out


def build_report(cfg: RunConfig, accs: dict, wall_time=None) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_dict(),
        "metadata": {"seed": cfg.seed, "precision": cfg.precision, "source_hash": source_hash(),
                     "wall_time": wall_time,
                     "class_ordering": class_ordering(cfg.p, cfg.histogram_depth) if cfg.histogram_depth else None},
        "degrees": [degree_report(cfg, accs[n]) for n in cfg.degrees],
    }
    report["checks"] = monotone_checks(report, cfg.z_threshold)
    # degenerate samples should be vanishingly rare; a visible fraction points at a bug
    bound = 10 * float(cfg.p) ** -(cfg.precision - 16)
    report["checks"]["flagged"] = {str(d["n"]): d["flagged_fraction"] < bound for d in report["degrees"]}
    return report


def run_census(cfg: RunConfig, cache_dir=None) -> dict:
    """Census report for every degree of the config; writes it to cfg.out when set."""
    get_catalog(cfg.p)  # mass checks run at construction
    t0 = time.time()
    accs = census_accumulators(cfg, cache_dir)
    report = build_report(cfg, accs, time.time() - t0)
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(report, indent=1))
    return report


def cached_census(cfg: RunConfig, cache_dir=None) -> dict:
    """run_census with per-degree accumulators stored under their config key."""
    return run_census(cfg, cache_dir or DEFAULT_CACHE)


def degree_entry(report, n):
    for d in report["degrees"]:
        if d["n"] == n:
            return d
    raise KeyError(n)


def monotone_checks(report, thr):
    """Per field: mean at n+1 is not below the mean at n by more than thr joint standard errors."""
    out = {}
    degs = sorted(report["degrees"], key=lambda d: d["n"])
    for lab in degs[0]["fields"]:
        ok = True
        for a, b in zip(degs, degs[1:]):
            fa, fb = a["fields"][lab], b["fields"][lab]
            joint = math.hypot(fa["se"], fb["se"])
            if fb["mean"] < fa["mean"] - thr * joint:
                ok = False
        out[lab] = ok
    return {"monotone": out}


# ---- spatial histograms ----

def class_ordering(p: int, depth: int):
    """Residues mod p^depth, grouped by residue mod p, then mod p^2, and so on."""
    def key(a):
        return [(a // p ** i) % p for i in range(depth)]
    return sorted(range(p ** depth), key=key)


def spatial_expected(K, n: int, depth: int):
    """Exact expected number of new roots per class a + b*theta + p^depth O_K, K quadratic.

    The density depends on x only through dist(x, F) = ||b|| dist(theta, F), and
    is a combination of dist and dist^4, so the classes with b = 0 are summed
    in closed form.
    """
    if K.r != 2:
        raise ValueError("quadratic extension expected")
    p = K.p
    D = p ** depth
    lam = Fraction(1, D * D)
    theta_dist = QValue(p, 1, -Fraction(1, K.e) if K.e == 2 else 0)

    def rho_at(vb):
        return density.rho_quadratic(theta_dist * Fraction(1, p ** vb), K, n).value

    by_val = {vb: rho_at(vb) * lam for vb in range(depth)}
    # the b = 0 classes: integral over b in p^depth Z_p of rho, times 1/D for a
    g1, g2 = rho_at(depth), rho_at(depth + 1)
    t1, t2 = Fraction(1, p ** depth), Fraction(1, p ** (depth + 1))
    # rho(v) = c1 p^-v + c4 p^-4v
    det = t1 * t2 ** 4 - t2 * t1 ** 4
    c1 = (g1 * t2 ** 4 - g2 * t1 ** 4) / det
    c4 = (t1 * g2 - t2 * g1) / det

    def power_integral(s):
        # integral of |b|^s over p^depth Z_p
        return Fraction(p - 1, p) * Fraction(1, p ** (depth * (1 + s))) / (1 - Fraction(1, p ** (1 + s)))

    zero = (c1 * power_integral(1) + c4 * power_integral(4)) / D
    out = {}
    for a in range(D):
        for b in range(D):
            if b == 0:
                out[(a, b)] = zero
            else:
                vb = 0
                while b % p ** (vb + 1) == 0:
                    vb += 1
                out[(a, b)] = by_val[vb]
    return out


def conjugation_orbits(K, depth):
    """Orbits of the classes mod p^depth under the nontrivial automorphism of a quadratic K."""
    D = K.p ** depth
    c1 = K.poly[1]
    seen, orbits = set(), []
    for a in range(D):
        for b in range(D):
            if (a, b) in seen:
                continue
            img = ((a - c1 * b) % D, (-b) % D)
            orb = {(a, b), img}
            seen |= orb
            orbits.append(tuple(sorted(orb)))
    return orbits


def spatial_chi_square(grid, K, n, samples, depth, min_expected=5):
    """Pearson statistic for the observed class counts against the exact integrals.

    New roots of a quadratic K come in conjugate pairs, so counts are pooled
    over conjugation orbits and divided by the orbit's pair multiplicity.
    Orbits with small expected counts are pooled together.
    """
    from scipy.stats import chi2

    expected = spatial_expected(K, n, depth)
    obs_cells, exp_cells = [], []
    for orb in conjugation_orbits(K, depth):
        o = sum(grid[a][b] for a, b in orb)
        e = sum(expected[c] for c in orb) * samples
        # a conjugate pair lands twice in a fixed class and once in each class of a 2-orbit
        obs_cells.append(Fraction(o, 2))
        exp_cells.append(e / 2)
    pooled_o, pooled_e = Fraction(0), Fraction(0)
    cells = []
    for o, e in zip(obs_cells, exp_cells):
        if e < min_expected:
            pooled_o += o
            pooled_e += e
        else:
            cells.append((o, e))
    if pooled_e > 0:
        cells.append((pooled_o, pooled_e))
    stat = sum(float((o - e) ** 2 / e) for o, e in cells)
    dof = len(cells) - 1
    return stat, dof, float(chi2.sf(stat, dof))


def grid_csv(grid, ordering, header):
    lines = [f"# {line}" for line in header]
    lines.append("# row/column order: " + " ".join(str(a) for a in ordering))
    for a in ordering:
        lines.append(",".join(str(grid[a][b]) for b in ordering))
    return "\n".join(lines) + "\n"


def spatial_histogram(records, K, depth: int):
    """Counts of new roots per class of O_K mod p^depth, rows and columns in class order.

    records are RootRecords (from count_roots) or coordinate tuples already
    reduced mod p^depth. Roots outside O_K and old roots are skipped. The result
    is a list for K = Q_p and a square grid (first coordinate by rows) for K
    quadratic.
    """
    p = K.p
    D = p ** depth
    order = class_ordering(p, depth)
    counts = Counter()
    for rec in records:
        if isinstance(rec, tuple):
            pt = tuple(int(c) % D for c in rec)
        else:
            if not rec.certified or not rec.in_ring or rec.location is None:
                continue
            if K.r > 1 and rec.is_new != "new":
                continue
            pt = tuple(int(c) % D for c in rec.location.integral_coords(depth))
        counts[pt[: max(K.r, 1)]] += 1
    if K.r == 1:
        return [counts.get((a,), 0) for a in order]
    if K.r != 2:
        raise ValueError("histograms are drawn for Q_p and quadratic extensions")
    return [[counts.get((a, b), 0) for b in order] for a in order]


def pair_census(cfg: RunConfig, cache_dir=None):
    """Ordered pairs of distinct roots in Z_p on the class grid, ball covariances, E[Z(Z-1)]."""
    if not cfg.histogram_depth:
        raise ValueError("pair census needs root locations (histogram_depth > 0)")
    report = run_census(cfg, cache_dir)
    order = class_ordering(cfg.p, cfg.histogram_depth)
    out = {}
    for d in report["degrees"]:
        grid = d["pair_grid"]
        out[d["n"]] = {"grid": [[grid[x][y] for y in order] for x in order], "order": order,
                       "balls": d.get("balls", []), "pair_moment": d["pair_moment"]}
    return out


def mass_formula_census(cfg: RunConfig, r: int, cache_dir=None):
    """Class frequencies at n = r and the weighted sum of etale densities for every n."""
    if r not in (2, 3):
        raise ValueError("r must be 2 or 3")
    report = run_census(cfg, cache_dir)
    out = {}
    for d in report["degrees"]:
        entry = {"weighted_sum": d[f"mass_sum_{r}"] if f"mass_sum_{r}" in d else None}
        if d["n"] == r:
            entry["classes"] = d.get("classes", {})
            entry["class_total"] = d.get("class_total")
        if "mass_symmetry" in d:
            entry["symmetry"] = d["mass_symmetry"]
        out[d["n"]] = entry
    return out


def report_csv(report, out_dir):
    """Writes the per-field means and every histogram of a report as CSV files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    p = report["config"]["p"]
    written = []
    lines = ["n,field,mean,se,theory,bracket_lo,bracket_hi,z"]
    for d in report["degrees"]:
        for lab, st in d["fields"].items():
            lines.append(",".join(str(x) for x in (d["n"], lab, st["mean"], st["se"], st["theory"],
                                                   st["bracket"][0], st["bracket"][1], st["z"])))
    path = out_dir / f"means_p{p}.csv"
    path.write_text("\n".join(lines) + "\n")
    written.append(path)
    order = report["metadata"].get("class_ordering")
    for d in report["degrees"]:
        if "pair_grid" not in d:
            continue
        n = d["n"]
        path = out_dir / f"pairs_p{p}_n{n}.csv"
        path.write_text(grid_csv(d["pair_grid"], order, [f"ordered pairs of distinct roots in Z_{p}, n={n}",
                                                          "rows: first root class, columns: second root class"]))
        written.append(path)
        for lab, grid in d.get("spatial", {}).items():
            safe = lab.replace("^", "").replace("[", "_").replace("]", "").replace("+", "p").replace("-", "m")
            path = out_dir / f"spatial_{safe}_n{n}.csv"
            path.write_text(grid_csv(grid, order, [f"new roots in {lab}, n={n}",
                                                   "rows: coordinate on 1, columns: coordinate on the generator"]))
            written.append(path)
    return written
