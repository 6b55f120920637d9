"""End-to-end runs: field -> classes -> periods -> thetas -> invariants ->
polynomials, then the denominator analysis, with a precision ladder.

Exact objects (classes, polarizations) are computed once per field; the
analytic part is recomputed at each rung of the ladder until two
consecutive rungs reconstruct identical rationals.
"""
from __future__ import annotations

import hashlib
import json
import logging
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import classgroup, classpoly, denomcheck, invariants, periods, theta
from .cmfield import CMField, cm_types, cmfield_from_quartic
from .numeric import PrecisionContext

log = logging.getLogger(__name__)

SCOPES = ("single", "all")


@dataclass(frozen=True)
class FieldSpec:
    a: int
    b: int
    expected_d: int | None = None
    ideal_data: str | None = None

    @property
    def label(self) -> str:
        return f"({self.a},{self.b})"


@dataclass(frozen=True)
class RunConfig:
    fields: tuple[FieldSpec, ...]
    precision_start: int = 300
    max_doublings: int = 4
    cm_type_scope: str = "all"
    check_coefficient_denominators: bool = True
    out: str | None = None
    cache: str | None = None
    theta_permutation: tuple[int, ...] | None = None
    workers: int = 1

    def __post_init__(self):
        if self.precision_start < 64:
            raise ValueError("precision_start must be >= 64")
        if self.cm_type_scope not in SCOPES:
            raise ValueError(f"cm_type_scope must be one of {SCOPES}")
        if self.max_doublings < 0:
            raise ValueError("max_doublings must be >= 0")

    def snapshot(self) -> dict:
        d = asdict(self)
        d["fields"] = [asdict(f) for f in self.fields]
        return d


# ------------------------------------------------------------ cache


def _mpf_key(x) -> list:
    s, man, exp, bc = x._mpf_
    return [s, hex(man), exp, bc]


def _mpf_from(mp, t):
    return mp.make_mpf((t[0], int(t[1], 16), t[2], t[3]))


class ThetaCache:
    """Content-addressed store of theta vectors, one JSON file per key."""

    def __init__(self, root: str | Path | None):
        self.root = Path(root) if root else None
        self.hits = 0
        self.misses = 0
        if self.root:
            self.root.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(*parts) -> str:
        return hashlib.sha256(repr(parts).encode()).hexdigest()

    def get(self, key: str, ctx: PrecisionContext):
        if not self.root:
            return None
        p = self.root / f"{key}.json"
        if not p.exists():
            self.misses += 1
            return None
        rec = json.loads(p.read_text())
        mp = ctx.mp
        self.hits += 1
        log.info("cache hit %s", key[:12])
        vals = tuple(mp.mpc(_mpf_from(mp, re), _mpf_from(mp, im)) for re, im in rec["values"])
        return vals, rec["radius"], rec["tail"]

    def put(self, key: str, tv: theta.ThetaVector) -> None:
        if not self.root:
            return
        rec = {
            "values": [[_mpf_key(v.real), _mpf_key(v.imag)] for v in tv.values],
            "radius": tv.truncation_radius,
            "tail": tv.certified_tail,
        }
        tmp = self.root / f"{key}.json.tmp"
        tmp.write_text(json.dumps(rec))
        tmp.replace(self.root / f"{key}.json")


# ------------------------------------------------------------ results


@dataclass
class Branch:
    cls: int
    cm_type: str
    polarizations: int = 0
    skipped: str | None = None


@dataclass
class Rung:
    bits: int
    reconstructed: bool
    max_imag: float = 0.0
    residual: float = 0.0
    seconds: float = 0.0


@dataclass
class FieldResult:
    spec: FieldSpec
    status: str = "ok"
    error: str | None = None
    summary: dict = field(default_factory=dict)
    class_number: int | None = None
    branches: list[Branch] = field(default_factory=list)
    period_matrices: int = 0
    polys: classpoly.ClassPolynomialSet | None = None
    disc: classpoly.DiscriminantData | None = None
    report: denomcheck.DenominatorReport | None = None
    ladder: list[Rung] = field(default_factory=list)
    j_values: list[tuple[complex, complex, complex]] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def stable(self) -> bool:
        return bool(self.polys and self.polys.stable)


@dataclass
class RunRecord:
    config: dict
    fields: list[FieldResult]
    cache_hits: int = 0


# ------------------------------------------------------------ per-field work


def field_summary(K: CMField) -> dict:
    return {
        "a": K.a,
        "b": K.b,
        "D": K.D,
        "D0": K.D0,
        "galois_type": K.galois_type.value,
        "d": K.d,
        "d_K0": K.d_K0,
        "d0": K.d0,
    }


def _exact_stage(K: CMField, spec: FieldSpec, scope: str, res: FieldResult):
    t = time.perf_counter()
    if spec.ideal_data:
        classes = classgroup.load_ideal_data(K, spec.ideal_data)
    else:
        classes = classgroup.class_group(K)
    res.class_number = len(classes)
    res.timings["classes"] = time.perf_counter() - t
    t = time.perf_counter()
    types = cm_types(K)
    if scope == "single":
        types = types[:1]
    pols = []
    for ti, phi in enumerate(types):
        for ci, cls in enumerate(classes):
            br = Branch(ci, str(phi))
            try:
                ps = periods.polarizations(K, cls, phi)
            except periods.NoPrincipalPolarization as e:
                br.skipped = f"NoPrincipalPolarization: {e}"
                res.branches.append(br)
                continue
            br.polarizations = len(ps)
            res.branches.append(br)
            for pi, p in enumerate(ps):
                pols.append(((ci, ti, pi), cls, phi, p))
    res.timings["polarizations"] = time.perf_counter() - t
    return pols


def _points_at(K: CMField, pols, ctx: PrecisionContext, perm, cache: ThetaCache, res: FieldResult):
    pts = []
    for src, cls, phi, pol in pols:
        pm = periods.period_matrix(K, cls, phi, pol, ctx, src)
        red = periods.siegel_reduce(pm, ctx)
        key = ThetaCache.key(
            "theta-v1", K.a, K.b, tuple(map(str, cls.tau)), tuple(map(str, pol.xi)), phi.indices, ctx.bits, ctx.tail_bits, ctx.guard_bits
        )
        hit = cache.get(key, ctx)
        if hit:
            vals, R, tail = hit
            tv = theta.ThetaVector(vals, red.omega, R, tail)
        else:
            tv = theta.theta_vector(red, ctx)
            cache.put(key, tv)
        if perm is not None:
            tv = theta.ThetaVector(tuple(tv.values[p] for p in perm), tv.omega, tv.truncation_radius, tv.certified_tail, tuple(perm))
        pts.append(invariants.igusa_from_theta(tv, ctx, src))
    return pts


def process_field(spec: FieldSpec, config: RunConfig) -> FieldResult:
    res = FieldResult(spec)
    t0 = time.perf_counter()
    cache = ThetaCache(config.cache)
    try:
        K = cmfield_from_quartic(spec.a, spec.b, expected_d=spec.expected_d)
        res.summary = field_summary(K)
        pols = _exact_stage(K, spec, config.cm_type_scope, res)
        res.period_matrices = len(pols)
        if not pols:
            raise periods.NoPrincipalPolarization("no (class, CM type) pair admits a principal polarization")
        strict = config.cm_type_scope == "all"
        prev = None
        best = None
        bits = config.precision_start
        for _ in range(config.max_doublings + 1):
            t = time.perf_counter()
            ctx = PrecisionContext(bits)
            pts = _points_at(K, pols, ctx, config.theta_permutation, cache, res)
            fl, _ = classpoly.assemble(pts, ctx)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                classpoly.check_real(fl, ctx, strict=strict)
            res.warnings += [str(w.message) for w in caught]
            cps = classpoly.reconstruct(fl, ctx)
            rung = Rung(bits, cps is not None, classpoly.max_imaginary(fl), cps.residual if cps else 0.0, time.perf_counter() - t)
            res.ladder.append(rung)
            res.j_values = [tuple(complex(getattr(p, k)) for k in ("j1", "j2", "j3")) for p in pts]
            if cps is not None:
                best = cps
                if prev is not None and prev.polys == cps.polys:
                    best = cps.with_stable(True)
                    break
                prev = cps
            else:
                prev = None
            bits *= 2
        if best is None:
            raise classpoly.ReconstructionUnstable("no rung produced a rational reconstruction")
        if not best.stable:
            res.warnings.append("reconstruction unstable at the precision cap; best effort only")
        res.polys = best
        res.disc = classpoly.discriminant_data(best)
        res.report = denomcheck.denominator_report(
            spec.label, K.d, K.d0, best, res.disc, config.check_coefficient_denominators
        )
    except Exception as e:  # per-field isolation
        res.status = "error"
        res.error = f"{type(e).__name__}: {e}"
        log.warning("field %s failed: %s", spec.label, res.error)
    res.timings["total"] = time.perf_counter() - t0
    res.timings["cache_hits"] = cache.hits
    return res


def run_pipeline(config: RunConfig) -> RunRecord:
    if config.workers > 1 and len(config.fields) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as ex:
            results = list(ex.map(process_field, config.fields, [config] * len(config.fields)))
    else:
        results = [process_field(f, config) for f in config.fields]
    rec = RunRecord(config.snapshot(), results, sum(r.timings.get("cache_hits", 0) for r in results))
    if config.out:
        from .report import write_outputs

        write_outputs(rec, config.out)
    return rec


def parse_fields_file(path: str | Path) -> list[FieldSpec]:
    """Lines ``a b [expected_d]``; ``#`` starts a comment."""
    out = []
    for ln, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.replace(",", " ").split()
        if len(toks) not in (2, 3):
            raise ValueError(f"{path}:{ln}: expected 'a b [expected_d]'")
        nums = [int(t) for t in toks]
        out.append(FieldSpec(nums[0], nums[1], nums[2] if len(nums) == 3 else None))
    return out


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"
