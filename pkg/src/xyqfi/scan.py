"""Parameter scans producing plot-ready rows, and their CSV/JSON writers."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .chain_model import DEFAULT_CONFIG, TAGS, ChainParams, ParameterTag, QuadratureConfig
from .correlations import (
    INFINITE,
    asymptotic_decay_check,
    check_separation,
    correlation_set,
    format_separation,
    is_infinite,
)
from .errors import InvalidParameters, NonConvergence, XYQFIError
from .fisher import fi_pair_magnetization, fi_single, qfi_pair, qfi_pair_spectral, qfi_single
from .multiparam import qfim_from_slds, qfim_pair, qfim_single, sld_xstate, uhlmann_matrix
from .oracle import (
    FiniteChainSpec,
    OracleReport,
    compare,
    ground_state,
    oracle_correlators,
    oracle_qfi_pair,
    reduced_pair,
    sld_dense,
)
from .states import pair_state, pair_state_partial

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MODES = ("single-heatmap", "pair-curves", "multiparam", "oracle-check", "asymptotic-decay")

FINE_STEP = 0.002
FINE_WINDOW = 0.1


@dataclass(frozen=True)
class JGrid:
    start: float
    stop: float
    step: float
    refine: bool = True

    @classmethod
    def parse(cls, text: str, refine: bool = True) -> "JGrid":
        parts = [float(x) for x in text.split(":")]
        if len(parts) == 1:
            return cls(parts[0], parts[0], 1.0, False)
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise InvalidParameters(f"grid must be start:stop:step with step > 0, got {text!r}")
        return cls(*parts, refine=refine)

    def points(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        pts = {round(self.start + i * self.step, 10) for i in range(n + 1)}
        if self.refine:
            nf = int(round(2 * FINE_WINDOW / FINE_STEP))
            for centre in (-1.0, 1.0):
                for i in range(nf + 1):
                    x = round(centre - FINE_WINDOW + i * FINE_STEP, 10)
                    if self.start - 1e-12 <= x <= self.stop + 1e-12:
                        pts.add(x)
        return sorted(pts)

    def __str__(self):
        return f"{self.start:g}:{self.stop:g}:{self.step:g}"


def parse_values(text: str | float | Sequence[float]) -> list[float]:
    """'0.1' | '0,0.1,0.3' | '0:0.5:0.05' -> list of floats."""
    if isinstance(text, (int, float)):
        return [float(text)]
    if not isinstance(text, str):
        return [float(x) for x in text]
    if ":" in text:
        return JGrid.parse(text, refine=False).points()
    return [float(x) for x in text.split(",") if x.strip()]


@dataclass(frozen=True)
class ScanSpec:
    mode: str
    j_grid: JGrid = JGrid(-2.0, 2.0, 0.01)
    gammas: tuple = (1.0,)
    Ds: tuple = (0.0,)
    r_list: tuple = (1, 2, 3, 4, 5, 6, INFINITE)
    tags: tuple = (ParameterTag.J,)
    cfg: QuadratureConfig = DEFAULT_CONFIG
    oracle_N: tuple = (8, 10, 12)
    preset: str | None = None
    points: tuple | None = None  # explicit (J, gamma, D) triples; overrides the grids

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameters(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode != "asymptotic-decay":
            for r in self.r_list:
                check_separation(r)
        for g in self.gammas:
            if not -1.0 <= g <= 1.0:
                raise InvalidParameters(f"gamma must lie in [-1, 1], got {g}")

    def echo(self) -> dict:
        d = {"mode": self.mode, "preset": self.preset}
        if self.points is None:
            d.update(grid_J=str(self.j_grid), refine=self.j_grid.refine,
                     gamma=list(self.gammas), D=list(self.Ds))
        else:
            d["points"] = [list(p) for p in self.points]
        d.update(
            r=[_json_value("r", r) for r in self.r_list],
            tags=[ParameterTag(t).value for t in self.tags],
            oracle_N=list(self.oracle_N),
            quadrature=asdict(self.cfg),
        )
        return d


PRESETS = {
    "fig1": dict(mode="single-heatmap", gammas=(1.0,), Ds=tuple(parse_values("0:0.5:0.05"))),
    "fig2": dict(mode="pair-curves", gammas=(1.0,), Ds=(0.0,)),
    "fig3-4": dict(mode="pair-curves", gammas=(1.0,), Ds=(0.3,)),
    "fig8": dict(mode="pair-curves", gammas=(0.25,), Ds=(0.0,)),
    "fig9-10": dict(mode="pair-curves", gammas=(0.25,), Ds=(0.1,)),
    "fig5-7a": dict(mode="multiparam", gammas=(1.0,), Ds=(0.0,)),
    "fig5-7b": dict(mode="multiparam", gammas=(1.0,), Ds=(0.1,)),
    "oracle-default": dict(
        mode="oracle-check",
        points=((0.0, 1.0, 0.0), (0.5, 1.0, 0.0), (-0.7, 0.5, 0.0), (0.3, 0.25, 0.0)),
    ),
    "decay": dict(mode="asymptotic-decay", r_list=(8, 16, 32, 64),
                  points=((0.5, 1.0, 0.0), (1.5, 0.25, 0.1))),
}


def preset_spec(name: str, **overrides) -> ScanSpec:
    try:
        base = dict(PRESETS[name])
    except KeyError:
        raise InvalidParameters(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    base.update(overrides)
    return ScanSpec(preset=name, **base)


@dataclass
class ScanRecord:
    J: float
    gamma: float
    D: float
    r: object = None
    tag: str | None = None
    qfi: float | None = None
    fi: float | None = None
    saturation: float | None = None
    R_H: float | None = None
    R_F: float | None = None
    det_qfim: float | None = None
    trace_inverse: float | None = None
    hjj_fraction: float | None = None
    uhlmann_max_abs: float | None = None
    near_critical: bool = False
    converged: bool = True
    error: str | None = None
    source: str = "library"


SCAN_COLUMNS = [f.name for f in fields(ScanRecord)]
ORACLE_COLUMNS = [f.name for f in fields(OracleReport)]


@dataclass
class DecayRecord:
    J: float
    gamma: float
    D: float
    r_list: str
    slope: float | None = None
    max_asymmetry: float | None = None
    converged: bool = True
    error: str | None = None
    source: str = "library"


DECAY_COLUMNS = [f.name for f in fields(DecayRecord)]


@dataclass
class ScanResult:
    spec: ScanSpec
    columns: list
    rows: list
    excluded: list = field(default_factory=list)

    @property
    def failures(self) -> int:
        n = 0
        for row in self.rows:
            if row.get("error") or row.get("passed") is False:
                n += 1
        return n

    def summary(self) -> dict:
        return {
            "rows": len(self.rows),
            "failures": self.failures,
            "excluded_count": len(self.excluded),
            "excluded": self.excluded,
        }


def _fail(rec, exc):
    rec.error = f"{type(exc).__name__}: {exc}"
    rec.converged = not isinstance(exc, NonConvergence)
    return rec


def _points(spec: ScanSpec, fisher: bool = True):
    """(J, gamma, D) grid in deterministic order, plus the exclusions."""
    if spec.points is not None:
        return [tuple(float(x) for x in p) for p in spec.points], []
    pts, excluded = [], []
    guard = spec.cfg.critical_guard
    for g in spec.gammas:
        for D in spec.Ds:
            for J in spec.j_grid.points():
                if min(abs(J - 1), abs(J + 1)) < guard:
                    excluded.append({"J": J, "gamma": g, "D": D, "reason": "near_critical"})
                elif fisher and J == 0.0:
                    excluded.append({"J": J, "gamma": g, "D": D, "reason": "J=0"})
                else:
                    pts.append((J, g, D))
    for e in excluded:
        log.info("excluded grid point J=%g gamma=%g D=%g (%s)", e["J"], e["gamma"], e["D"], e["reason"])
    return pts, excluded


def single_point_rows(point, spec: ScanSpec) -> list[dict]:
    J, g, D = point
    p = ChainParams(J, g, D)
    cfg = spec.cfg
    near = cfg.near_critical(p)
    rows = []
    try:
        M = qfim_single(p, cfg)
        mat = (M.det, M.hjj_fraction)
    except XYQFIError as exc:
        mat = exc
    for tag in spec.tags:
        rec = ScanRecord(J, g, D, None, ParameterTag(tag).value, near_critical=near)
        try:
            if isinstance(mat, Exception):
                raise mat
            rec.qfi = qfi_single(p, tag, cfg)
            rec.fi = fi_single(p, tag, cfg)
            rec.saturation = rec.fi / rec.qfi if rec.qfi > 0 else None
            rec.det_qfim, rec.hjj_fraction = mat
        except XYQFIError as exc:
            _fail(rec, exc)
        rows.append(asdict(rec))
    return rows


def pair_point_rows(point, spec: ScanSpec) -> list[dict]:
    J, g, D = point
    p = ChainParams(J, g, D)
    cfg = spec.cfg
    near = cfg.near_critical(p)
    rows = []
    for tag in spec.tags:
        tag = ParameterTag(tag)
        try:
            h_inf = qfi_pair(p, INFINITE, tag, cfg)
            f_inf = fi_pair_magnetization(p, INFINITE, tag, cfg)
        except XYQFIError:
            h_inf = f_inf = None
        for r in spec.r_list:
            rec = ScanRecord(J, g, D, r, tag.value, near_critical=near)
            try:
                rec.qfi = qfi_pair(p, r, tag, cfg)
                rec.fi = fi_pair_magnetization(p, r, tag, cfg)
                rec.saturation = rec.fi / rec.qfi if rec.qfi > 0 else None
                if h_inf:
                    rec.R_H = rec.qfi / h_inf
                if f_inf:
                    rec.R_F = rec.fi / f_inf
            except XYQFIError as exc:
                _fail(rec, exc)
            rows.append(asdict(rec))
    return rows


def multiparam_point_rows(point, spec: ScanSpec) -> list[dict]:
    J, g, D = point
    p = ChainParams(J, g, D)
    cfg = spec.cfg
    near = cfg.near_critical(p)
    rows = []
    for r in spec.r_list:
        rec = ScanRecord(J, g, D, r, None, near_critical=near)
        try:
            M = qfim_pair(p, r, cfg)
            rec.det_qfim = M.det
            rec.trace_inverse = M.trace_inverse
            rec.hjj_fraction = M.hjj_fraction
            rec.uhlmann_max_abs = uhlmann_matrix(p, r, cfg).max_abs
        except XYQFIError as exc:
            _fail(rec, exc)
        rows.append(asdict(rec))
    return rows


def decay_point_rows(point, spec: ScanSpec) -> list[dict]:
    J, g, D = point
    rs = [int(r) for r in spec.r_list]
    rec = DecayRecord(J, g, D, ",".join(map(str, rs)))
    try:
        fit = asymptotic_decay_check(ChainParams(J, g, D), rs, spec.cfg)
        rec.slope, rec.max_asymmetry = fit.slope, fit.max_asymmetry
    except XYQFIError as exc:
        _fail(rec, exc)
    return [asdict(rec)]


def oracle_point_rows(point, spec: ScanSpec) -> list[dict]:
    """Library vs exact diagonalization (and library vs dense solvers) at one point."""
    J, g, D = point
    p = ChainParams(J, g, D)
    cfg = spec.cfg
    reports: list[OracleReport] = []

    def guard(fn):
        try:
            fn()
        except XYQFIError as exc:
            reports.append(OracleReport(f"error:{type(exc).__name__}", J, g, D, None, None,
                                        math.nan, math.nan, math.nan, math.nan, str(exc), False))

    rs = [r for r in (1, 2, 3) if r <= min(spec.oracle_N) // 2]

    def correlators():
        for N in spec.oracle_N:
            fspec = FiniteChainSpec(N, p)
            gs = ground_state(fspec)
            for r in rs:
                lib = correlation_set(p, r, cfg)
                orc = oracle_correlators(fspec, r, gs)
                if r == rs[0]:
                    reports.append(compare("m", p, lib.m, orc.m, N=N))
                for name in ("sxx", "syy", "szz"):
                    reports.append(compare(name, p, getattr(lib, name), getattr(orc, name), r=r, N=N))
            if N == max(spec.oracle_N):
                lib_rho = pair_state(p, 1, cfg).dense()
                orc_rho = reduced_pair(fspec, 1, 1, gs).real
                for name, (i, j) in (("rho_a_plus", (0, 0)), ("rho_a_minus", (3, 3)), ("rho_c", (1, 1)),
                                     ("rho_b_plus", (1, 2)), ("rho_b_minus", (0, 3))):
                    reports.append(compare(name, p, lib_rho[i, j], orc_rho[i, j], r=1, N=N))
                off_x = np.abs(reduced_pair(fspec, 1, 1, gs))[[0, 0, 1, 1, 2, 2, 3, 3], [1, 2, 0, 3, 0, 3, 1, 2]].max()
                reports.append(compare("oracle_offX_max", p, 0.0, float(off_x), r=1, N=N, rel_tol=0, abs_tol=1e-10))

    guard(correlators)

    if J != 0.0:
        def fisher():
            # finite-size corrections to the derivative are large at N=8; use the longest chain
            N = max(spec.oracle_N)
            for tag in map(ParameterTag, spec.tags):
                lib = qfi_pair(p, 1, tag, cfg)
                orc = oracle_qfi_pair(FiniteChainSpec(N, p), 1, tag)
                reports.append(compare(f"qfi_pair_{tag.value}", p, lib, orc, r=1, N=N))
            for tag in TAGS:
                reports.append(compare(f"qfi_spectral_vs_closed_{tag.value}", p, qfi_pair(p, 1, tag, cfg),
                                       qfi_pair_spectral(p, 1, tag, cfg), r=1, rel_tol=1e-8, abs_tol=1e-12))
                rho = pair_state(p, 1, cfg).dense()
                drho = pair_state_partial(p, 1, tag, cfg).dense()
                L = sld_xstate(p, 1, tag, cfg).dense()
                resid = float(np.max(np.abs(drho - 0.5 * (L @ rho + rho @ L))))
                reports.append(compare(f"sld_residual_{tag.value}", p, resid, 0.0, r=1, rel_tol=0, abs_tol=1e-10))
                # the dense solve divides by small eigenvalue sums, so compare relative to |L|
                dev = float(np.max(np.abs(L - sld_dense(rho, drho))) / max(1.0, np.max(np.abs(L))))
                reports.append(compare(f"sld_vs_dense_{tag.value}", p, dev, 0.0, r=1, rel_tol=0, abs_tol=1e-7))

        guard(fisher)
    return [rep.row() for rep in reports]


_WORKERS = {
    "single-heatmap": single_point_rows,
    "pair-curves": pair_point_rows,
    "multiparam": multiparam_point_rows,
    "oracle-check": oracle_point_rows,
    "asymptotic-decay": decay_point_rows,
}

_COLUMNS = {
    "oracle-check": ORACLE_COLUMNS,
    "asymptotic-decay": DECAY_COLUMNS,
}


def _run_point(args):
    point, spec = args
    return _WORKERS[spec.mode](point, spec)


def run_scan(spec: ScanSpec, threads: int = 1) -> ScanResult:
    """Evaluate every grid point; rows come back in grid order regardless of workers."""
    fisher = spec.mode not in ("oracle-check", "asymptotic-decay")
    pts, excluded = _points(spec, fisher)
    jobs = [(pt, spec) for pt in pts]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_run_point, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        chunks = [_run_point(j) for j in jobs]
    rows = [row for chunk in chunks for row in chunk]
    return ScanResult(spec, _COLUMNS.get(spec.mode, SCAN_COLUMNS), rows, excluded)


def run_single_heatmap(spec: ScanSpec, threads: int = 1) -> ScanResult:
    return run_scan(_expect(spec, "single-heatmap"), threads)


def run_pair_curves(spec: ScanSpec, threads: int = 1) -> ScanResult:
    return run_scan(_expect(spec, "pair-curves"), threads)


def run_multiparam(spec: ScanSpec, threads: int = 1) -> ScanResult:
    return run_scan(_expect(spec, "multiparam"), threads)


def run_oracle_check(spec: ScanSpec, threads: int = 1) -> ScanResult:
    return run_scan(_expect(spec, "oracle-check"), threads)


def run_asymptotic_decay(spec: ScanSpec, threads: int = 1) -> ScanResult:
    return run_scan(_expect(spec, "asymptotic-decay"), threads)


def _expect(spec, mode):
    if spec.mode != mode:
        raise InvalidParameters(f"expected mode {mode!r}, got {spec.mode!r}")
    return spec


# ---------------------------------------------------------------- writers

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


def _json_value(k, v):
    if k == "r":
        return format_separation(v) if is_infinite(v) else v
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def to_csv(result: ScanResult) -> str:
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow([_cell(row.get(c)) for c in result.columns])
    return buf.getvalue()


def to_json(result: ScanResult, timestamp: str | None = None) -> str:
    meta = {
        "schema_version": SCHEMA_VERSION,
        "library_version": __version__,
        "config": result.spec.echo(),
        "columns": result.columns,
    }
    if timestamp is not None:
        meta["generated_at"] = timestamp
    doc = {
        "metadata": meta,
        "rows": [{c: _json_value(c, row.get(c)) for c in result.columns} for row in result.rows],
        "summary": result.summary(),
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"
