"""Two-point spin correlators from Toeplitz determinants of G_k.

Row conventions (r x r matrices, 0-based i, j):

    S^x_r = det[G_{j-i-1}]     first row G_{-1} ... G_{-r}
    S^y_r = det[G_{i-j+1}]     first row G_1, G_0, ..., G_{2-r}
    S^z_r = m^2 - G_r G_{-r}

A separation is either a positive int or ``INFINITE`` (``math.inf``); the
infinite branch uses the asymptotic values sxx = syy = 0, szz = m^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .chain_model import (
    DEFAULT_CONFIG,
    ChainIntegrals,
    ChainParams,
    ParameterTag,
    QuadratureConfig,
    chain_integrals,
)
from .errors import DegenerateFit, InvalidParameters

INFINITE = math.inf
R_MAX = 6

Separation = Union[int, float]

# below this |det M| Jacobi's formula is abandoned for the row-replacement sum
_JACOBI_FLOOR = 1e-12


def is_infinite(r: Separation) -> bool:
    return isinstance(r, float) and math.isinf(r)


def check_separation(r: Separation, r_max: int | None = R_MAX) -> Separation:
    if is_infinite(r):
        return INFINITE
    if isinstance(r, float) and r.is_integer():
        r = int(r)
    if not isinstance(r, (int, np.integer)) or r < 1:
        raise InvalidParameters(f"separation must be a positive integer or inf, got {r!r}")
    if r_max is not None and r > r_max:
        raise InvalidParameters(f"separation {r} exceeds r_max={r_max}")
    return int(r)


def parse_separation(text: str) -> Separation:
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "oo", "∞"):
        return INFINITE
    return check_separation(int(t), None)


def format_separation(r: Separation | None) -> str:
    if r is None:
        return ""
    return "inf" if is_infinite(r) else str(int(r))


@dataclass(frozen=True)
class CorrelationSet:
    r: Separation
    m: float
    sxx: float
    syy: float
    szz: float


@dataclass(frozen=True)
class CorrelationPartials:
    r: Separation
    wrt: ParameterTag
    dsxx: float
    dsyy: float
    dszz: float
    dm: float


def _sx_matrix(vals: np.ndarray, kmax: int, r: int) -> np.ndarray:
    i, j = np.indices((r, r))
    return vals[j - i - 1 + kmax]


def _sy_matrix(vals: np.ndarray, kmax: int, r: int) -> np.ndarray:
    i, j = np.indices((r, r))
    return vals[i - j + 1 + kmax]


def _det(M: np.ndarray) -> float:
    # LAPACK getrf: LU with partial pivoting
    return float(np.linalg.det(M))


def _det_derivative(M: np.ndarray, dM: np.ndarray) -> float:
    det = _det(M)
    if abs(det) >= _JACOBI_FLOOR:
        return det * float(np.trace(np.linalg.solve(M, dM)))
    # multilinearity in the rows: d det = sum_i det(M with row i -> dM row i)
    total = 0.0
    for i in range(M.shape[0]):
        Mi = M.copy()
        Mi[i] = dM[i]
        total += _det(Mi)
    return total


def _integrals(params, r, cfg) -> ChainIntegrals:
    return chain_integrals(params, r, cfg)


def toeplitz_sx(params: ChainParams, r: int, cfg: QuadratureConfig = DEFAULT_CONFIG,
                   r_max: int = R_MAX) -> float:
    r = check_separation(r, r_max)
    ci = _integrals(params, r, cfg)
    return _det(_sx_matrix(ci.G, ci.kmax, r))


def toeplitz_sy(params: ChainParams, r: int, cfg: QuadratureConfig = DEFAULT_CONFIG,
                   r_max: int = R_MAX) -> float:
    r = check_separation(r, r_max)
    ci = _integrals(params, r, cfg)
    return _det(_sy_matrix(ci.G, ci.kmax, r))


def s_z(params: ChainParams, r: int, cfg: QuadratureConfig = DEFAULT_CONFIG,
           r_max: int = R_MAX) -> float:
    r = check_separation(r, r_max)
    ci = _integrals(params, r, cfg)
    return ci.magnetization ** 2 - ci.g(r) * ci.g(-r)


def correlation_set(params: ChainParams, r: Separation,
                    cfg: QuadratureConfig = DEFAULT_CONFIG, r_max: int = R_MAX) -> CorrelationSet:
    r = check_separation(r, r_max)
    if is_infinite(r):
        m = _integrals(params, 0, cfg).magnetization
        return CorrelationSet(r, m, 0.0, 0.0, m * m)
    ci = _integrals(params, r, cfg)
    m = ci.magnetization
    return CorrelationSet(
        r=r,
        m=m,
        sxx=_det(_sx_matrix(ci.G, ci.kmax, r)),
        syy=_det(_sy_matrix(ci.G, ci.kmax, r)),
        szz=m * m - ci.g(r) * ci.g(-r),
    )


def correlation_partials(params: ChainParams, r: Separation, wrt: ParameterTag,
                         cfg: QuadratureConfig = DEFAULT_CONFIG, r_max: int = R_MAX) -> CorrelationPartials:
    r = check_separation(r, r_max)
    wrt = ParameterTag(wrt)
    ci = _integrals(params, 0 if is_infinite(r) else r, cfg)
    m, dm = ci.magnetization, ci.dg(0, wrt)
    if is_infinite(r):
        return CorrelationPartials(r, wrt, 0.0, 0.0, 2.0 * m * dm, dm)
    dG = ci.dG[wrt.index]
    dsxx = _det_derivative(_sx_matrix(ci.G, ci.kmax, r), _sx_matrix(dG, ci.kmax, r))
    dsyy = _det_derivative(_sy_matrix(ci.G, ci.kmax, r), _sy_matrix(dG, ci.kmax, r))
    dszz = 2.0 * m * dm - ci.dg(r, wrt) * ci.g(-r) - ci.g(r) * ci.dg(-r, wrt)
    return CorrelationPartials(r, wrt, dsxx, dsyy, dszz, dm)


@dataclass(frozen=True)
class DecayFit:
    r_list: tuple
    g_plus: tuple
    g_minus: tuple
    slope: float
    max_asymmetry: float


def asymptotic_decay_check(params: ChainParams, r_list: Sequence[int],
                           cfg: QuadratureConfig = DEFAULT_CONFIG) -> DecayFit:
    """Least-squares slope of log|G_r| against log r.

    ``max_asymmetry`` is max |G_r + G_{-r}| / |G_r| over the list.
    Coefficients below max(1e-14, abs_tol) are indistinguishable from
    quadrature noise and make the fit degenerate.
    """
    rs = sorted(int(r) for r in r_list)
    if len(rs) < 4 or rs[0] < 8 or len(set(rs)) != len(rs):
        raise InvalidParameters("need at least 4 distinct separations, all >= 8")
    ci = chain_integrals(params, rs[-1], cfg)
    gp = np.array([ci.g(r) for r in rs])
    gm = np.array([ci.g(-r) for r in rs])
    floor = max(1e-14, cfg.abs_tol)
    if np.any(np.abs(gp) < floor):
        raise DegenerateFit(
            f"|G_r| below {floor:g} at r={[r for r, g in zip(rs, gp) if abs(g) < floor]}"
        )
    slope = float(np.polyfit(np.log(rs), np.log(np.abs(gp)), 1)[0])
    asym = float(np.max(np.abs(gp + gm) / np.abs(gp)))
    return DecayFit(tuple(rs), tuple(gp.tolist()), tuple(gm.tolist()), slope, asym)
