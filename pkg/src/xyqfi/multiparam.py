"""Joint estimation of (J, gamma, D): SLDs, QFI matrix, Uhlmann matrix, bounds.

The SLD of an X-state is built block by block. Writing the outer block
{|00>,|11>} as (w0 I + w1 X + w2 Y + w3 Z)/2 and the SLD on it as
f0 I + f1 X + f2 Y + f3 Z, the SLD equation gives

    f0 = (w0 dw0 - sum_i wi dwi) / (w0^2 - sum_i wi^2)
    fi = (dwi - f0 wi) / w0

and likewise on the inner block {|01>,|10>}. Matrix entries of the QFIM
and the Uhlmann matrix are then traces of dense 4x4 products.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain_model import (
    DEFAULT_CONFIG,
    TAGS,
    ChainParams,
    ParameterTag,
    QuadratureConfig,
    chain_integrals,
)
from .correlations import Separation, check_separation
from .errors import DegenerateBlock, PureStateDegeneracy, ZeroTrace
from .states import XState, XStateTangent, pair_state, pair_state_partial

BLOCK_FLOOR = 1e-12
INVERTIBILITY_RTOL = 1e-12

# ordered pairs of basis indices spanned by each block
_OUTER = (0, 3)
_INNER = (1, 2)


@dataclass(frozen=True)
class SldXState:
    """SLD coefficients (f0..f3) on the outer block and (ft0..ft3) on the inner one."""

    f: tuple
    ft: tuple
    tag: ParameterTag

    def dense(self) -> np.ndarray:
        L = np.zeros((4, 4), dtype=complex)
        for (i, j), (f0, f1, f2, f3) in ((_OUTER, self.f), (_INNER, self.ft)):
            L[i, i] = f0 + f3
            L[j, j] = f0 - f3
            L[i, j] = f1 - 1j * f2
            L[j, i] = f1 + 1j * f2
        return L.real.copy() if self.f[2] == 0 and self.ft[2] == 0 else L


def _omegas(st) -> tuple:
    """(w0..w3) and (wt0..wt3) of a real X-state or its tangent."""
    return (
        (st.a_plus + st.a_minus, 2.0 * st.b_minus, 0.0, st.a_plus - st.a_minus),
        (2.0 * st.c, 2.0 * st.b_plus, 0.0, 0.0),
    )


def _block_sld(w, dw, label):
    w0 = w[0]
    norm = w0 * w0 - sum(x * x for x in w[1:])
    if w0 < BLOCK_FLOOR or norm < BLOCK_FLOOR:
        raise DegenerateBlock(f"{label} block: w0={w0:.3e}, w0^2-|w|^2={norm:.3e}")
    f0 = (w0 * dw[0] - sum(a * b for a, b in zip(w[1:], dw[1:]))) / norm
    return (f0,) + tuple((d - f0 * x) / w0 for x, d in zip(w[1:], dw[1:]))


def sld_from_xstate(state: XState, tangent: XStateTangent) -> SldXState:
    w, wt = _omegas(state)
    dw, dwt = _omegas(tangent)
    return SldXState(_block_sld(w, dw, "outer"), _block_sld(wt, dwt, "inner"), tangent.wrt)


def sld_xstate(params: ChainParams, r: Separation, tag: ParameterTag,
               cfg: QuadratureConfig = DEFAULT_CONFIG) -> SldXState:
    return sld_from_xstate(pair_state(params, r, cfg), pair_state_partial(params, r, tag, cfg))


@dataclass(frozen=True)
class FisherMatrix:
    entries: np.ndarray
    det: float
    trace_inverse: float | None
    hjj_fraction: float | None
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def invertible(self) -> bool:
        return self.trace_inverse is not None


def invertibility_threshold(H: np.ndarray) -> float:
    return INVERTIBILITY_RTOL * (np.trace(H) / 3.0) ** 3


def fisher_matrix(H: np.ndarray) -> FisherMatrix:
    """Wrap a symmetric 3x3 matrix with its determinant, bound and H_JJ share."""
    H = 0.5 * (np.asarray(H, dtype=float) + np.asarray(H, dtype=float).T)
    det = float(np.linalg.det(H))
    tr = float(np.trace(H))
    tinv = None
    if tr > 0 and det > invertibility_threshold(H):
        tinv = float(np.trace(np.linalg.inv(H)))
    hjj = H[0, 0] / tr if tr > 0 else None
    return FisherMatrix(H, det, tinv, hjj, np.linalg.eigvalsh(H))


def qfim_from_slds(rho: np.ndarray, slds) -> np.ndarray:
    n = len(slds)
    H = np.empty((n, n))
    for a in range(n):
        for b in range(a, n):
            anti = slds[a] @ slds[b] + slds[b] @ slds[a]
            H[a, b] = H[b, a] = 0.5 * np.trace(rho @ anti).real
    return H


def uhlmann_from_slds(rho: np.ndarray, slds) -> np.ndarray:
    """Complex matrix Tr[rho (L_mu L_nu - L_nu L_mu) / 2]."""
    n = len(slds)
    U = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(a + 1, n):
            comm = slds[a] @ slds[b] - slds[b] @ slds[a]
            U[a, b] = 0.5 * np.trace(rho @ comm)
            U[b, a] = -U[a, b]
    return U


def _dense_slds(params, r, cfg):
    st = pair_state(params, r, cfg)
    return st.dense(), [sld_xstate(params, r, t, cfg).dense() for t in TAGS]


def qfim_pair(params: ChainParams, r: Separation, cfg: QuadratureConfig = DEFAULT_CONFIG) -> FisherMatrix:
    params.require_fisher_domain()
    check_separation(r)
    rho, slds = _dense_slds(params, r, cfg)
    return fisher_matrix(qfim_from_slds(rho, slds))


def qfim_single(params: ChainParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> FisherMatrix:
    params.require_fisher_domain()
    ci = chain_integrals(params, cfg=cfg)
    m = ci.magnetization
    denom = 1.0 - m * m
    if denom < BLOCK_FLOOR:
        raise PureStateDegeneracy(f"1 - m^2 = {denom:.3e} at {params}")
    dm = np.array([ci.dg(0, t) for t in TAGS])
    return fisher_matrix(np.outer(dm, dm) / denom)


@dataclass(frozen=True)
class UhlmannMatrix:
    """Antisymmetric real matrix U with Tr[rho [L_mu, L_nu]] / 2 = i U_mu_nu.

    ``raw`` keeps the complex traces so that a spurious real part (which
    would indicate a broken SLD) is not hidden.
    """

    entries: np.ndarray
    raw: np.ndarray = field(repr=False)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.raw)))


def uhlmann_matrix(params: ChainParams, r: Separation, cfg: QuadratureConfig = DEFAULT_CONFIG) -> UhlmannMatrix:
    params.require_fisher_domain()
    rho, slds = _dense_slds(params, r, cfg)
    raw = uhlmann_from_slds(rho, slds)
    return UhlmannMatrix(raw.imag.copy(), raw)


def weak_commutators(params: ChainParams, r: Separation, cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """|Tr[rho [L_mu, L_nu]]| for every parameter pair."""
    return 2.0 * np.abs(uhlmann_matrix(params, r, cfg).raw)


def scalar_bound(params: ChainParams, r: Separation, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float | None:
    """Tr[H^-1] (one repetition, unit weights), or None when H is numerically singular."""
    return qfim_pair(params, r, cfg).trace_inverse


def hjj_fraction(params: ChainParams, r: Separation, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    frac = qfim_pair(params, r, cfg).hjj_fraction
    if frac is None:
        raise ZeroTrace(f"Tr[H] = 0 at {params}, r={r}")
    return frac
