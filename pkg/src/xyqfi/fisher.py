"""Single-parameter classical and quantum Fisher information.

Single spin: H = (dm)^2 / (1 - m^2), equal to the FI of a sigma^z
measurement. Two spins: the QFI has a closed form in the block
coefficients (``qfi_pair_closed_form``) and a spectral evaluation
(``qfi_pair_spectral``) that serves as its cross-check; the FI is that of
measuring sigma^z on both spins.
"""
from __future__ import annotations

from dataclasses import dataclass

from .chain_model import (
    DEFAULT_CONFIG,
    ChainParams,
    ParameterTag,
    QuadratureConfig,
    chain_integrals,
)
from .correlations import INFINITE, Separation, check_separation, correlation_partials, correlation_set
from .errors import BoundViolation, DegenerateDenominator, DegenerateOutcome, PureStateDegeneracy, ZeroQfi
from .states import (
    MinkowskiCoefficients,
    minkowski_from_correlations,
    pair_state,
    pair_state_partial,
    xstate_eigensystem,
)

__all__ = [
    "ParameterTag",
    "FisherScalars",
    "qfi_single",
    "fi_single",
    "qfi_pair",
    "qfi_pair_closed_form",
    "qfi_pair_spectral",
    "fi_pair_magnetization",
    "saturation",
    "distance_ratios",
    "fisher_scalars",
]

DENOM_FLOOR = 1e-12
SATURATION_SLACK = 1e-9


@dataclass(frozen=True)
class FisherScalars:
    r: Separation
    tag: ParameterTag
    qfi: float
    fi: float
    saturation: float
    near_critical: bool


def qfi_single(params: ChainParams, tag: ParameterTag, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    params.require_fisher_domain()
    ci = chain_integrals(params, cfg=cfg)
    m = ci.magnetization
    dm = ci.dg(0, tag)
    denom = 1.0 - m * m
    if denom < DENOM_FLOOR:
        raise PureStateDegeneracy(f"1 - m^2 = {denom:.3e} at {params}")
    return dm * dm / denom


def fi_single(params: ChainParams, tag: ParameterTag, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    # rho_1 is diagonal in the measured basis
    return qfi_single(params, tag, cfg)


def _block_derivatives(params, r, tag, cfg):
    cs = correlation_set(params, r, cfg)
    d = correlation_partials(params, r, tag, cfg)
    coeffs = minkowski_from_correlations(cs.m, cs.sxx, cs.syy, cs.szz)
    dcoeffs = MinkowskiCoefficients(
        a=(0.5 * d.dszz, 0.5 * (d.dsxx - d.dsyy), 0.0, d.dm),
        b=(-0.5 * d.dszz, 0.5 * (d.dsxx + d.dsyy), 0.0, 0.0),
    )
    return coeffs, dcoeffs


def _block_term(x, dx, label):
    eta = MinkowskiCoefficients.eta_dot
    x0, norm = x[0], eta(x, x)
    if x0 < DENOM_FLOOR:
        raise DegenerateDenominator(f"{label}_0 = {x0:.3e}")
    if norm < DENOM_FLOOR:
        raise DegenerateDenominator(f"eta({label}, {label}) = {norm:.3e}")
    return (eta(x, dx) ** 2 / norm - eta(dx, dx)) / x0 + dx[0] ** 2 / x0


def qfi_pair_closed_form(params: ChainParams, r: Separation, tag: ParameterTag,
                         cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    params.require_fisher_domain()
    c, dc = _block_derivatives(params, r, tag, cfg)
    return _block_term(c.a, dc.a, "a") + _block_term(c.b, dc.b, "b")


def qfi_pair_spectral(params: ChainParams, r: Separation, tag: ParameterTag,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    params.require_fisher_domain()
    vals, vecs = xstate_eigensystem(pair_state(params, r, cfg))
    drho = vecs.T @ pair_state_partial(params, r, tag, cfg).dense() @ vecs
    total = 0.0
    for i in range(4):
        for j in range(4):
            s = vals[i] + vals[j]
            if s > DENOM_FLOOR:
                total += 2.0 * drho[i, j] ** 2 / s
    return float(total)


def qfi_pair(params: ChainParams, r: Separation, tag: ParameterTag,
             cfg: QuadratureConfig = DEFAULT_CONFIG, method: str = "closed") -> float:
    if method == "closed":
        return qfi_pair_closed_form(params, r, tag, cfg)
    if method == "spectral":
        return qfi_pair_spectral(params, r, tag, cfg)
    raise ValueError(f"unknown method {method!r}")


def fi_pair_magnetization(params: ChainParams, r: Separation, tag: ParameterTag,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    params.require_fisher_domain()
    st = pair_state(params, r, cfg)
    dst = pair_state_partial(params, r, tag, cfg)
    total = 0.0
    for p, dp, mult in ((st.a_plus, dst.a_plus, 1.0), (st.c, dst.c, 2.0), (st.a_minus, dst.a_minus, 1.0)):
        if p < DENOM_FLOOR:
            raise DegenerateOutcome(f"outcome probability {p:.3e} at {params}, r={r}")
        total += mult * dp * dp / p
    return total


def saturation(params: ChainParams, r: Separation, tag: ParameterTag,
               cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    h = qfi_pair(params, r, tag, cfg)
    f = fi_pair_magnetization(params, r, tag, cfg)
    return _ratio(f, h)


def _ratio(f, h):
    if h <= 0.0:
        raise ZeroQfi(f"QFI = {h!r}")
    s = f / h
    if s > 1.0 + SATURATION_SLACK:
        raise BoundViolation(f"F/H = {s!r} > 1")
    return s


def distance_ratios(params: ChainParams, r: Separation, tag: ParameterTag,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """(R_H, R_F): pair (Q)FI at separation r over its infinite-separation value."""
    h_inf = qfi_pair(params, INFINITE, tag, cfg)
    f_inf = fi_pair_magnetization(params, INFINITE, tag, cfg)
    if h_inf <= 0.0 or f_inf <= 0.0:
        raise ZeroQfi(f"infinite-separation values H={h_inf!r}, F={f_inf!r}")
    return qfi_pair(params, r, tag, cfg) / h_inf, fi_pair_magnetization(params, r, tag, cfg) / f_inf


def fisher_scalars(params: ChainParams, r: Separation, tag: ParameterTag,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> FisherScalars:
    r = check_separation(r)
    tag = ParameterTag(tag)
    h = qfi_pair(params, r, tag, cfg)
    f = fi_pair_magnetization(params, r, tag, cfg)
    return FisherScalars(r, tag, h, f, _ratio(f, h), cfg.near_critical(params))
