"""Ground-state integrals of the anisotropic XY chain with DM interaction.

Everything downstream is built from two families of integrals over
phi in [0, pi]. With

    u(phi) = J (cos phi - 2 D sin phi) - 1
    v(phi) = J gamma sin phi
    Delta  = sqrt(u^2 + v^2)

the magnetization per spin is m = -(1/pi) int u / Delta and

    G_k = (1/pi) int [sin(k phi) v - cos(k phi) u] / Delta.

Normalization: G_k carries no extra factor 2, so G_0 = m. This is the
convention for which S^x_1 = G_{-1}, S^y_1 = G_1 and
S^z_r = m^2 - G_r G_{-r} reproduce exact diagonalization of the finite
chain (see ``xyqfi.oracle``). With an extra factor 2 the resulting
two-spin matrices are not positive semidefinite.

Parameter derivatives are taken under the integral sign. Writing
W = (v du - u dv) / Delta^3 for a parameter with du = du/dlam,
dv = dv/dlam, one gets d(u/Delta) = v W and d(v/Delta) = -u W, hence

    dG_k/dlam = -(1/pi) int W [u sin(k phi) + v cos(k phi)].

All coefficients for one parameter point are integrated together as a
single vector-valued adaptive Gauss-Kronrod problem and memoized.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad_vec

from .errors import InvalidParameters, NonConvergence

# Smallest k-range integrated per parameter point; covers separations up to 6.
DEFAULT_KMAX = 6


class ParameterTag(str, enum.Enum):
    """Hamiltonian parameters, in the fixed order (J, gamma, D)."""

    J = "J"
    GAMMA = "gamma"
    D = "D"

    @property
    def index(self) -> int:
        return _TAG_ORDER.index(self)

    @classmethod
    def parse(cls, name: str) -> "ParameterTag":
        key = name.strip()
        aliases = {"j": cls.J, "gamma": cls.GAMMA, "g": cls.GAMMA, "d": cls.D}
        try:
            return aliases[key.lower()]
        except KeyError:
            raise InvalidParameters(f"unknown parameter tag {name!r}") from None


_TAG_ORDER = (ParameterTag.J, ParameterTag.GAMMA, ParameterTag.D)
TAGS = _TAG_ORDER


@dataclass(frozen=True)
class ChainParams:
    """Point (J, gamma, D) in parameter space.

    Only finiteness is checked here; the physical range of gamma and the
    J != 0 requirement are enforced by the Fisher-information entry points
    (finite-difference checks legitimately step slightly outside).
    """

    J: float
    gamma: float
    D: float

    def __post_init__(self):
        for name in ("J", "gamma", "D"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise InvalidParameters(f"{name} must be finite, got {val}")
            object.__setattr__(self, name, float(val))

    def shifted(self, tag: ParameterTag, delta: float) -> "ChainParams":
        vals = [self.J, self.gamma, self.D]
        vals[ParameterTag(tag).index] += delta
        return ChainParams(*vals)

    def value(self, tag: ParameterTag) -> float:
        return (self.J, self.gamma, self.D)[ParameterTag(tag).index]

    def require_fisher_domain(self):
        if not -1.0 <= self.gamma <= 1.0:
            raise InvalidParameters(f"gamma must lie in [-1, 1], got {self.gamma}")
        if self.J == 0.0:
            raise InvalidParameters("Fisher information is only defined here for J != 0")


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000
    critical_guard: float = 1e-3

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidParameters("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise InvalidParameters("max_subdivisions must be >= 1")
        if self.critical_guard < 0:
            raise InvalidParameters("critical_guard must be >= 0")

    def near_critical(self, params: ChainParams) -> bool:
        return min(abs(params.J - 1.0), abs(params.J + 1.0)) < self.critical_guard


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class DispersionPoint:
    phi: float
    delta: float


def dispersion(params: ChainParams, phi: float) -> DispersionPoint:
    u = params.J * (math.cos(phi) - 2.0 * params.D * math.sin(phi)) - 1.0
    v = params.J * params.gamma * math.sin(phi)
    return DispersionPoint(phi=phi, delta=math.hypot(u, v))


@dataclass(frozen=True)
class ChainIntegrals:
    """G_k for k in [-kmax, kmax] and their (J, gamma, D) partials.

    ``G[k + kmax]`` is G_k; ``dG[i, k + kmax]`` is its partial with respect
    to the i-th parameter in (J, gamma, D) order.
    """

    params: ChainParams
    kmax: int
    G: np.ndarray
    dG: np.ndarray
    error_estimate: float
    evaluations: int

    def g(self, k: int) -> float:
        return float(self.G[k + self.kmax])

    def dg(self, k: int, wrt: ParameterTag) -> float:
        return float(self.dG[ParameterTag(wrt).index, k + self.kmax])

    @property
    def magnetization(self) -> float:
        return self.g(0)


def _integrand(phi, J, gamma, D, ks):
    s, c = math.sin(phi), math.cos(phi)
    u = J * (c - 2.0 * D * s) - 1.0
    v = J * gamma * s
    d2 = u * u + v * v
    if d2 == 0.0:
        # gap closes on a node: let the caller report non-convergence
        return np.full(4 * ks.size, np.nan)
    d = math.sqrt(d2)
    sk = np.sin(ks * phi)
    ck = np.cos(ks * phi)
    out = np.empty(4 * ks.size)
    n = ks.size
    out[:n] = (sk * v - ck * u) / d
    mix = u * sk + v * ck
    d3 = d2 * d
    # (du, dv) for J, gamma, D
    for i, (du, dv) in enumerate(((c - 2.0 * D * s, gamma * s), (0.0, J * s), (-2.0 * J * s, 0.0)), start=1):
        w = (v * du - u * dv) / d3
        out[i * n:(i + 1) * n] = -w * mix
    return out / math.pi


@lru_cache(maxsize=4096)
def _integrate(params: ChainParams, kmax: int, cfg: QuadratureConfig) -> ChainIntegrals:
    ks = np.arange(-kmax, kmax + 1, dtype=float)
    res, err, info = quad_vec(
        _integrand, 0.0, math.pi,
        args=(params.J, params.gamma, params.D, ks),
        epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
        limit=cfg.max_subdivisions, full_output=True,
    )
    if info.status != 0 or not np.all(np.isfinite(res)):
        raise NonConvergence(
            f"quadrature failed at {params} (status={info.status}, "
            f"error estimate={err:.3g}, intervals={len(info.intervals)}): {info.message}"
        )
    n = ks.size
    G = res[:n].copy()
    dG = res[n:].reshape(3, n).copy()
    G.setflags(write=False)
    dG.setflags(write=False)
    m = G[kmax]
    if abs(m) > 1.0 + cfg.abs_tol:
        raise NonConvergence(f"|m| = {abs(m):.12g} exceeds 1 at {params}")
    return ChainIntegrals(params, kmax, G, dG, float(err), int(info.neval))


def chain_integrals(params: ChainParams, kmax: int = DEFAULT_KMAX,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> ChainIntegrals:
    """Memoized G_k and partials for |k| <= max(kmax, DEFAULT_KMAX)."""
    return _integrate(params, max(int(kmax), DEFAULT_KMAX), cfg)


def clear_cache():
    _integrate.cache_clear()


def magnetization(params: ChainParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return chain_integrals(params, cfg=cfg).magnetization


def g_coefficient(params: ChainParams, k: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return chain_integrals(params, abs(k), cfg).g(k)


def magnetization_partial(params: ChainParams, wrt: ParameterTag,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return chain_integrals(params, cfg=cfg).dg(0, wrt)


def g_coefficient_partial(params: ChainParams, k: int, wrt: ParameterTag,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return chain_integrals(params, abs(k), cfg).dg(k, wrt)
