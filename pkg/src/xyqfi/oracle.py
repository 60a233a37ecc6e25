"""Independent checks: exact diagonalization of a finite periodic chain,
dense SLD solver and finite differences.

The finite-chain Hamiltonian is

    H = sum_l (J/2) [(1+g) X_l X_{l+1} + (1-g) Y_l Y_{l+1}
                     + D (X_l Y_{l+1} - Y_l X_{l+1})] - sum_l Z_l

with X_{N+1} = X_1. The factor 1/2 on the coupling is what makes the
thermodynamic-limit integrals in ``chain_model`` the N -> oo limit of this
chain (critical points at J = +-1); without it every correlator is off.

At D != 0 the DM term commutes with the rest of H (it only shifts the
single-particle energies by an odd function of momentum), so for small D
the finite-chain ground state does not depend on D, while the integrals
do. Library-vs-oracle agreement is therefore only expected at D = 0.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .chain_model import ChainParams, ParameterTag
from .correlations import CorrelationSet
from .errors import InvalidParameters

DEGENERACY_GAP = 1e-10

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0, -1.0]).astype(complex)
_I = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class FiniteChainSpec:
    N: int
    params: ChainParams
    boundary: str = "periodic"

    def __post_init__(self):
        if self.N % 2 or not 4 <= self.N <= 14:
            raise InvalidParameters(f"N must be even with 4 <= N <= 14, got {self.N}")
        if self.boundary != "periodic":
            raise InvalidParameters("only periodic boundaries are supported")

    @property
    def dim(self) -> int:
        return 2 ** self.N


def hamiltonian(spec: FiniteChainSpec) -> sp.csr_matrix:
    N, p = spec.N, spec.params
    states = np.arange(spec.dim)
    # site l lives on bit N-1-l so that reshaping to [2]*N orders axes by site
    bits = (states[:, None] >> (N - 1 - np.arange(N))[None, :]) & 1
    diag = -(1 - 2 * bits).sum(axis=1).astype(complex)
    rows, cols, vals = [states], [states], [diag]
    half_j = 0.5 * p.J
    for l in range(N):
        k = (l + 1) % N
        bl, bk = bits[:, l], bits[:, k]
        sl, sk = 1 - 2 * bl, 1 - 2 * bk
        amp = half_j * ((1 + p.gamma) - (1 - p.gamma) * sl * sk + 1j * p.D * (sk - sl))
        flipped = states ^ (1 << (N - 1 - l)) ^ (1 << (N - 1 - k))
        rows.append(flipped)
        cols.append(states)
        vals.append(amp)
    H = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(spec.dim, spec.dim),
    ).tocsr()
    H.sum_duplicates()
    if p.D == 0.0:
        H = H.real.tocsr()
    return H


@dataclass
class GroundState:
    energy: float
    vector: np.ndarray = field(repr=False)
    gap: float
    degenerate: bool
    vectors: list = field(default_factory=list, repr=False)

    def projector_states(self):
        return self.vectors if self.degenerate else [self.vector]


def ground_state(spec: FiniteChainSpec, solver: str = "auto") -> GroundState:
    H = hamiltonian(spec)
    if solver == "auto":
        solver = "dense" if spec.dim <= 1024 else "sparse"
    if solver == "dense":
        w, v = np.linalg.eigh(H.toarray())
        w, v = w[:2], v[:, :2]
    elif solver == "sparse":
        v0 = np.ones(spec.dim, dtype=H.dtype)
        w, v = sla.eigsh(H, k=2, which="SA", v0=v0, tol=1e-12)
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    else:
        raise ValueError(f"unknown solver {solver!r}")
    vecs = [v[:, i] / np.linalg.norm(v[:, i]) for i in range(2)]
    gap = float(w[1] - w[0])
    return GroundState(float(w[0]), vecs[0], gap, gap < DEGENERACY_GAP, vecs)


def _reduced(gs: GroundState, N: int, sites) -> np.ndarray:
    n = len(sites)
    rho = np.zeros((2 ** n, 2 ** n), dtype=complex)
    states = gs.projector_states()
    for psi in states:
        t = psi.reshape([2] * N)
        rest = [s for s in range(N) if s not in sites]
        t = np.transpose(t, list(sites) + rest).reshape(2 ** n, -1)
        rho += t @ t.conj().T
    return rho / len(states)


def reduced_pair(spec: FiniteChainSpec, j: int, r: int, gs: GroundState | None = None) -> np.ndarray:
    """rho_2 on sites (j, j+r), 1-based j, periodic wrap."""
    if not 1 <= j <= spec.N or not 1 <= r <= spec.N // 2:
        raise InvalidParameters(f"need 1 <= j <= N and 1 <= r <= N/2, got j={j}, r={r}")
    gs = gs or ground_state(spec)
    a = j - 1
    return _reduced(gs, spec.N, (a, (a + r) % spec.N))


def oracle_correlators(spec: FiniteChainSpec, r: int, gs: GroundState | None = None) -> CorrelationSet:
    rho = reduced_pair(spec, 1, r, gs)

    def ev(A, B):
        return float(np.trace(rho @ np.kron(A, B)).real)

    m = 0.5 * (ev(_Z, _I) + ev(_I, _Z))
    return CorrelationSet(r=r, m=m, sxx=ev(_X, _X), syy=ev(_Y, _Y), szz=ev(_Z, _Z))


def sld_dense(rho: np.ndarray, drho: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    """Solve d rho = (L rho + rho L)/2 in the eigenbasis of rho; null sectors set to 0."""
    w, V = np.linalg.eigh(rho)
    d = V.conj().T @ drho @ V
    s = w[:, None] + w[None, :]
    mask = s > floor
    L = np.zeros_like(d, dtype=complex)
    L[mask] = 2.0 * d[mask] / s[mask]
    out = V @ L @ V.conj().T
    return out.real.copy() if np.isrealobj(rho) and np.isrealobj(drho) else out


def qfi_dense(rho: np.ndarray, drho: np.ndarray) -> float:
    L = sld_dense(rho, drho)
    return float(np.trace(rho @ L @ L).real)


@dataclass(frozen=True)
class FiniteDifference:
    value: float
    error: float


def finite_difference(fn: Callable[[float], float], at: float, h: float = 1e-5) -> FiniteDifference:
    """Five-point central derivative.

    The five-point stencil is the Richardson extrapolation of the central
    differences with steps h and 2h; the gap between it and the step-h
    central difference is returned as the truncation-error estimate.
    """
    fp1, fm1 = fn(at + h), fn(at - h)
    fp2, fm2 = fn(at + 2 * h), fn(at - 2 * h)
    c1 = (fp1 - fm1) / (2 * h)
    c2 = (fp2 - fm2) / (4 * h)
    five = (4 * c1 - c2) / 3
    return FiniteDifference(five, abs(five - c1))


def oracle_pair_derivative(spec: FiniteChainSpec, r: int, tag: ParameterTag, h: float = 1e-4) -> np.ndarray:
    """d rho_2 / d lambda by a five-point stencil over exact diagonalizations."""
    def rho_at(delta):
        s = FiniteChainSpec(spec.N, spec.params.shifted(tag, delta))
        return reduced_pair(s, 1, r)

    return (-rho_at(2 * h) + 8 * rho_at(h) - 8 * rho_at(-h) + rho_at(-2 * h)) / (12 * h)


def oracle_qfi_pair(spec: FiniteChainSpec, r: int, tag: ParameterTag, h: float = 1e-4) -> float:
    return qfi_dense(reduced_pair(spec, 1, r), oracle_pair_derivative(spec, r, tag, h))


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    J: float
    gamma: float
    D: float
    r: int | None
    N: int | None
    library: float
    oracle: float
    abs_dev: float
    rel_dev: float
    tolerance: str
    passed: bool
    source: str = "oracle"

    def row(self) -> dict:
        return asdict(self)


def compare(quantity: str, params: ChainParams, library: float, oracle: float, *,
            r=None, N=None, rel_tol: float = 0.05, abs_tol: float = 0.02) -> OracleReport:
    """Pass when |lib - oracle| <= max(rel_tol |oracle|, abs_tol)."""
    dev = abs(library - oracle)
    rel = dev / abs(oracle) if oracle != 0 else (0.0 if dev == 0 else math.inf)
    ok = bool(np.isfinite(dev) and dev <= max(rel_tol * abs(oracle), abs_tol))
    return OracleReport(
        quantity, params.J, params.gamma, params.D, r, N,
        float(library), float(oracle), float(dev), float(rel),
        f"max({rel_tol:g}*|oracle|, {abs_tol:g})", ok,
    )
