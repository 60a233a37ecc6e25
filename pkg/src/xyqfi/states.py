"""Single-spin and two-spin reduced density matrices.

Basis order for two spins is |00>, |01>, |10>, |11> with |0> the
sigma^z = +1 state. The pair state has X structure

    [[a+, 0,  0,  b-],
     [0,  c,  b+, 0 ],
     [0,  b+, c,  0 ],
     [b-, 0,  0,  a-]]

and is kept as its five scalars; ``dense()`` is only for oracles and
multi-parameter products.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain_model import DEFAULT_CONFIG, ChainParams, ParameterTag, QuadratureConfig, magnetization
from .correlations import Separation, correlation_partials, correlation_set
from .errors import PositivityViolation

TRACE_TOL = 1e-12
PSD_TOL = 1e-9


@dataclass(frozen=True)
class SingleSpinState:
    p: float
    m: float

    def dense(self) -> np.ndarray:
        return np.diag([self.p, 1.0 - self.p])


@dataclass(frozen=True)
class XState:
    a_plus: float
    a_minus: float
    b_plus: float
    b_minus: float
    c: float
    r: Separation | None = None

    @property
    def trace(self) -> float:
        return self.a_plus + self.a_minus + 2.0 * self.c

    def dense(self) -> np.ndarray:
        return _x_dense(self.a_plus, self.a_minus, self.b_plus, self.b_minus, self.c)

    def check(self, tol: float = PSD_TOL):
        if abs(self.trace - 1.0) > TRACE_TOL:
            raise PositivityViolation(f"trace {self.trace!r} != 1")
        lo = min(xstate_eigensystem(self, clamp=False)[0])
        if lo < -tol:
            raise PositivityViolation(f"eigenvalue {lo:.3e} < 0 for {self}")


@dataclass(frozen=True)
class XStateTangent:
    """Derivative of an XState's five entries with respect to one parameter."""

    a_plus: float
    a_minus: float
    b_plus: float
    b_minus: float
    c: float
    wrt: ParameterTag

    def dense(self) -> np.ndarray:
        return _x_dense(self.a_plus, self.a_minus, self.b_plus, self.b_minus, self.c)


def _x_dense(ap, am, bp, bm, c):
    return np.array([
        [ap, 0.0, 0.0, bm],
        [0.0, c, bp, 0.0],
        [0.0, bp, c, 0.0],
        [bm, 0.0, 0.0, am],
    ])


@dataclass(frozen=True)
class MinkowskiCoefficients:
    """Coefficients (a_0..a_3), (b_0..b_3) of the two blocks, metric diag(1,-1,-1,-1)."""

    a: tuple
    b: tuple

    @staticmethod
    def eta_dot(x, y) -> float:
        return x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3]

    def dense(self) -> np.ndarray:
        """Rebuild rho_2 from the block coefficients.

        Outer block {|00>,|11>} is (a_0 I + a_1 X + a_3 Z)/2, inner block
        {|01>,|10>} is (b_0 I + b_1 X)/2.
        """
        a0, a1, _, a3 = self.a
        b0, b1, _, _ = self.b
        return _x_dense((a0 + a3) / 2, (a0 - a3) / 2, b1 / 2, a1 / 2, b0 / 2)


def single_spin_state(params: ChainParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> SingleSpinState:
    m = magnetization(params, cfg)
    return SingleSpinState(p=0.5 * (1.0 + m), m=m)


def xstate_from_correlations(m, sxx, syy, szz, r=None) -> XState:
    return XState(
        a_plus=0.25 * (1.0 + 2.0 * m + szz),
        a_minus=0.25 * (1.0 - 2.0 * m + szz),
        b_plus=0.25 * (sxx + syy),
        b_minus=0.25 * (sxx - syy),
        c=0.25 * (1.0 - szz),
        r=r,
    )


def pair_state(params: ChainParams, r: Separation,
               cfg: QuadratureConfig = DEFAULT_CONFIG, check: bool = True) -> XState:
    cs = correlation_set(params, r, cfg)
    st = xstate_from_correlations(cs.m, cs.sxx, cs.syy, cs.szz, cs.r)
    if check:
        st.check()
    return st


def pair_state_partial(params: ChainParams, r: Separation, wrt: ParameterTag,
                       cfg: QuadratureConfig = DEFAULT_CONFIG) -> XStateTangent:
    d = correlation_partials(params, r, wrt, cfg)
    return XStateTangent(
        a_plus=0.25 * (2.0 * d.dm + d.dszz),
        a_minus=0.25 * (-2.0 * d.dm + d.dszz),
        b_plus=0.25 * (d.dsxx + d.dsyy),
        b_minus=0.25 * (d.dsxx - d.dsyy),
        c=-0.25 * d.dszz,
        wrt=d.wrt,
    )


def xstate_eigensystem(state: XState, clamp: bool = True):
    """Eigenvalues (descending) and eigenvectors (columns) from the two 2x2 blocks."""
    ap, am, bp, bm, c = state.a_plus, state.a_minus, state.b_plus, state.b_minus, state.c
    mean = 0.5 * (ap + am)
    half = 0.5 * (ap - am)
    rad = np.hypot(half, bm)
    # outer block eigenvectors via the rotation angle of [[ap, bm], [bm, am]]
    theta = 0.5 * np.arctan2(2.0 * bm, ap - am)
    co, si = np.cos(theta), np.sin(theta)
    s = 1.0 / np.sqrt(2.0)
    pairs = [
        (mean + rad, np.array([co, 0.0, 0.0, si])),
        (mean - rad, np.array([-si, 0.0, 0.0, co])),
        (c + bp, np.array([0.0, s, s, 0.0])),
        (c - bp, np.array([0.0, s, -s, 0.0])),
    ]
    pairs.sort(key=lambda t: -t[0])
    vals = np.array([p[0] for p in pairs])
    vecs = np.column_stack([p[1] for p in pairs])
    if clamp:
        if vals.min() < -PSD_TOL:
            raise PositivityViolation(f"eigenvalue {vals.min():.3e} < 0")
        vals = np.clip(vals, 0.0, None)
    return vals, vecs


def minkowski_coefficients(params: ChainParams, r: Separation,
                           cfg: QuadratureConfig = DEFAULT_CONFIG) -> MinkowskiCoefficients:
    cs = correlation_set(params, r, cfg)
    return minkowski_from_correlations(cs.m, cs.sxx, cs.syy, cs.szz)


def minkowski_from_correlations(m, sxx, syy, szz) -> MinkowskiCoefficients:
    return MinkowskiCoefficients(
        a=(0.5 * (1.0 + szz), 0.5 * (sxx - syy), 0.0, m),
        b=(0.5 * (1.0 - szz), 0.5 * (sxx + syy), 0.0, 0.0),
    )
