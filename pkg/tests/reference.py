"""Independent reference implementations used to derive frozen test values.

Nothing here imports the integration or Toeplitz code of the package: G_k
comes from fixed composite Gauss-Legendre quadrature, derivatives from
Richardson-extrapolated central differences, determinants from an explicit
matrix built entry by entry, and SLDs from scipy's Sylvester solver.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_sylvester

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(40)


def _grid(panels=400):
    edges = np.linspace(0.0, np.pi, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    phi = 0.5 * (hi - lo) * _NODES[None, :] + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * _WEIGHTS[None, :]
    return phi.ravel(), w.ravel()


PHI, W = _grid()


def g_ref(J, gamma, D, k):
    u = J * (np.cos(PHI) - 2 * D * np.sin(PHI)) - 1
    v = J * gamma * np.sin(PHI)
    f = (np.sin(k * PHI) * v - np.cos(k * PHI) * u) / np.hypot(u, v)
    return float(W @ f / np.pi)


def m_ref(J, gamma, D):
    u = J * (np.cos(PHI) - 2 * D * np.sin(PHI)) - 1
    v = J * gamma * np.sin(PHI)
    return float(-(W @ (u / np.hypot(u, v))) / np.pi)


def richardson(fn, x, h=1e-4):
    c1 = (fn(x + h) - fn(x - h)) / (2 * h)
    c2 = (fn(x + 2 * h) - fn(x - 2 * h)) / (4 * h)
    return (4 * c1 - c2) / 3


def partial(fn, params, index, h=1e-4):
    """d fn(J, gamma, D) / d params[index]."""
    def shifted(x):
        p = list(params)
        p[index] = x
        return fn(*p)
    return richardson(shifted, params[index], h)


def correlators_ref(J, gamma, D, r):
    """(m, sxx, syy, szz) from explicit Toeplitz matrices of reference G's."""
    G = {k: g_ref(J, gamma, D, k) for k in range(-r - 1, r + 2)}
    m = m_ref(J, gamma, D)
    sx = np.array([[G[j - i - 1] for j in range(r)] for i in range(r)])
    sy = np.array([[G[i - j + 1] for j in range(r)] for i in range(r)])
    return m, float(np.linalg.det(sx)), float(np.linalg.det(sy)), m * m - G[r] * G[-r]


def rho2_ref(J, gamma, D, r):
    m, sxx, syy, szz = correlators_ref(J, gamma, D, r)
    ap, am = (1 + 2 * m + szz) / 4, (1 - 2 * m + szz) / 4
    bp, bm, c = (sxx + syy) / 4, (sxx - syy) / 4, (1 - szz) / 4
    return np.array([[ap, 0, 0, bm], [0, c, bp, 0], [0, bp, c, 0], [bm, 0, 0, am]])


def drho2_ref(J, gamma, D, r, index, h=1e-4):
    return partial(lambda *p: rho2_ref(*p, r), (J, gamma, D), index, h)


def sld_sylvester(rho, drho):
    """Solve (rho L + L rho) / 2 = drho directly."""
    return solve_sylvester(rho / 2, rho / 2, drho)


def qfi_eig(rho, drho, floor=1e-12):
    p, V = np.linalg.eigh(rho)
    d = V.T @ drho @ V
    s = p[:, None] + p[None, :]
    mask = s > floor
    return float(np.sum(2 * d[mask] ** 2 / s[mask]))


def probs_ref(J, gamma, D, r):
    rho = rho2_ref(J, gamma, D, r)
    return np.array([rho[0, 0], rho[1, 1], rho[2, 2], rho[3, 3]])


def fi_probs(J, gamma, D, r, index, h=1e-4):
    p = probs_ref(J, gamma, D, r)
    dp = partial(lambda *q: probs_ref(*q, r), (J, gamma, D), index, h)
    return float(np.sum(dp ** 2 / p))


def kron_hamiltonian(N, J, gamma, D):
    """Dense H built from Kronecker products, periodic chain."""
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]])
    Z = np.diag([1.0, -1.0]).astype(complex)

    def op(ops):
        out = np.ones((1, 1), dtype=complex)
        for l in range(N):
            out = np.kron(out, ops.get(l, np.eye(2)))
        return out

    H = np.zeros((2 ** N, 2 ** N), dtype=complex)
    for l in range(N):
        k = (l + 1) % N
        H += (J / 2) * ((1 + gamma) * op({l: X, k: X}) + (1 - gamma) * op({l: Y, k: Y})
                        + D * (op({l: X, k: Y}) - op({l: Y, k: X})))
        H -= op({l: Z})
    return H
