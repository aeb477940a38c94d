"""Brute-force reference computations shared by the tests.

They rebuild the cardinal functions from scratch with plain monomials and a
dense solve, so they share no code path with the package.
"""

import numpy as np

from weakrbf.rbf_space import Domain, NodeSet


def phs(r, k):
    return r**k


def dphs(r, k):
    return k * r ** (k - 1)


def cardinal_on_grid(centers, k, P, x):
    """Values and x-derivatives of the cardinal functions of an r^k space."""
    c = np.asarray(centers, dtype=float)
    N = len(c)
    Pm = np.vander(c, P, increasing=True) if P else np.zeros((N, 0))
    V = np.block([[phs(np.abs(c[:, None] - c[None, :]), k), Pm], [Pm.T, np.zeros((P, P))]])
    coef = np.linalg.solve(V, np.vstack([np.eye(N), np.zeros((P, N))]))
    d = x[:, None] - c[None, :]
    A = phs(np.abs(d), k)
    Ad = dphs(np.abs(d), k) * np.sign(d)
    Q = np.vander(x, P, increasing=True) if P else np.zeros((len(x), 0))
    Qd = np.zeros_like(Q)
    for j in range(1, P):
        Qd[:, j] = j * x ** (j - 1)
    return np.hstack([A, Q]) @ coef, np.hstack([Ad, Qd]) @ coef


def trapezoid(a, b, n):
    x = np.linspace(a, b, n)
    w = np.full(n, (b - a) / (n - 1))
    w[[0, -1]] *= 0.5
    return x, w


def dense_mass_and_stiffness(centers, k, P, a=-1.0, b=1.0, n=100_000):
    x, w = trapezoid(a, b, n)
    L, Ld = cardinal_on_grid(centers, k, P, x)
    return L.T @ (w[:, None] * L), Ld.T @ (w[:, None] * L)


def jittered_nodes(n, seed, frac=0.3, a=-1.0, b=1.0):
    """Random 1D nodes that keep a minimum gap, so conditioning stays moderate."""
    rng = np.random.default_rng(seed)
    h = (b - a) / (n - 1)
    x = np.linspace(a, b, n) + rng.uniform(-frac * h, frac * h, n)
    return NodeSet(np.clip(x, a, b), Domain.interval(a, b))
