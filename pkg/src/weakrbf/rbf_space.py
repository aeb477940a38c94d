"""Polynomial-augmented RBF trial spaces.

The space is represented by its cardinal (Lagrange) basis: ``ell_n(x_m) =
delta_nm``. Nodal values are therefore the natural unknowns, and coefficient
form ``(alpha, beta)`` is recovered on demand from one factorization of the
saddle-point matrix ``[[Phi, P^T], [P, 0]]``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np
import scipy.linalg as sla

from weakrbf.errors import FactorizationError, InvalidNodesError
from weakrbf.kernels import Kernel, eval_kernel, kernel_gradient_matrix

logger = logging.getLogger(__name__)

CONDITION_WARNING = 1e12


@dataclass(frozen=True)
class Domain:
    """An interval or an axis-aligned rectangle."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi) or len(lo) not in (1, 2):
            raise ValueError("domain must be 1D or 2D with matching bounds")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"domain bounds must satisfy lower < upper, got {lo}, {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def interval(cls, a: float, b: float) -> Domain:
        return cls((a,), (b,))

    @classmethod
    def rectangle(cls, a, b) -> Domain:
        """Box ``[a0, b0] x [a1, b1]``; scalars give the square ``[a, b]^2``."""
        a = np.broadcast_to(np.asarray(a, dtype=float), (2,))
        b = np.broadcast_to(np.asarray(b, dtype=float), (2,))
        return cls(tuple(a), tuple(b))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def widths(self) -> np.ndarray:
        return np.subtract(self.upper, self.lower)

    @property
    def measure(self) -> float:
        return float(np.prod(self.widths))

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * np.add(self.lower, self.upper)

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(points)
        lo = np.asarray(self.lower) - tol
        hi = np.asarray(self.upper) + tol
        return np.all((pts >= lo) & (pts <= hi), axis=1)


@dataclass(frozen=True)
class NodeSet:
    points: np.ndarray
    domain: Domain

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] != self.domain.dim:
            raise InvalidNodesError(
                f"points of shape {pts.shape} do not match a {self.domain.dim}D domain"
            )
        if len(pts) == 0:
            raise InvalidNodesError("node set is empty")
        if not np.all(self.domain.contains(pts)):
            raise InvalidNodesError("nodes lie outside the domain")
        if self.domain.dim == 1:
            pts = np.sort(pts, axis=0)
        _check_distinct(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.domain.dim


def _check_distinct(pts, tol=0.0):
    if len(pts) < 2:
        return
    if pts.shape[1] == 1:
        gaps = np.diff(np.sort(pts[:, 0]))
        bad = np.any(gaps <= tol)
    else:
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        d[np.diag_indices(len(pts))] = np.inf
        bad = np.any(d <= tol)
    if bad:
        raise InvalidNodesError("duplicate centers in node set")


def equidistant_nodes(domain: Domain, n: int) -> NodeSet:
    """Equidistant nodes including the boundary.

    In 2D ``n`` must be a perfect square and a tensor grid is returned.
    """
    if domain.dim == 1:
        if n == 1:
            return NodeSet(domain.midpoint[None, :], domain)
        return NodeSet(np.linspace(domain.lower[0], domain.upper[0], n), domain)
    m = int(round(np.sqrt(n)))
    if m * m != n or m < 2:
        raise InvalidNodesError(f"2D equidistant nodes need a square count >= 4, got {n}")
    xs = np.linspace(domain.lower[0], domain.upper[0], m)
    ys = np.linspace(domain.lower[1], domain.upper[1], m)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return NodeSet(np.column_stack([X.ravel(), Y.ravel()]), domain)


def random_nodes(domain: Domain, n: int, seed: int) -> NodeSet:
    """Uniform i.i.d. nodes from a seeded generator, duplicates rejected."""
    rng = np.random.default_rng(seed)
    lo = np.asarray(domain.lower)
    w = domain.widths
    pts = []
    while len(pts) < n:
        p = lo + w * rng.random(domain.dim)
        if all(np.linalg.norm(p - q) > 1e-12 for q in pts):
            pts.append(p)
    return NodeSet(np.array(pts), domain)


def load_nodes(path, domain: Domain) -> NodeSet:
    """Read one point per line, whitespace-separated coordinates."""
    pts = np.loadtxt(path, ndmin=2)
    return NodeSet(pts, domain)


def poly_exponents(P: int, dim: int) -> list[tuple[int, ...]]:
    """Monomial exponents spanning polynomials of degree <= P - 1."""
    if P <= 0:
        return []
    exps = [e for e in product(range(P), repeat=dim) if sum(e) <= P - 1]
    return sorted(exps, key=lambda e: (sum(e), tuple(-v for v in e)))


def poly_count(P: int, dim: int) -> int:
    return comb(P - 1 + dim, dim) if P > 0 else 0


@dataclass(frozen=True, eq=False)
class RbfSpace:
    """The trial/test space ``V_{N,P}`` on a fixed node set."""

    kernel: Kernel
    nodes: NodeSet
    P: int
    exponents: list = field(repr=False)
    saddle: np.ndarray = field(repr=False)
    lu: tuple = field(repr=False)
    cardinal_coeffs: np.ndarray = field(repr=False)
    condition: float

    @property
    def N(self) -> int:
        return len(self.nodes)

    @property
    def K(self) -> int:
        return len(self.exponents)

    @property
    def dim(self) -> int:
        return self.nodes.dim

    @property
    def domain(self) -> Domain:
        return self.nodes.domain

    @property
    def centers(self) -> np.ndarray:
        return self.nodes.points

    @property
    def Phi(self) -> np.ndarray:
        return self.saddle[: self.N, : self.N]

    # -- basis blocks -------------------------------------------------------

    def _as_points(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim <= 1 and self.dim == 1:
            pts = pts.reshape(-1, 1)
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}")
        return pts

    def _scaled(self, pts):
        half = 0.5 * self.domain.widths
        return (pts - self.domain.midpoint) / half, half

    def kernel_block(self, points) -> np.ndarray:
        pts = self._as_points(points)
        diff = pts[:, None, :] - self.centers[None, :, :]
        return eval_kernel(self.kernel, np.sqrt(np.sum(diff * diff, axis=-1)))

    def poly_block(self, points) -> np.ndarray:
        pts = self._as_points(points)
        s, _ = self._scaled(pts)
        cols = [np.prod(s ** np.asarray(e), axis=1) for e in self.exponents]
        return np.column_stack(cols) if cols else np.zeros((len(pts), 0))

    def kernel_derivative_block(self, points, axis: int) -> np.ndarray:
        pts = self._as_points(points)
        return kernel_gradient_matrix(self.kernel, pts, self.centers)[..., axis]

    def poly_derivative_block(self, points, axis: int) -> np.ndarray:
        pts = self._as_points(points)
        s, half = self._scaled(pts)
        cols = []
        for e in self.exponents:
            e = np.asarray(e)
            if e[axis] == 0:
                cols.append(np.zeros(len(pts)))
                continue
            de = e.copy()
            de[axis] -= 1
            cols.append(e[axis] * np.prod(s**de, axis=1) / half[axis])
        return np.column_stack(cols) if cols else np.zeros((len(pts), 0))

    def design(self, points) -> np.ndarray:
        """Rows ``[phi(|x - x_n|)..., p_k(x)...]`` for each point."""
        return np.hstack([self.kernel_block(points), self.poly_block(points)])

    def design_derivative(self, points, axis: int = 0) -> np.ndarray:
        self._check_axis(axis)
        return np.hstack(
            [self.kernel_derivative_block(points, axis), self.poly_derivative_block(points, axis)]
        )

    def _check_axis(self, axis):
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for a {self.dim}D space")

    # -- linear algebra -----------------------------------------------------

    def solve(self, rhs) -> np.ndarray:
        return sla.lu_solve(self.lu, rhs)

    def cardinal_matrix(self, points) -> np.ndarray:
        """Entry (m, n) is ``ell_n(points[m])``."""
        return self.design(points) @ self.cardinal_coeffs

    def cardinal_derivative_matrix(self, points, axis: int = 0) -> np.ndarray:
        """Entry (m, n) is ``d ell_n / d x_axis`` at ``points[m]``."""
        return self.design_derivative(points, axis) @ self.cardinal_coeffs

    def fit(self, values) -> Interpolant:
        values = np.asarray(values, dtype=float)
        if values.shape[0] != self.N:
            raise ValueError(f"expected {self.N} nodal values, got {values.shape[0]}")
        rhs = np.concatenate([values, np.zeros((self.K,) + values.shape[1:])])
        coef = self.solve(rhs)
        return Interpolant(self, coef[: self.N], coef[self.N :])


def build_space(kernel: Kernel, nodes: NodeSet, P: int) -> RbfSpace:
    """Assemble and factorize the saddle-point interpolation system."""
    if P < 0:
        raise ValueError("P must be nonnegative")
    pts = nodes.points
    N = len(pts)
    exps = poly_exponents(P, nodes.dim)
    K = len(exps)
    if K > N:
        raise InvalidNodesError(f"{N} nodes cannot be unisolvent for {K} polynomial terms")
    diff = pts[:, None, :] - pts[None, :, :]
    Phi = eval_kernel(kernel, np.sqrt(np.sum(diff * diff, axis=-1)))
    Phi = 0.5 * (Phi + Phi.T)

    half = 0.5 * nodes.domain.widths
    s = (pts - nodes.domain.midpoint) / half
    Pm = np.column_stack([np.prod(s ** np.asarray(e), axis=1) for e in exps]) if exps else np.zeros((N, 0))
    V = np.zeros((N + K, N + K))
    V[:N, :N] = Phi
    V[:N, N:] = Pm
    V[N:, :N] = Pm.T

    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond * np.finfo(float).eps > 1.0:
        raise FactorizationError(f"saddle-point matrix is singular (condition {cond:.3e})", cond)
    if cond > CONDITION_WARNING:
        logger.warning("saddle-point matrix is ill-conditioned (condition %.3e)", cond)
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu = sla.lu_factor(V)
        except (sla.LinAlgWarning, ValueError) as exc:
            raise FactorizationError(f"factorization failed: {exc}", cond) from exc

    rhs = np.zeros((N + K, N))
    rhs[:N, :N] = np.eye(N)
    coeffs = sla.lu_solve(lu, rhs)
    V.setflags(write=False)
    return RbfSpace(kernel, nodes, P, exps, V, lu, coeffs, cond)


@dataclass(frozen=True, eq=False)
class Interpolant:
    space: RbfSpace
    alpha: np.ndarray
    beta: np.ndarray

    def __call__(self, points):
        return self.evaluate(points)

    def evaluate(self, points) -> np.ndarray:
        sp = self.space
        return sp.kernel_block(points) @ self.alpha + sp.poly_block(points) @ self.beta

    def evaluate_derivative(self, points, axis: int = 0) -> np.ndarray:
        sp = self.space
        sp._check_axis(axis)
        return (
            sp.kernel_derivative_block(points, axis) @ self.alpha
            + sp.poly_derivative_block(points, axis) @ self.beta
        )

    def constraint_residual(self) -> np.ndarray:
        return self.space.poly_block(self.space.centers).T @ self.alpha


def fit(space: RbfSpace, nodal_values) -> Interpolant:
    return space.fit(nodal_values)


def evaluate(interp: Interpolant, points) -> np.ndarray:
    return interp.evaluate(points)


def evaluate_derivative(interp: Interpolant, points, axis: int = 0) -> np.ndarray:
    return interp.evaluate_derivative(points, axis)


def cardinal_matrix(space: RbfSpace, points) -> np.ndarray:
    return space.cardinal_matrix(points)


def cardinal_derivative_matrix(space: RbfSpace, points, axis: int = 0) -> np.ndarray:
    return space.cardinal_derivative_matrix(points, axis)
