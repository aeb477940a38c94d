"""Weak and strong RBF semidiscretizations in the cardinal basis.

With ``u_N = sum_n u_n ell_n`` and test functions ``ell_m`` the weak
collocation method reads

    M du/dt = B f(u) - (fR r - fL l),

where ``M_mn = int ell_m ell_n``, ``B_mn = int ell_m' ell_n``, and ``l``, ``r``
hold the cardinal functions evaluated at the left and right boundary.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from weakrbf.errors import FactorizationError, StateError
from weakrbf.quadrature import QuadratureRule
from weakrbf.rbf_space import RbfSpace

logger = logging.getLogger(__name__)

ASSEMBLY_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class EdgeTable:
    """Quadrature data for one side of a rectangle."""

    normal: np.ndarray
    weights: np.ndarray
    inner: np.ndarray  # cardinal values on this edge
    outer: np.ndarray  # cardinal values on the periodically wrapped edge


@dataclass(frozen=True, eq=False)
class WeakOperator:
    space: RbfSpace
    rule: QuadratureRule
    M: np.ndarray
    cho: tuple = field(repr=False)
    B: tuple  # one matrix per axis
    w: np.ndarray
    l: np.ndarray | None = None
    r: np.ndarray | None = None
    E: np.ndarray | None = field(default=None, repr=False)
    Ed: np.ndarray | None = field(default=None, repr=False)
    edges: tuple = field(default=(), repr=False)
    tau_q: float = 0.0
    condition: float = 1.0

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def Bx(self) -> np.ndarray:
        return self.B[0]

    def solve_mass(self, rhs):
        return sla.cho_solve(self.cho, rhs)

    def dump(self, directory) -> list:
        """Write M, B (per axis), l, r, w as text matrices; returns the paths."""
        from pathlib import Path

        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        items = {"M": self.M, "w": self.w}
        for axis, b in enumerate(self.B):
            items["B" if self.dim == 1 else "B" + "xy"[axis]] = b
        if self.l is not None:
            items["l"] = self.l
            items["r"] = self.r
        paths = []
        for name, mat in items.items():
            p = d / f"{name}.txt"
            export_matrix(p, mat)
            paths.append(p)
        return paths


def export_matrix(path, A) -> None:
    """Row-major text dump with 17 significant digits."""
    np.savetxt(path, np.atleast_2d(A), fmt="%.16e")


def _factor_mass(M):
    cond = float(np.linalg.cond(M))
    try:
        cho = sla.cho_factor(M)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise FactorizationError(f"mass matrix is not positive definite (condition {cond:.3e})", cond) from exc
    if cond > 1e12:
        logger.warning("mass matrix is ill-conditioned (condition %.3e)", cond)
    return cho, cond


def assemble_weak_operator(space: RbfSpace, rule: QuadratureRule) -> WeakOperator:
    """Galerkin matrices of ``V_{N,P}`` under ``rule``."""
    if rule.dimension != space.dim:
        raise ValueError(f"{rule.dimension}D rule for a {space.dim}D space")
    if space.dim == 1:
        return _assemble_1d(space, rule)
    return _assemble_2d(space, rule)


def _assemble_1d(space, rule):
    x = rule.nodes
    wq = rule.weights
    E = space.cardinal_matrix(x)
    Ed = space.cardinal_derivative_matrix(x, 0)
    M = E.T @ (wq[:, None] * E)
    M = 0.5 * (M + M.T)
    B = Ed.T @ (wq[:, None] * E)
    a, b = space.domain.lower[0], space.domain.upper[0]
    lr = space.cardinal_matrix(np.array([a, b]))
    l, r = lr[0], lr[1]
    w = E.T @ wq
    tau = float(np.max(np.abs(B + B.T - (np.outer(r, r) - np.outer(l, l)))))
    cho, cond = _factor_mass(M)
    logger.debug("assembled 1D weak operator: N=%d, tau_q=%.3e, cond(M)=%.3e", space.N, tau, cond)
    return WeakOperator(space, rule, M, cho, (B,), w, l, r, E, Ed, (), tau, cond)


def _assemble_2d(space, rule):
    if len(rule.factors) != 2:
        raise ValueError("2D weak assembly needs a tensor-product rule")
    N = space.N
    M = np.zeros((N, N))
    Bs = [np.zeros((N, N)), np.zeros((N, N))]
    w = np.zeros(N)
    for start in range(0, len(rule), ASSEMBLY_CHUNK):
        sl = slice(start, start + ASSEMBLY_CHUNK)
        x = rule.nodes[sl]
        wq = rule.weights[sl]
        E = space.cardinal_matrix(x)
        WE = wq[:, None] * E
        M += E.T @ WE
        w += E.T @ wq
        for axis in range(2):
            Bs[axis] += space.cardinal_derivative_matrix(x, axis).T @ WE
    M = 0.5 * (M + M.T)

    (ax, ay), (bx, by) = space.domain.lower, space.domain.upper
    rx, ry = rule.factors
    ys, wy = ry.nodes[:, 0], ry.weights
    xs, wx = rx.nodes[:, 0], rx.weights
    sides = [
        ((-1.0, 0.0), np.column_stack([np.full_like(ys, ax), ys]), np.column_stack([np.full_like(ys, bx), ys]), wy),
        ((1.0, 0.0), np.column_stack([np.full_like(ys, bx), ys]), np.column_stack([np.full_like(ys, ax), ys]), wy),
        ((0.0, -1.0), np.column_stack([xs, np.full_like(xs, ay)]), np.column_stack([xs, np.full_like(xs, by)]), wx),
        ((0.0, 1.0), np.column_stack([xs, np.full_like(xs, by)]), np.column_stack([xs, np.full_like(xs, ay)]), wx),
    ]
    edges = tuple(
        EdgeTable(np.array(n), wts, space.cardinal_matrix(p_in), space.cardinal_matrix(p_out))
        for n, p_in, p_out, wts in sides
    )
    # discrete divergence theorem: (Bx + Bx^T) should equal the boundary mass weighted by n_x
    tau = 0.0
    for axis in range(2):
        bnd = sum(e.normal[axis] * (e.inner.T @ (e.weights[:, None] * e.inner)) for e in edges)
        tau = max(tau, float(np.max(np.abs(Bs[axis] + Bs[axis].T - bnd))))
    cho, cond = _factor_mass(M)
    logger.debug("assembled 2D weak operator: N=%d, tau_q=%.3e, cond(M)=%.3e", N, tau, cond)
    return WeakOperator(space, rule, M, cho, tuple(Bs), w, edges=edges, tau_q=tau, condition=cond)


# -- right-hand sides -------------------------------------------------------


def _check_state(u):
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise StateError("state contains non-finite values")
    return u


def boundary_fluxes(op: WeakOperator, flux, problem, t, u):
    """``(fL, fR, uL, uR)`` for the 1D weak methods."""
    uL = op.l @ u
    uR = op.r @ u
    if problem.periodic:
        f = flux(uR, uL)
        return f, f, uL, uR
    bc = problem.boundary
    gL = uL if bc.g_left is None else bc.g_left(t)
    gR = uR if bc.g_right is None else bc.g_right(t)
    return flux(gL, uL), flux(uR, gR), uL, uR


def _boundary_vector(op, fL, fR):
    if np.ndim(fL) == 0:
        return fR * op.r - fL * op.l
    return np.outer(op.r, fR) - np.outer(op.l, fL)


def weak_collocation_rhs(op: WeakOperator, flux, problem, t, u):
    """``du/dt`` of the weak RBF collocation method (scalar or system, 1D)."""
    u = _check_state(u)
    fL, fR, _, _ = boundary_fluxes(op, flux, problem, t, u)
    rhs = op.Bx @ np.asarray(problem.flux(u)) - _boundary_vector(op, fL, fR)
    return op.solve_mass(rhs)


def weak_analytical_rhs(op: WeakOperator, flux, problem, t, u):
    """``du/dt`` with the exact flux applied to the interpolant at quadrature nodes."""
    if problem.n_components != 1:
        raise ValueError("the analytical weak method is implemented for scalar problems")
    u = _check_state(u)
    fL, fR, _, _ = boundary_fluxes(op, flux, problem, t, u)
    fq = np.asarray(problem.flux(op.E @ u))
    q = op.Ed.T @ (op.rule.weights * fq)
    return op.solve_mass(q - _boundary_vector(op, fL, fR))


def boundary_term_2d(op: WeakOperator, flux, u):
    """``oint ell_m F^num . n dS`` for each cardinal function."""
    out = np.zeros(op.space.N)
    for e in op.edges:
        fn = flux.normal_flux(e.normal, e.inner @ u, e.outer @ u)
        out += e.inner.T @ (e.weights * fn)
    return out


def weak_collocation_rhs_2d(op: WeakOperator, flux, problem, t, u):
    """``du/dt`` of the weak collocation method for periodic linear advection on a box."""
    if op.dim != 2 or not op.edges:
        raise ValueError("weak_collocation_rhs_2d needs a rectangle with periodic edge tables")
    if not problem.periodic:
        raise ValueError("only periodic boundaries are supported in 2D")
    u = _check_state(u)
    lam = np.asarray(problem.velocity, dtype=float)
    vol = lam[0] * (op.B[0] @ u) + lam[1] * (op.B[1] @ u)
    return op.solve_mass(vol - boundary_term_2d(op, flux, u))


# -- strong collocation -----------------------------------------------------


class BoundaryMode(enum.Enum):
    NONE = "none"
    INJECT_INFLOW = "inflow"
    INJECT_PERIODIC = "periodic"


@dataclass(frozen=True, eq=False)
class StrongOperator:
    space: RbfSpace
    D: tuple  # differentiation matrix per axis
    boundary_mode: BoundaryMode = BoundaryMode.NONE

    @property
    def dim(self) -> int:
        return self.space.dim


def build_strong_operator(space: RbfSpace, boundary_mode=BoundaryMode.NONE) -> StrongOperator:
    x = space.centers
    D = tuple(space.cardinal_derivative_matrix(x, axis) for axis in range(space.dim))
    return StrongOperator(space, D, BoundaryMode(boundary_mode))


def strong_collocation_rhs(op: StrongOperator, problem, t, u):
    """``-D f(u)`` at the centers."""
    u = _check_state(u)
    f = np.asarray(problem.flux(u))
    if op.dim == 1:
        return -(op.D[0] @ f)
    return -(op.D[0] @ f[:, 0] + op.D[1] @ f[:, 1])


def strong_boundary_hook(op: StrongOperator, problem):
    """Stage hook ``(t, u) -> u`` imposing boundary values strongly, or None."""
    mode = op.boundary_mode
    if mode is BoundaryMode.NONE:
        return None
    space = op.space
    x = space.centers
    if mode is BoundaryMode.INJECT_INFLOW:
        if problem.periodic or space.dim != 1:
            raise ValueError("inflow injection needs a 1D problem with inflow data")
        bc = problem.boundary
        if bc.g_left is not None:
            idx, g = 0, bc.g_left
        elif bc.g_right is not None:
            idx, g = len(x) - 1, bc.g_right
        else:
            return None

        def inject(t, u):
            u = u.copy()
            u[idx] = g(t)
            return u

        return inject

    lo = np.asarray(space.domain.lower)
    widths = space.domain.widths
    if space.dim == 1:
        targets = np.array([0])
        wrapped = np.array([[space.domain.upper[0]]])
    else:
        targets = np.flatnonzero(np.abs(x[:, 0] - lo[0]) <= 1e-12)
        wrapped = x[targets] + np.array([widths[0], 0.0])
    if len(targets) == 0:
        return None
    rows = space.cardinal_matrix(wrapped)

    def inject_periodic(t, u):
        u = u.copy()
        u[targets] = rows @ u
        return u

    return inject_periodic
