"""Test problems: fluxes, initial and boundary data, exact solutions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from weakrbf.errors import OracleError, StateError
from weakrbf.rbf_space import Domain

SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class Periodic:
    kind: str = "periodic"


@dataclass(frozen=True)
class Inflow:
    """Boundary data; ``None`` on a side means outflow (no data given)."""

    g_left: Callable | None = None
    g_right: Callable | None = None
    kind: str = "inflow"


@dataclass(frozen=True, eq=False)
class Problem:
    name: str
    domain: Domain
    flux: Callable
    wavespeed: Callable
    initial_condition: Callable
    boundary: Periodic | Inflow
    exact_solution: Callable | None = None
    velocity: float | np.ndarray | None = None
    n_components: int = 1
    flux_prime: Callable | None = field(default=None, repr=False)

    @property
    def is_linear(self) -> bool:
        return self.velocity is not None

    @property
    def periodic(self) -> bool:
        return isinstance(self.boundary, Periodic)

    def max_wave_speed(self, N: int) -> float:
        """Largest characteristic speed over the initial data.

        Scalar problems scan ``|f'(u)|`` for u between the min and max of the
        initial condition; systems take ``wavespeed`` on a 10N-point sample.
        """
        if self.velocity is not None:
            return float(np.max(np.abs(self.velocity)))
        x = sample_grid(self.domain, 10 * N)
        u0 = np.asarray(self.initial_condition(x))
        if self.n_components == 1 and self.flux_prime is not None:
            us = np.linspace(u0.min(), u0.max(), 10 * N)
            return float(np.max(np.abs(self.flux_prime(us))))
        return float(np.max(self.wavespeed(u0)))


def sample_grid(domain: Domain, n: int):
    if domain.dim == 1:
        return np.linspace(domain.lower[0], domain.upper[0], n)
    m = max(2, int(np.ceil(np.sqrt(n))))
    xs = [np.linspace(lo, hi, m) for lo, hi in zip(domain.lower, domain.upper)]
    X, Y = np.meshgrid(*xs, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


# -- linear advection --------------------------------------------------------


class InitialCondition(enum.Enum):
    GAUSSIAN20 = "gauss"
    COS_SQ_4PI = "cos2"
    TWO_D_SINE = "2d"


def _gaussian20(x):
    return np.exp(-20.0 * np.asarray(x) ** 2)


def _cos_sq_4pi(x):
    return np.cos(4.0 * np.pi * np.asarray(x)) ** 2


def _two_d_sine(p):
    p = np.atleast_2d(p)
    x, y = p[:, 0], p[:, 1]
    return np.sin(2 * np.pi * x) * (0.5 * np.sin(2 * np.pi * y) - 1.0)


def _wrap(x, a, length):
    return a + np.mod(np.asarray(x) - a, length)


def linear_advection_problem(
    lam=1.0,
    ic_kind: InitialCondition | str = InitialCondition.GAUSSIAN20,
    bc: str = "periodic",
    domain: Domain | None = None,
) -> Problem:
    """``u_t + lam . grad u = 0`` on [-1, 1] or [-1, 1]^2.

    The exact solution is the initial condition transported by ``lam t`` with
    periodic wrapping; inflow data sample it at the inflow boundary, so both
    boundary treatments share one exact solution.
    """
    ic_kind = InitialCondition(ic_kind)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    dim = 2 if ic_kind is InitialCondition.TWO_D_SINE else 1
    if lam_arr.size != dim:
        raise ValueError(f"{ic_kind.value} initial condition needs a {dim}D velocity")
    if domain is None:
        domain = Domain.interval(-1.0, 1.0) if dim == 1 else Domain.rectangle(-1.0, 1.0)
    if domain.dim != dim:
        raise ValueError(f"{ic_kind.value} initial condition needs a {dim}D domain")

    u0 = {
        InitialCondition.GAUSSIAN20: _gaussian20,
        InitialCondition.COS_SQ_4PI: _cos_sq_4pi,
        InitialCondition.TWO_D_SINE: _two_d_sine,
    }[ic_kind]
    lo = np.asarray(domain.lower)
    widths = domain.widths

    if dim == 1:
        v = float(lam_arr[0])
        a, b, L = lo[0], domain.upper[0], widths[0]

        def exact(t, x):
            return u0(_wrap(np.asarray(x, dtype=float) - v * t, a, L))

        velocity = v
        speed = abs(v)
    else:
        v = lam_arr

        def exact(t, p):
            p = np.atleast_2d(np.asarray(p, dtype=float))
            return u0(_wrap(p - v * t, lo, widths))

        velocity = v
        speed = float(np.max(np.abs(v)))

    if bc == "periodic":
        boundary = Periodic()
    elif bc == "inflow":
        if dim != 1:
            raise ValueError("inflow boundary data are only provided in 1D")
        if v > 0:
            boundary = Inflow(g_left=lambda t: float(u0(b - np.mod(v * t, L))))
        elif v < 0:
            boundary = Inflow(g_right=lambda t: float(u0(a + np.mod(-v * t, L))))
        else:
            boundary = Inflow()
    else:
        raise ValueError(f"unknown boundary condition {bc!r}")

    if dim == 1:
        def flux(u):
            return velocity * np.asarray(u)
    else:
        def flux(u):
            return np.multiply.outer(np.asarray(u), velocity)

    return Problem(
        name=f"advect-{ic_kind.value}",
        domain=domain,
        flux=flux,
        wavespeed=lambda u: speed * np.ones(np.shape(u)) if np.ndim(u) else speed,
        initial_condition=lambda x: u0(x),
        boundary=boundary,
        exact_solution=exact,
        velocity=velocity,
        flux_prime=lambda u: np.full(np.shape(u), speed),
    )


# -- Euler equations ---------------------------------------------------------

GAMMA = 3.0


@dataclass(frozen=True)
class EulerState:
    rho: float
    momentum: float
    total_energy: float
    gamma: float = GAMMA

    def __post_init__(self):
        _euler_pressure(self.conserved, self.gamma)

    @classmethod
    def from_primitive(cls, rho, u, p, gamma=GAMMA) -> EulerState:
        return cls(rho, rho * u, p / (gamma - 1.0) + 0.5 * rho * u * u, gamma)

    @property
    def conserved(self) -> np.ndarray:
        return np.array([self.rho, self.momentum, self.total_energy], dtype=float)

    @property
    def velocity(self) -> float:
        return self.momentum / self.rho

    @property
    def pressure(self) -> float:
        return float(_euler_pressure(self.conserved, self.gamma))


def _as_conserved(U, gamma):
    if isinstance(U, EulerState):
        return U.conserved, U.gamma
    U = np.asarray(U, dtype=float)
    if U.shape[-1] != 3:
        raise ValueError("Euler states have three components")
    return U, gamma


def _euler_pressure(U, gamma):
    rho, m, E = U[..., 0], U[..., 1], U[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        p = (gamma - 1.0) * (E - 0.5 * m * m / rho)
    if not (np.all(np.isfinite(p)) and np.all(rho > 0) and np.all(p > 0)):
        raise StateError("Euler state with nonpositive density or pressure")
    return p


def euler_primitive(U, gamma=GAMMA):
    """``(rho, u, p)`` from conserved variables."""
    U, gamma = _as_conserved(U, gamma)
    p = _euler_pressure(U, gamma)
    return U[..., 0], U[..., 1] / U[..., 0], p


def euler_conserved(rho, u, p, gamma=GAMMA):
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.stack([rho, rho * u, p / (gamma - 1.0) + 0.5 * rho * u * u], axis=-1)


def euler_flux(U, gamma=GAMMA):
    """``(rho u, rho u^2 + p, u (E + p))``."""
    U, gamma = _as_conserved(U, gamma)
    rho, u, p = euler_primitive(U, gamma)
    return np.stack([rho * u, rho * u * u + p, u * (U[..., 2] + p)], axis=-1)


def euler_wavespeed(U, gamma=GAMMA):
    """``|u| + sqrt(gamma p / rho)``."""
    U, gamma = _as_conserved(U, gamma)
    rho, u, p = euler_primitive(U, gamma)
    return np.abs(u) + np.sqrt(gamma * p / rho)


def _rho0(x):
    return 1.0 + 0.5 * np.sin(np.pi * x)


def _drho0(x):
    return 0.5 * np.pi * np.cos(np.pi * x)


def _solve_foot(x, t, sign, tol, max_iter=100):
    """Solve ``x + sign sqrt3 rho0(y) t - y = 0`` for y, elementwise."""

    def g(y):
        return x + sign * SQRT3 * _rho0(y) * t - y

    y = x.copy()
    res = g(y)
    growth = np.zeros_like(y, dtype=int)
    for _ in range(max_iter):
        active = np.abs(res) > tol
        if not np.any(active):
            return y, res
        dg = sign * SQRT3 * _drho0(y) * t - 1.0
        y_new = np.where(active, y - res / dg, y)
        res_new = g(y_new)
        growth = np.where(np.abs(res_new) > np.abs(res), growth + 1, 0)
        y, res = y_new, res_new
        if np.any(growth >= 5):
            break

    # bisection fallback on a bracket that must contain the foot point
    bad = np.abs(res) > tol
    if np.any(bad):
        width = SQRT3 * t * 1.5 + 1e-14
        lo = x[bad] - width
        hi = x[bad] + width
        glo = x[bad] + sign * SQRT3 * _rho0(lo) * t - lo
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            gm = x[bad] + sign * SQRT3 * _rho0(mid) * t - mid
            left = np.sign(gm) == np.sign(glo)
            lo = np.where(left, mid, lo)
            glo = np.where(left, gm, glo)
            hi = np.where(left, hi, mid)
        y[bad] = 0.5 * (lo + hi)
        res = g(y)
    if np.any(np.abs(res) > tol):
        raise OracleError(
            f"characteristic solve did not converge (residual {np.max(np.abs(res)):.3e});"
            " t may exceed the smooth-flow time"
        )
    return y, res


def euler_characteristic_feet(t, x, tol=1e-13):
    """Foot points ``x1, x2`` and their residuals for the smooth isentropic flow."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if t == 0:
        z = np.zeros_like(x)
        return x.copy(), x.copy(), z, z
    x1, r1 = _solve_foot(x, t, +1.0, tol)
    x2, r2 = _solve_foot(x, t, -1.0, tol)
    return x1, x2, r1, r2


def euler_exact(t, x, tol=1e-13):
    """Exact ``(rho, u, p)`` for the gamma = 3 smooth flow via characteristics."""
    x1, x2, _, _ = euler_characteristic_feet(t, x, tol)
    r1, r2 = _rho0(x1), _rho0(x2)
    rho = 0.5 * (r1 + r2)
    u = SQRT3 * (rho - r1)
    return rho, u, rho**GAMMA


def euler_smooth_problem() -> Problem:
    domain = Domain.interval(-1.0, 1.0)

    def ic(x):
        rho = _rho0(np.asarray(x, dtype=float))
        return euler_conserved(rho, np.zeros_like(rho), rho**GAMMA)

    def exact(t, x):
        return euler_conserved(*euler_exact(t, x))

    return Problem(
        name="euler-smooth",
        domain=domain,
        flux=euler_flux,
        wavespeed=euler_wavespeed,
        initial_condition=ic,
        boundary=Periodic(),
        exact_solution=exact,
        n_components=3,
    )


PROBLEM_NAMES = ("advect-gauss", "advect-cos2", "euler-smooth", "advect-2d")


def make_problem(name: str, bc: str = "periodic") -> Problem:
    name = name.strip().lower()
    if name == "advect-gauss":
        return linear_advection_problem(1.0, InitialCondition.GAUSSIAN20, bc)
    if name == "advect-cos2":
        return linear_advection_problem(1.0, InitialCondition.COS_SQ_4PI, bc)
    if name == "advect-2d":
        if bc != "periodic":
            raise ValueError("advect-2d supports periodic boundaries only")
        return linear_advection_problem((1.0, 0.0), InitialCondition.TWO_D_SINE, bc)
    if name == "euler-smooth":
        if bc != "periodic":
            raise ValueError("euler-smooth supports periodic boundaries only")
        return euler_smooth_problem()
    raise ValueError(f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES)}")
