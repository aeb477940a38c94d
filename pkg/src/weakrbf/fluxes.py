"""Numerical flux functions for weak boundary coupling.

Each flux is a two-point function ``fnum(a, b)`` where ``a`` is the state on
the left of the interface and ``b`` the state on the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from weakrbf.errors import StateError

GODUNOV_SAMPLES = 1024
BISECTION_TOL = 1e-12


def upwind_flux(lam: float, a, b):
    """``lam * a`` for ``lam >= 0``, else ``lam * b``."""
    return lam * a if lam >= 0 else lam * b


def central_flux(f: Callable, a, b):
    return 0.5 * (f(a) + f(b))


def _finite(f, u):
    v = np.asarray(f(u), dtype=float)
    if not np.all(np.isfinite(v)):
        raise StateError(f"flux is not finite on [{np.min(u)}, {np.max(u)}]")
    return v


def _slope(f, u, h):
    return (np.asarray(f(u + h)) - np.asarray(f(u - h))) / (2 * h)


def _critical_points(f, lo: float, hi: float) -> list[float]:
    """Interior zeros of a centered-difference slope of ``f`` on [lo, hi]."""
    grid = np.linspace(lo, hi, GODUNOV_SAMPLES)
    h = max(1e-7 * max(abs(lo), abs(hi), 1.0), 1e-3 * (hi - lo) / GODUNOV_SAMPLES)
    s = _slope(f, grid, h)
    found = []
    for i in np.flatnonzero(np.sign(s[:-1]) * np.sign(s[1:]) < 0):
        x0, x1 = grid[i], grid[i + 1]
        s0 = s[i]
        while x1 - x0 > BISECTION_TOL:
            mid = 0.5 * (x0 + x1)
            sm = _slope(f, mid, h)
            if np.sign(sm) == np.sign(s0) and sm != 0:
                x0, s0 = mid, sm
            else:
                x1 = mid
        found.append(0.5 * (x0 + x1))
    return found


def godunov_flux(f: Callable, a: float, b: float) -> float:
    """Minimum of ``f`` over [a, b] when ``a <= b``, maximum over [b, a] otherwise.

    The extremum is taken over the endpoints, a dense sample of the interval,
    and the interior critical points refined by bisection.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return float(_finite(f, a))
    lo, hi = min(a, b), max(a, b)
    cand = np.concatenate([[lo, hi], np.linspace(lo, hi, GODUNOV_SAMPLES), _critical_points(f, lo, hi)])
    vals = _finite(f, cand)
    return float(vals.min() if a <= b else vals.max())


def rusanov_flux(F: Callable, s: Callable, UL, UR):
    """Local Lax-Friedrichs flux with speed ``max(s(UL), s(UR))``."""
    UL = np.asarray(UL, dtype=float)
    UR = np.asarray(UR, dtype=float)
    if UL.shape != UR.shape:
        raise ValueError("states differ in shape")
    smax = max(float(s(UL)), float(s(UR)))
    if not np.isfinite(smax) or smax < 0:
        raise StateError(f"invalid wave speed {smax}")
    return 0.5 * (np.asarray(F(UL)) + np.asarray(F(UR))) - 0.5 * smax * (UR - UL)


# -- flux objects used by the semidiscretizations ---------------------------


@dataclass(frozen=True)
class Upwind:
    lam: float
    name: str = "upwind"

    def __call__(self, a, b):
        return upwind_flux(self.lam, a, b)


@dataclass(frozen=True)
class Godunov:
    f: Callable
    name: str = "godunov"

    def __call__(self, a, b):
        return godunov_flux(self.f, a, b)


@dataclass(frozen=True)
class Central:
    f: Callable
    name: str = "central"

    def __call__(self, a, b):
        return central_flux(self.f, a, b)


@dataclass(frozen=True)
class Rusanov:
    F: Callable
    wavespeed: Callable
    name: str = "rusanov"

    def __call__(self, a, b):
        return rusanov_flux(self.F, self.wavespeed, a, b)


FLUX_NAMES = ("upwind", "godunov", "central", "rusanov")


def make_flux(name: str, problem):
    """Instantiate a named numerical flux for ``problem``."""
    name = name.strip().lower()
    if name == "upwind":
        if problem.velocity is None or np.ndim(problem.velocity) != 0:
            raise ValueError("upwind flux needs a scalar linear advection problem")
        return Upwind(float(problem.velocity))
    if name == "godunov":
        if problem.n_components != 1:
            raise ValueError("Godunov flux is only defined for scalar problems")
        return Godunov(problem.flux)
    if name == "central":
        return Central(problem.flux)
    if name == "rusanov":
        return Rusanov(problem.flux, problem.wavespeed)
    raise ValueError(f"unknown flux {name!r}; choose from {', '.join(FLUX_NAMES)}")


@dataclass(frozen=True)
class NormalUpwind:
    """Upwind pairing along a boundary normal for ``F(u) = velocity u``."""

    velocity: tuple
    name: str = "upwind"

    def normal_flux(self, normal, a, b):
        return upwind_flux(float(np.dot(self.velocity, normal)), a, b)


@dataclass(frozen=True)
class NormalCentral:
    velocity: tuple
    name: str = "central"

    def normal_flux(self, normal, a, b):
        return float(np.dot(self.velocity, normal)) * 0.5 * (np.asarray(a) + np.asarray(b))


def make_flux_2d(name: str, problem):
    name = name.strip().lower()
    if problem.velocity is None or np.ndim(problem.velocity) != 1:
        raise ValueError("2D fluxes need a linear advection problem with a velocity vector")
    v = tuple(float(c) for c in problem.velocity)
    if name == "upwind":
        return NormalUpwind(v)
    if name == "central":
        return NormalCentral(v)
    raise ValueError(f"flux {name!r} is not available in 2D; use upwind or central")
