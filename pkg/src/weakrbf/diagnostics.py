"""Observables: momentum, energy, error norms, convergence orders, and
residuals of the semidiscrete conservation and energy identities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from weakrbf.semidiscretization import WeakOperator, boundary_fluxes, weak_collocation_rhs


def momentum(op: WeakOperator, u):
    """``int u_N dV`` (per component for systems)."""
    return op.w @ np.asarray(u)


def energy(op: WeakOperator, u) -> float:
    """``||u_N||^2`` as ``u^T M u``; systems sum over components."""
    u = np.asarray(u)
    return float(np.sum(u * (op.M @ u)))


def error_norms(exact, numeric) -> tuple[float, float]:
    """Nodal max error and unnormalized Euclidean error."""
    exact = np.asarray(exact, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    if exact.shape != numeric.shape:
        raise ValueError(f"shape mismatch {exact.shape} vs {numeric.shape}")
    e = np.abs(exact - numeric)
    return float(e.max(initial=0.0)), float(np.sqrt(np.sum(e * e)))


def convergence_order(Ns, errors) -> float:
    """Least-squares slope of log(error) against log(1/N)."""
    Ns = np.asarray(Ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(Ns) < 2 or len(Ns) != len(errors):
        raise ValueError("need at least two (N, error) pairs")
    if np.any(errors <= 0):
        raise ValueError("errors must be positive")
    slope, _ = np.polyfit(np.log(1.0 / Ns), np.log(errors), 1)
    return float(slope)


def pairwise_orders(Ns, errors) -> list[float]:
    Ns = np.asarray(Ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return [float(np.log(errors[i - 1] / errors[i]) / np.log(Ns[i] / Ns[i - 1])) for i in range(1, len(Ns))]


@dataclass(frozen=True)
class IdentityResiduals:
    conservation: float
    energy_rate: float | None  # None where the identity is not defined

    def __iter__(self):
        yield self.conservation
        yield self.energy_rate


def identity_residuals(op: WeakOperator, flux, problem, t, u, rhs=weak_collocation_rhs):
    """Residuals of the discrete conservation and energy-rate identities.

    ``conservation = w^T du/dt + (fR - fL)``; for linear advection also
    ``energy_rate = 2 u^T M du/dt - [lam (uR^2 - uL^2) - 2 (fR uR - fL uL)]``.
    """
    u = np.asarray(u, dtype=float)
    du = rhs(op, flux, problem, t, u)
    fL, fR, uL, uR = boundary_fluxes(op, flux, problem, t, u)
    cons = np.asarray(op.w @ du + (fR - fL))
    # systems report the worst component
    cons = float(cons) if cons.ndim == 0 else float(np.max(np.abs(cons)))
    if not problem.is_linear or np.ndim(problem.velocity) != 0:
        return IdentityResiduals(cons, None)
    lam = float(problem.velocity)
    rate = 2.0 * u @ (op.M @ du)
    expected = lam * (uR**2 - uL**2) - 2.0 * (fR * uR - fL * uL)
    return IdentityResiduals(cons, float(rate - expected))


@dataclass
class RunRecord:
    times: list = field(default_factory=list)
    momentum_series: list = field(default_factory=list)
    energy_series: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final_errors: tuple | None = None

    def record(self, t, mom, en):
        self.times.append(float(t))
        self.momentum_series.append(mom)
        self.energy_series.append(float(en))

    def max_energy_increase(self) -> float:
        """Largest step-to-step energy increase (0 when nonincreasing)."""
        e = np.asarray(self.energy_series)
        return float(max(np.max(np.diff(e), initial=0.0), 0.0))

    def max_momentum_drift(self) -> float:
        m = np.asarray(self.momentum_series, dtype=float)
        return float(np.max(np.abs(m - m[0]))) if len(m) else 0.0
