"""Explicit Runge-Kutta steppers and the fixed-step trajectory driver."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from weakrbf.errors import BlowUpError, StateError


class Scheme(enum.Enum):
    SSPRK33 = "ssprk33"
    EXPLICIT_EULER = "euler"


@dataclass(frozen=True)
class TimeStepConfig:
    t_end: float
    C: float = 0.1
    scheme: Scheme = Scheme.SSPRK33
    snapshot_times: tuple = field(default=())

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("CFL constant must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        snaps = tuple(sorted(float(s) for s in self.snapshot_times if 0 <= s <= self.t_end))
        object.__setattr__(self, "snapshot_times", snaps)


def cfl_timestep(C: float, domain_measure: float, N: int, max_wave_speed: float) -> float:
    """``C |Omega| / (N max|f'(u)|)``."""
    if max_wave_speed == 0:
        raise ZeroDivisionError("zero wave speed gives an unbounded time step; cap by t_end")
    if C <= 0 or domain_measure <= 0 or N <= 0 or max_wave_speed < 0:
        raise ValueError("CFL inputs must be positive")
    return C * domain_measure / (N * max_wave_speed)


def _checked(v, t, stage, last):
    if not np.all(np.isfinite(v)):
        raise BlowUpError(f"non-finite state at t={t:.6g}, stage {stage}", t, stage, last)
    return v


def ssprk33_step(rhs: Callable, t: float, u, dt: float, post_stage: Callable | None = None):
    """Three-stage third-order SSP Runge-Kutta step in Shu-Osher form.

    ``post_stage(t, v)`` may overwrite stage values (strong boundary data).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    hook = post_stage or (lambda _t, v: v)
    u1 = _checked(u + dt * rhs(t, u), t, 1, u)
    u1 = hook(t + dt, u1)
    u2 = _checked(0.75 * u + 0.25 * (u1 + dt * rhs(t + dt, u1)), t, 2, u)
    u2 = hook(t + 0.5 * dt, u2)
    u3 = _checked(u / 3.0 + 2.0 / 3.0 * (u2 + dt * rhs(t + 0.5 * dt, u2)), t, 3, u)
    return hook(t + dt, u3)


def euler_step(rhs: Callable, t: float, u, dt: float, post_stage: Callable | None = None):
    if not dt > 0:
        raise ValueError("dt must be positive")
    v = _checked(u + dt * rhs(t, u), t, 1, u)
    return v if post_stage is None else post_stage(t + dt, v)


_STEPPERS = {Scheme.SSPRK33: ssprk33_step, Scheme.EXPLICIT_EULER: euler_step}


def integrate_to(
    rhs: Callable,
    u0,
    config: TimeStepConfig,
    dt: float,
    on_step: Callable | None = None,
    post_stage: Callable | None = None,
):
    """March ``u0`` to ``config.t_end`` with fixed steps.

    Steps are shortened to land exactly on snapshot times and on ``t_end``.
    ``on_step(t, u)`` runs after every accepted step. A non-finite stage or an
    invalid state raises :class:`BlowUpError` carrying the last finite state.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    step = _STEPPERS[config.scheme]
    u = np.array(u0, dtype=float, copy=True)
    t = 0.0
    targets = [s for s in config.snapshot_times if s > 0] + [config.t_end]
    slack = 1e-9 * dt
    with np.errstate(over="ignore", invalid="ignore"):
        for target in targets:
            while target - t > slack:
                h = dt if target - t > dt + slack else target - t
                try:
                    u_new = step(rhs, t, u, h, post_stage)
                except StateError as exc:
                    raise BlowUpError(f"invalid state near t={t:.6g}: {exc}", t, 0, u) from exc
                except BlowUpError as exc:
                    exc.last_state = u
                    raise
                u = u_new
                t = target if target - (t + h) <= slack else t + h
                if on_step is not None:
                    on_step(t, u)
    return u


def steps_needed(t_end: float, dt: float) -> int:
    return 0 if t_end <= 0 else math.ceil(t_end / dt - 1e-9)
