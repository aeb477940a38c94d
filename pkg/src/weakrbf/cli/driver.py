"""Run orchestration and CSV emission."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from weakrbf.cli.config import RunConfig
from weakrbf.diagnostics import (
    RunRecord,
    convergence_order,
    energy,
    error_norms,
    momentum,
    pairwise_orders,
)
from weakrbf.errors import BlowUpError, ConfigError
from weakrbf.fluxes import make_flux, make_flux_2d
from weakrbf.kernels import parse_kernel
from weakrbf.problems import Problem, sample_grid, euler_primitive, make_problem
from weakrbf.quadrature import parse_rule
from weakrbf.rbf_space import (
    NodeSet,
    build_space,
    equidistant_nodes,
    load_nodes,
    random_nodes,
)
from weakrbf.semidiscretization import (
    BoundaryMode,
    assemble_weak_operator,
    build_strong_operator,
    strong_boundary_hook,
    strong_collocation_rhs,
    weak_analytical_rhs,
    weak_collocation_rhs,
    weak_collocation_rhs_2d,
)
from weakrbf.time_integration import TimeStepConfig, cfl_timestep, integrate_to

logger = logging.getLogger(__name__)

FMT = "%.17g"


def make_nodes(spec: str, domain, N: int) -> NodeSet:
    kind, _, arg = spec.partition(":")
    if kind == "equidistant":
        return equidistant_nodes(domain, N)
    if kind == "random":
        return random_nodes(domain, N, int(arg or 0))
    if kind == "file":
        return load_nodes(arg, domain)
    raise ConfigError(f"unknown node spec {spec!r}")


def _quadrature_spec(cfg: RunConfig, dim: int) -> str:
    if cfg.quadrature != "default":
        return cfg.quadrature
    return "reference" if dim == 1 else "trapezoid:200"


def _flux_name(cfg: RunConfig, problem) -> str:
    if cfg.flux != "auto":
        return cfg.flux
    return "upwind" if problem.is_linear else "rusanov"


def _boundary_mode(cfg: RunConfig, problem) -> BoundaryMode:
    if cfg.boundary_mode != "auto":
        return BoundaryMode(cfg.boundary_mode)
    return BoundaryMode.NONE if problem.periodic else BoundaryMode.INJECT_INFLOW


@dataclass
class Setup:
    config: RunConfig
    problem: object
    space: object
    op: object  # weak operator; also used for diagnostics of strong runs
    rhs: object
    post_stage: object
    dt: float
    u0: np.ndarray
    flux_name: str


def setup(cfg: RunConfig, problem: Problem | None = None) -> Setup:
    """Build problem, space, operators and the time-step size.

    ``problem`` replaces the named problem of ``cfg`` (manufactured cases).
    """
    if problem is None:
        try:
            problem = make_problem(cfg.problem, cfg.bc)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        kernel = parse_kernel(cfg.kernel, cfg.eps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        nodes = make_nodes(cfg.nodes, problem.domain, cfg.N)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"bad node spec {cfg.nodes!r}: {exc}") from exc
    space = build_space(kernel, nodes, cfg.P)
    try:
        rule = parse_rule(_quadrature_spec(cfg, space.dim), problem.domain, space.centers, space.N)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    op = assemble_weak_operator(space, rule)
    u0 = np.asarray(problem.initial_condition(nodes.points[:, 0] if space.dim == 1 else nodes.points))

    flux_name = _flux_name(cfg, problem)
    post_stage = None
    if cfg.method == "strong":
        sop = build_strong_operator(space, _boundary_mode(cfg, problem))
        try:
            post_stage = strong_boundary_hook(sop, problem)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

        def rhs(t, u):
            return strong_collocation_rhs(sop, problem, t, u)

        flux_name = "none"
    elif space.dim == 2:
        if cfg.method != "weak-collocation":
            raise ConfigError("2D runs support the strong and weak-collocation methods")
        flux = make_flux_2d(flux_name, problem)

        def rhs(t, u):
            return weak_collocation_rhs_2d(op, flux, problem, t, u)

    else:
        try:
            flux = make_flux(flux_name, problem)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        form = weak_collocation_rhs if cfg.method == "weak-collocation" else weak_analytical_rhs
        if form is weak_analytical_rhs and problem.n_components != 1:
            raise ConfigError("the analytical weak method is for scalar problems")

        def rhs(t, u):
            return form(op, flux, problem, t, u)

    speed = problem.max_wave_speed(space.N)
    if speed == 0:
        # nothing moves; one step covers the run
        dt = cfg.tend if cfg.tend > 0 else 1.0
    else:
        dt = cfl_timestep(cfg.cfl, problem.domain.measure, space.N, speed)
    return Setup(cfg, problem, space, op, rhs, post_stage, dt, u0, flux_name)


@dataclass
class SimulationResult:
    setup: Setup
    record: RunRecord
    final_state: np.ndarray
    final_time: float
    blowup: bool = False
    blowup_time: float | None = None
    summary: dict = field(default_factory=dict)


def _points(space):
    pts = space.centers
    return pts[:, 0] if space.dim == 1 else pts


def simulate(cfg: RunConfig, problem: Problem | None = None) -> SimulationResult:
    """Integrate one configuration in memory and collect the observables."""
    s = setup(cfg, problem)
    rec = RunRecord()
    snaps = set(cfg.snapshots)
    rec.record(0.0, momentum(s.op, s.u0), energy(s.op, s.u0))
    if 0.0 in snaps:
        rec.snapshots.append((0.0, s.u0.copy()))
    last = {"t": 0.0, "u": s.u0}

    def on_step(t, u):
        with np.errstate(over="ignore", invalid="ignore"):
            mom, en = momentum(s.op, u), energy(s.op, u)
        if not (np.isfinite(en) and np.all(np.isfinite(mom))):
            raise BlowUpError(f"observables overflow at t={t:.6g}", t, 0, last["u"])
        rec.record(t, mom, en)
        last["t"], last["u"] = t, u
        if t in snaps:
            rec.snapshots.append((t, u.copy()))

    tcfg = TimeStepConfig(cfg.tend, cfg.cfl, cfg.scheme, cfg.snapshots)
    blowup, t_blow = False, None
    try:
        u = integrate_to(s.rhs, s.u0, tcfg, s.dt, on_step, s.post_stage)
        t_final = cfg.tend
    except BlowUpError as exc:
        blowup, t_blow = True, exc.t
        u, t_final = last["u"], last["t"]
        logger.warning("run blew up at t=%.6g", exc.t)

    res = SimulationResult(s, rec, u, t_final, blowup, t_blow)
    if s.problem.exact_solution is not None and not blowup:
        exact = s.problem.exact_solution(t_final, _points(s.space))
        if s.problem.n_components == 3:
            rec.final_errors = error_norms(exact[:, 0], u[:, 0])
        else:
            rec.final_errors = error_norms(exact, u)
    res.summary = _summary(res)
    return res


def _summary(res: SimulationResult) -> dict:
    s = res.setup
    rec = res.record
    e = np.asarray(rec.energy_series)
    out = {
        "problem": s.config.problem,
        "method": s.config.method,
        "kernel": s.space.kernel.name,
        "eps": s.space.kernel.shape,
        "P": s.space.P,
        "N": s.space.N,
        "flux": s.flux_name,
        "quadrature": s.op.rule.name,
        "dt": s.dt,
        "steps": len(rec.times) - 1,
        "t_final": res.final_time,
        "condition_saddle": s.space.condition,
        "condition_mass": s.op.condition,
        "tau_q": s.op.tau_q,
        "energy_initial": float(e[0]),
        "energy_final": float(e[-1]),
        "energy_growth": bool(e[-1] > e[0]),
        "max_energy_increase": rec.max_energy_increase(),
        "max_momentum_drift": rec.max_momentum_drift(),
        "blowup": res.blowup,
        "blowup_time": res.blowup_time,
        "err_inf": None,
        "err_2": None,
    }
    if rec.final_errors is not None:
        out["err_inf"], out["err_2"] = rec.final_errors
    return out


# -- file output ------------------------------------------------------------


def _write_csv(path: Path, header: list[str], rows) -> None:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(FMT % v for v in row) + "\n")


def _state_columns(problem, u, prefix):
    if problem.n_components == 3:
        rho, vel, p = euler_primitive(u)
        return [f"rho_{prefix}", f"u_{prefix}", f"p_{prefix}"], [rho, vel, p]
    return [f"u_{prefix}"], [u]


def write_outputs(res: SimulationResult, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    s = res.setup
    space, problem = s.space, s.problem
    pts = space.centers
    coord_names = ["x"] if space.dim == 1 else ["x", "y"]
    t = res.final_time

    def table(points, u):
        names, cols = _state_columns(problem, u, "numeric")
        if problem.exact_solution is not None:
            ex = problem.exact_solution(t, points[:, 0] if space.dim == 1 else points)
            en, ec = _state_columns(problem, ex, "exact")
            names, cols = names + en, cols + ec
        return coord_names + names, np.column_stack([points] + cols)

    header, rows = table(pts, res.final_state)
    _write_csv(out / "solution.csv", header, rows)

    dense = sample_grid(problem.domain, 10 * space.N)
    dense = dense[:, None] if dense.ndim == 1 else dense
    trace = space.cardinal_matrix(dense) @ res.final_state
    header, rows = table(dense, trace)
    _write_csv(out / "trace.csv", header, rows)

    rec = res.record
    mom = np.asarray(rec.momentum_series, dtype=float)
    if mom.ndim == 1:
        _write_csv(out / "series.csv", ["t", "momentum", "energy"],
                   np.column_stack([rec.times, mom, rec.energy_series]))
    else:
        names = [f"momentum_{k}" for k in range(mom.shape[1])]
        _write_csv(out / "series.csv", ["t"] + names + ["energy"],
                   np.column_stack([rec.times, mom, rec.energy_series]))

    if rec.snapshots:
        rows = []
        for ts, u in rec.snapshots:
            u2 = u if u.ndim == 2 else u[:, None]
            rows.append(np.column_stack([np.full(len(pts), ts), pts, u2]))
        ncomp = 1 if rec.snapshots[0][1].ndim == 1 else rec.snapshots[0][1].shape[1]
        names = ["u"] if ncomp == 1 else [f"u_{k}" for k in range(ncomp)]
        _write_csv(out / "snapshots.csv", ["t"] + coord_names + names, np.vstack(rows))

    summary = dict(res.summary)
    summary["config"] = asdict(s.config)
    summary = {k: None if isinstance(v, float) and not np.isfinite(v) else v for k, v in summary.items()}
    text = json.dumps(summary, indent=2, sort_keys=True, default=list, allow_nan=False)
    (out / "summary.json").write_text(text + "\n")
    return out


def run(cfg: RunConfig, problem: Problem | None = None) -> SimulationResult:
    """Simulate and write solution.csv, trace.csv, series.csv, summary.json."""
    res = simulate(cfg, problem)
    write_outputs(res, cfg.out)
    return res


def _fmt(v) -> str:
    return "" if v is None else FMT % v


def convergence_study(cfg: RunConfig, Ns=None, write: bool = True, problem: Problem | None = None) -> dict:
    """Run every N and tabulate nodal errors and observed orders."""
    Ns = list(Ns or cfg.Ns)
    if len(Ns) < 2:
        raise ConfigError("a convergence study needs at least two N values")
    errs = []
    results = []
    for N in Ns:
        sub = RunConfig(**{**asdict(cfg), "N": N, "out": str(Path(cfg.out) / f"N{N}")}).validate()
        res = run(sub, problem) if write else simulate(sub, problem)
        if res.record.final_errors is None:
            raise ConfigError(f"no error available for N={N} (blow-up or no exact solution)")
        errs.append(res.record.final_errors)
        results.append(res)
    e_inf = [e[0] for e in errs]
    e_2 = [e[1] for e in errs]
    table = {"N": Ns, "err_inf": e_inf, "err_2": e_2}
    for key, e in (("inf", e_inf), ("2", e_2)):
        # orders are undefined once an error is exactly zero
        exact = min(e) <= 0
        table[f"order_{key}"] = [None] * len(Ns) if exact else [None] + pairwise_orders(Ns, e)
        table[f"lsq_order_{key}"] = None if exact else convergence_order(Ns, e)
    if write:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "convergence.csv", "w") as fh:
            fh.write("N,err_inf,err_2,order_inf,order_2\n")
            for i, N in enumerate(Ns):
                oi, o2 = _fmt(table["order_inf"][i]), _fmt(table["order_2"][i])
                fh.write(f"{N},{FMT % e_inf[i]},{FMT % e_2[i]},{oi},{o2}\n")
            fh.write(f"lsq,,,{_fmt(table['lsq_order_inf'])},{_fmt(table['lsq_order_2'])}\n")
    return table
