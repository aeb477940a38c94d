import numpy as np
import pytest

from support import jittered_nodes, trapezoid
from weakrbf.diagnostics import (
    RunRecord,
    convergence_order,
    energy,
    error_norms,
    identity_residuals,
    momentum,
    pairwise_orders,
)
from weakrbf.fluxes import Upwind
from weakrbf.kernels import cubic, quintic
from weakrbf.problems import euler_smooth_problem, linear_advection_problem
from weakrbf.quadrature import reference_rule
from weakrbf.rbf_space import Domain, build_space, equidistant_nodes
from weakrbf.semidiscretization import assemble_weak_operator

I1 = Domain.interval(-1.0, 1.0)


def ref_op(kernel, nodes, P=1):
    space = build_space(kernel, nodes, P)
    return assemble_weak_operator(space, reference_rule(-1, 1, space.centers[:, 0]))


@pytest.fixture(scope="module")
def op40():
    return ref_op(cubic(), equidistant_nodes(I1, 40))


def test_momentum_examples(op40):
    assert momentum(op40, np.ones(40)) == pytest.approx(2.0, abs=1e-10)
    assert momentum(op40, np.zeros(40)) == 0.0


def test_momentum_matches_dense_trapezoid(op40):
    x0 = op40.space.centers[:, 0]
    u = np.exp(-20 * x0**2)
    x, w = trapezoid(-1, 1, 1_000_001)
    uN = op40.space.fit(u).evaluate(x)
    assert momentum(op40, u) == pytest.approx(w @ uN, abs=1e-8)


def test_energy_examples(op40):
    assert energy(op40, np.ones(40)) == pytest.approx(2.0, abs=1e-9)
    assert energy(op40, np.zeros(40)) == 0.0


def test_energy_matches_dense_quadrature():
    nodes = jittered_nodes(15, seed=3)
    op = ref_op(quintic(), nodes, P=2)
    u = np.cos(2 * nodes.points[:, 0]) + np.random.default_rng(2).uniform(-0.1, 0.1, 15)
    x, w = trapezoid(-1, 1, 400_001)
    uN = op.space.fit(u).evaluate(x)
    assert energy(op, u) == pytest.approx(w @ uN**2, abs=1e-7)


def test_system_observables_per_component(op40):
    x0 = op40.space.centers[:, 0]
    U = euler_smooth_problem().initial_condition(x0)
    m = momentum(op40, U)
    assert m.shape == (3,)
    assert m[0] == pytest.approx(2.0, abs=1e-8)
    assert energy(op40, U) == pytest.approx(sum(energy(op40, U[:, k]) for k in range(3)))


def test_error_norm_examples():
    assert error_norms([1, 2, 3], [1, 2, 3]) == (0.0, 0.0)
    assert error_norms([3, 4], [0, 0]) == pytest.approx((4.0, 5.0))
    c, N = -0.3, 17
    assert error_norms(np.full(N, c), np.zeros(N)) == pytest.approx((abs(c), abs(c) * np.sqrt(N)))
    with pytest.raises(ValueError):
        error_norms([1, 2], [1, 2, 3])


def test_convergence_order_examples():
    assert convergence_order([10, 20], [1, 0.25]) == pytest.approx(2.0)
    assert convergence_order([10, 20, 40], [0.3, 0.3, 0.3]) == pytest.approx(0.0, abs=1e-12)
    assert convergence_order([10, 20, 40], [1, 2**-2.5, 2**-5]) == pytest.approx(2.5)
    assert pairwise_orders([10, 20, 40], [1, 0.25, 0.125]) == pytest.approx([2.0, 1.0])
    with pytest.raises(ValueError):
        convergence_order([10], [1.0])
    with pytest.raises(ValueError):
        convergence_order([10, 20], [1.0, 0.0])


def test_identity_residuals(op40):
    rng = np.random.default_rng(1)
    prob = linear_advection_problem(1.0)
    for _ in range(10):
        u = rng.normal(size=40)
        cons, rate = identity_residuals(op40, Upwind(1.0), prob, 0.0, u)
        assert abs(cons) <= 1e-10 * max(1.0, np.max(np.abs(u)))
        assert abs(rate) <= 1e-8


def test_identity_residuals_nonlinear_rate_undefined(op40):
    prob = euler_smooth_problem()
    from weakrbf.fluxes import Rusanov

    U = prob.initial_condition(op40.space.centers[:, 0])
    res = identity_residuals(op40, Rusanov(prob.flux, prob.wavespeed), prob, 0.0, U)
    assert res.energy_rate is None


def test_run_record():
    rec = RunRecord()
    for t, m, e in [(0, 1.0, 3.0), (0.1, 1.0, 2.5), (0.2, 1.0 + 1e-12, 2.6), (0.3, 1.0, 2.0)]:
        rec.record(t, m, e)
    assert rec.max_energy_increase() == pytest.approx(0.1)
    assert rec.max_momentum_drift() == pytest.approx(1e-12)
    flat = RunRecord()
    flat.record(0, 0.0, 1.0)
    flat.record(1, 0.0, 0.5)
    assert flat.max_energy_increase() == 0.0
