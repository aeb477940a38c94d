import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import jittered_nodes
from weakrbf.errors import FactorizationError, InvalidNodesError, SingularPointError
from weakrbf.kernels import cubic, eval_kernel, gaussian, multiquadric, polyharmonic, quintic
from weakrbf.rbf_space import (
    Domain,
    NodeSet,
    build_space,
    equidistant_nodes,
    evaluate,
    evaluate_derivative,
    fit,
    load_nodes,
    poly_count,
    poly_exponents,
    random_nodes,
)

I1 = Domain.interval(-1.0, 1.0)
SQ = Domain.rectangle(-1.0, 1.0)


def test_saddle_matrix_two_nodes():
    s = build_space(cubic(), NodeSet([-1.0, 1.0], I1), 1)
    V = s.saddle
    assert V.shape == (3, 3)
    assert np.array_equal(V[:2, :2], [[0.0, 8.0], [8.0, 0.0]])
    assert np.array_equal(V[2], [1.0, 1.0, 0.0])
    assert np.array_equal(V[:, 2], [1.0, 1.0, 0.0])


def test_no_polynomial_block():
    s = build_space(gaussian(1.0), equidistant_nodes(I1, 4), 0)
    assert s.saddle.shape == (4, 4)
    assert np.array_equal(s.saddle, s.Phi)


def test_duplicate_nodes_rejected():
    with pytest.raises(InvalidNodesError):
        NodeSet([0.0, 0.0], I1)
    with pytest.raises(InvalidNodesError):
        NodeSet([[0.1, 0.2], [0.1, 0.2]], SQ)
    with pytest.raises(InvalidNodesError):
        NodeSet([0.0, 2.0], I1)


def test_too_few_nodes_for_polynomials():
    with pytest.raises(InvalidNodesError):
        build_space(cubic(), NodeSet([0.0], I1), 2)


def test_ill_conditioned_system_reports_condition():
    nodes = equidistant_nodes(I1, 40)
    with pytest.raises(FactorizationError) as info:
        build_space(gaussian(0.01), nodes, 0)
    assert info.value.condition > 1e15


def test_phi_symmetric():
    s = build_space(cubic(), random_nodes(SQ, 30, seed=3), 2)
    assert np.array_equal(s.Phi, s.Phi.T)


def test_poly_exponents():
    assert poly_exponents(0, 1) == []
    assert poly_exponents(3, 1) == [(0,), (1,), (2,)]
    assert sorted(poly_exponents(2, 2)) == [(0, 0), (0, 1), (1, 0)]
    assert poly_count(3, 2) == 6


def test_constant_and_zero_data():
    s = build_space(cubic(), equidistant_nodes(I1, 9), 1)
    c = 2.5
    it = fit(s, np.full(9, c))
    assert np.allclose(it.alpha, 0.0, atol=1e-12)
    assert it.beta == pytest.approx([c])
    x = np.linspace(-1, 1, 101)
    assert np.allclose(evaluate(it, x), c, atol=1e-12)
    assert evaluate(it, [0.0])[0] == pytest.approx(c)
    assert np.allclose(evaluate_derivative(it, x), 0.0, atol=1e-10)
    z = fit(s, np.zeros(9))
    assert np.all(evaluate(z, x) == 0.0)


def test_linear_reproduction():
    nodes = random_nodes(I1, 12, seed=5)
    s = build_space(quintic(), nodes, 2)
    it = fit(s, nodes.points[:, 0])
    x = np.linspace(-1, 1, 501)
    assert np.allclose(evaluate(it, x), x, atol=1e-9)
    assert np.allclose(evaluate_derivative(it, x), 1.0, atol=1e-9)


def test_fit_length_mismatch():
    s = build_space(cubic(), equidistant_nodes(I1, 5), 1)
    with pytest.raises(ValueError):
        fit(s, np.ones(4))


def test_interpolation_at_centers_and_constraints():
    rng = np.random.default_rng(0)
    nodes = random_nodes(I1, 15, seed=2)
    s = build_space(cubic(), nodes, 2)
    data = rng.normal(size=15)
    it = fit(s, data)
    assert np.allclose(evaluate(it, nodes.points), data, atol=1e-10)
    assert np.allclose(it.constraint_residual(), 0.0, atol=1e-10)


def test_derivative_matches_finite_difference():
    nodes = random_nodes(I1, 10, seed=7)
    s = build_space(cubic(), nodes, 1)
    it = fit(s, np.sin(3 * nodes.points[:, 0]))
    x = np.linspace(-0.95, 0.95, 37)
    h = 1e-6
    fd = (evaluate(it, x + h) - evaluate(it, x - h)) / (2 * h)
    assert np.allclose(evaluate_derivative(it, x), fd, atol=1e-5)


def test_linear_kernel_derivative_singular_at_center():
    nodes = equidistant_nodes(I1, 5)
    s = build_space(polyharmonic(1), nodes, 1)
    it = fit(s, np.arange(5.0))
    with pytest.raises(SingularPointError):
        evaluate_derivative(it, nodes.points[2])


@pytest.mark.parametrize("kernel", [cubic(), quintic(), gaussian(5.0), multiquadric(5.0)], ids=lambda k: k.name)
@pytest.mark.parametrize("P", [0, 1, 2])
def test_cardinal_matrix_at_centers_is_identity(kernel, P):
    nodes = jittered_nodes(12, seed=11)
    s = build_space(kernel, nodes, P)
    assert np.allclose(s.cardinal_matrix(nodes.points), np.eye(12), atol=1e-8)


@pytest.mark.parametrize("P", [1, 2, 3])
def test_partition_of_unity(P):
    for nodes in (random_nodes(I1, 20, seed=1), random_nodes(SQ, 30, seed=1)):
        s = build_space(cubic(), nodes, P)
        pts = np.random.default_rng(4).uniform(-1, 1, size=(1000, nodes.dim))
        E = s.cardinal_matrix(pts)
        assert np.allclose(E.sum(axis=1), 1.0, atol=1e-10)
        D = s.cardinal_derivative_matrix(pts, nodes.dim - 1)
        assert np.allclose(D.sum(axis=1), 0.0, atol=1e-8)


def test_cardinal_derivative_reproduces_linears():
    nodes = random_nodes(I1, 14, seed=9)
    s = build_space(cubic(), nodes, 2)
    pts = np.linspace(-1, 1, 77)
    D = s.cardinal_derivative_matrix(pts)
    assert np.allclose(D @ nodes.points[:, 0], 1.0, atol=1e-8)


def test_cardinal_derivative_matches_finite_difference():
    nodes = random_nodes(SQ, 16, seed=2)
    s = build_space(quintic(), nodes, 1)
    pts = np.random.default_rng(1).uniform(-0.9, 0.9, size=(20, 2))
    h = 1e-6
    for axis in (0, 1):
        e = np.zeros(2)
        e[axis] = h
        fd = (s.cardinal_matrix(pts + e) - s.cardinal_matrix(pts - e)) / (2 * h)
        assert np.allclose(s.cardinal_derivative_matrix(pts, axis), fd, atol=1e-5)


def test_single_node_cardinal_function():
    s = build_space(gaussian(2.0), NodeSet([0.3], I1), 0)
    x = np.linspace(-1, 1, 9)
    expected = eval_kernel(gaussian(2.0), np.abs(x - 0.3)) / eval_kernel(gaussian(2.0), 0.0)
    assert np.allclose(s.cardinal_matrix(x)[:, 0], expected)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(6, 25), P=st.integers(1, 3))
def test_interpolation_property(seed, n, P):
    nodes = jittered_nodes(n, seed)
    s = build_space(cubic(), nodes, P)
    data = np.random.default_rng(seed).uniform(-3, 3, size=n)
    vals = s.cardinal_matrix(nodes.points) @ data
    assert np.max(np.abs(vals - data)) <= 1e-9 * np.max(np.abs(data))


@pytest.mark.parametrize("P", [1, 2, 3])
def test_polynomial_reproduction(P):
    nodes = random_nodes(I1, 15, seed=21)
    s = build_space(quintic(), nodes, P)
    x = np.linspace(-1, 1, 300)
    for deg in range(P):
        it = fit(s, nodes.points[:, 0] ** deg)
        assert np.allclose(evaluate(it, x), x**deg, rtol=1e-8, atol=1e-8)


def test_polynomial_reproduction_2d():
    nodes = random_nodes(SQ, 40, seed=8)
    s = build_space(cubic(), nodes, 3)
    pts = np.random.default_rng(2).uniform(-1, 1, size=(200, 2))
    for e in poly_exponents(3, 2):
        data = np.prod(nodes.points ** np.asarray(e), axis=1)
        it = fit(s, data)
        assert np.allclose(evaluate(it, pts), np.prod(pts ** np.asarray(e), axis=1), atol=1e-8)


def test_polynomial_basis_choice_does_not_change_interpolant():
    # Solve the saddle system with raw Legendre polynomials instead of scaled monomials.
    nodes = random_nodes(Domain.interval(0.0, 3.0), 8, seed=4)
    s = build_space(cubic(), nodes, 3)
    x = nodes.points[:, 0]
    data = np.cos(x)
    Pm = np.polynomial.legendre.legvander(x, 2)
    V = np.block([[s.Phi, Pm], [Pm.T, np.zeros((3, 3))]])
    coef = np.linalg.solve(V, np.concatenate([data, np.zeros(3)]))
    xs = np.linspace(0, 3, 50)
    alt = eval_kernel(cubic(), np.abs(xs[:, None] - x[None, :])) @ coef[:8]
    alt += np.polynomial.legendre.legvander(xs, 2) @ coef[8:]
    assert np.allclose(evaluate(fit(s, data), xs), alt, atol=1e-10)


def test_random_nodes_seeded_and_sorted():
    a = random_nodes(I1, 20, seed=3)
    b = random_nodes(I1, 20, seed=3)
    assert np.array_equal(a.points, b.points)
    assert np.all(np.diff(a.points[:, 0]) > 0)
    assert not np.array_equal(a.points, random_nodes(I1, 20, seed=4).points)


def test_equidistant_nodes():
    n = equidistant_nodes(I1, 5)
    assert np.allclose(n.points[:, 0], [-1, -0.5, 0, 0.5, 1])
    g = equidistant_nodes(SQ, 9)
    assert len(g) == 9 and set(np.round(g.points[:, 0], 12)) == {-1.0, 0.0, 1.0}
    with pytest.raises(InvalidNodesError):
        equidistant_nodes(SQ, 10)


def test_load_nodes(tmp_path):
    path = tmp_path / "nodes.txt"
    path.write_text("0.5\n-0.25\n1.0\n")
    n = load_nodes(path, I1)
    assert np.allclose(n.points[:, 0], [-0.25, 0.5, 1.0])
    path2 = tmp_path / "nodes2.txt"
    path2.write_text("0 0\n0.5 -0.5\n")
    assert load_nodes(path2, SQ).points.shape == (2, 2)
