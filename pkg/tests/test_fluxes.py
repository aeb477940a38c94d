import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakrbf.errors import StateError
from weakrbf.fluxes import (
    Central,
    Godunov,
    NormalUpwind,
    Rusanov,
    Upwind,
    central_flux,
    godunov_flux,
    make_flux,
    rusanov_flux,
    upwind_flux,
)
from weakrbf.problems import euler_flux, euler_wavespeed, make_problem


def burgers(u):
    return 0.5 * np.asarray(u) ** 2


def test_upwind_examples():
    assert upwind_flux(2, 3, 7) == 6
    assert upwind_flux(-2, 3, 7) == -14
    assert upwind_flux(1, 5, 5) == 5
    assert upwind_flux(0, 3, 7) == 0


def test_godunov_examples():
    assert godunov_flux(burgers, -1, 1) == pytest.approx(0.0, abs=1e-20)
    assert godunov_flux(burgers, 1, -1) == pytest.approx(0.5)
    for f in (burgers, np.sin, lambda u: u**3 - u):
        assert godunov_flux(f, 0.3, 0.3) == pytest.approx(float(f(0.3)))


def test_godunov_finds_interior_extremum_between_samples():
    f = lambda u: -np.cos(u - 0.123456789)
    assert godunov_flux(f, -1, 1) == pytest.approx(-1.0, abs=1e-15)
    assert godunov_flux(lambda u: -f(u), 1, -1) == pytest.approx(1.0, abs=1e-15)


def test_godunov_rejects_non_finite_flux():
    with pytest.raises(StateError):
        godunov_flux(lambda u: np.where(np.asarray(u) < 0.2, np.nan, u), -1, 1)


def test_central_examples():
    assert central_flux(lambda u: u, 1, 3) == 2
    assert central_flux(burgers, 0.7, 0.7) == pytest.approx(burgers(0.7))
    assert central_flux(burgers, 0, 2) == 1


def test_rusanov_examples():
    U = np.array([1.0, 0.0, 0.5])
    assert np.allclose(rusanov_flux(euler_flux, euler_wavespeed, U, U), [0, 1, 0])
    assert np.allclose(rusanov_flux(euler_flux, euler_wavespeed, U, U), euler_flux(U))
    lam = 1.7
    val = rusanov_flux(lambda u: lam * u, lambda u: abs(lam), 0.4, -2.0)
    assert val == pytest.approx(lam * 0.4)


def test_rusanov_rejects_invalid_state():
    bad = np.array([1.0, 0.0, -0.5])
    with pytest.raises(StateError):
        rusanov_flux(euler_flux, euler_wavespeed, bad, np.array([1.0, 0.0, 0.5]))


@settings(max_examples=200, deadline=None)
@given(a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_godunov_is_an_e_flux(a, b):
    g = godunov_flux(burgers, a, b)
    for u in np.linspace(min(a, b), max(a, b), 50):
        assert (b - a) * (g - burgers(u)) <= 1e-12


def test_godunov_e_flux_nonconvex():
    rng = np.random.default_rng(3)
    f = lambda u: np.sin(3 * u) + 0.1 * u**2
    for a, b in rng.uniform(-2, 2, size=(200, 2)):
        g = godunov_flux(f, a, b)
        u = np.linspace(min(a, b), max(a, b), 50)
        assert np.all((b - a) * (g - f(u)) <= 1e-12)


@pytest.mark.parametrize("flux", [Upwind(1.3), Upwind(-0.7), Godunov(burgers), Godunov(lambda u: np.sin(2 * u))], ids=str)
def test_monotonicity_on_grid(flux):
    g = np.linspace(-2, 2, 50)
    F = np.array([[flux(a, b) for b in g] for a in g])
    assert np.all(np.diff(F, axis=0) >= -1e-12)
    assert np.all(np.diff(F, axis=1) <= 1e-12)


def test_consistency_of_scalar_fluxes():
    rng = np.random.default_rng(7)
    fluxes = [Upwind(2.0), Upwind(-1.0), Godunov(burgers), Central(burgers), Rusanov(burgers, np.abs)]
    exact = [lambda u: 2 * u, lambda u: -u, burgers, burgers, burgers]
    for u in rng.uniform(-3, 3, 100):
        for fl, f in zip(fluxes, exact):
            assert abs(fl(u, u) - f(u)) <= 1e-12


def test_godunov_matches_dense_minimization():
    rng = np.random.default_rng(12)
    for a, b in rng.uniform(-1, 1, size=(100, 2)):
        u = np.linspace(min(a, b), max(a, b), 100_000)
        f = burgers(u)
        oracle = f.min() if a <= b else f.max()
        assert abs(godunov_flux(burgers, a, b) - oracle) <= 1e-10


def test_make_flux():
    p = make_problem("advect-gauss")
    assert make_flux("upwind", p) == Upwind(1.0)
    assert make_flux("godunov", p).name == "godunov"
    e = make_problem("euler-smooth")
    assert make_flux("rusanov", e).name == "rusanov"
    with pytest.raises(ValueError):
        make_flux("upwind", e)
    with pytest.raises(ValueError):
        make_flux("roe", p)


def test_normal_upwind_picks_inner_state_on_outflow():
    f = NormalUpwind((1.0, 0.5))
    assert f.normal_flux((1, 0), 2.0, 9.0) == 2.0
    assert f.normal_flux((-1, 0), 2.0, 9.0) == -9.0
    assert f.normal_flux((0, -1), 2.0, 9.0) == -4.5
