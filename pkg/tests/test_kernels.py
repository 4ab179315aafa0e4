import numpy as np
import pytest

from sgfluid import oracles
from sgfluid import spectral as sp
from sgfluid.curves import ClosedCurve, fourier_profile
from sgfluid.errors import SingularSystem
from sgfluid.kernels import (Workspace, csc_form, curve_hilbert, e_operator,
                             g_forcing, k_star_solve)
from sgfluid.verification import random_curve, random_modes


@pytest.fixture(scope="module")
def setup():
    rng = np.random.default_rng(99)
    n = 64
    c = random_curve(n, rng, 0.1)
    f = fourier_profile(n, random_modes(rng, kmax=5, skip=()))
    g = fourier_profile(n, random_modes(rng, kmax=5, skip=()))
    return c, Workspace(c), f, g


def test_hilbert_matches_subtraction_oracle(setup):
    c, ws, f, _ = setup
    assert np.allclose(ws.hilbert(f), oracles.hilbert(c.z, f), atol=1e-12)
    assert np.allclose(ws.conj_hilbert(f), oracles.conj_hilbert(c.z, f), atol=1e-12)


def test_hilbert_fixes_holomorphic_boundary_values(setup):
    c, ws, _, _ = setup
    for p in range(0, 5):
        assert np.allclose(ws.hilbert(c.z ** p), c.z ** p, atol=1e-11)
    # an anti-holomorphic value 1/(z - z0), z0 inside, is negated
    w = 1.0 / (c.z - 0.1)
    assert np.allclose(ws.hilbert(w), -w, atol=1e-10)


def test_hilbert_squares_to_identity(setup):
    _, ws, f, _ = setup
    assert np.allclose(ws.hilbert(ws.hilbert(f)), f, atol=1e-11)


def test_circle_reduces_to_multiplier():
    n = 32
    ws = Workspace(np.exp(1j * sp.grid(n)))
    f = fourier_profile(n, {3: 1, -2: 1j, 0: 2})
    assert np.allclose(ws.hilbert(f), sp.circle_hilbert(f), atol=1e-13)


def test_commutator_forms_agree(setup):
    c, ws, f, g = setup
    a = ws.commutator(f, g)
    assert np.allclose(a, ws.commutator_difference(f, g), atol=1e-12)
    assert np.allclose(a, oracles.commutator(c.z, f, g), atol=1e-12)


def test_commutator_identity_with_derivative(setup):
    c, ws, f, _ = setup
    # [z, H](f_a / z_a) = 0 for every periodic f, up to grid-scale aliasing
    assert np.max(np.abs(ws.commutator(c.z, sp.derivative(f) / c.z_alpha))) < 1e-9


def test_bracket_and_quad_kernel_match_oracles(setup):
    c, ws, f, g = setup
    assert np.allclose(ws.bracket_two(f, g), oracles.bracket_two(c.z, f, g), atol=1e-11)
    assert np.allclose(ws.quad_kernel(f, g), oracles.quad_kernel(c.z, f, g), atol=1e-11)


def test_csc_form_on_modes_and_oracle(setup):
    n = 64
    a = sp.grid(n)
    for k in (1, 2, 5):
        assert np.allclose(csc_form(np.exp(1j * k * a)), k, atol=1e-12)
    _, _, f, _ = setup
    assert np.allclose(csc_form(f), oracles.csc_form(f), atol=1e-12)
    assert csc_form(f).min() >= 0


def test_kstar_matrix_matches_oracle(setup):
    # the two assemblies differ on grid-scale vectors, so compare on smooth ones
    c, ws, f, g = setup
    for m in ("arclength", "uniform"):
        ref = oracles.kstar_matrix(c.z, m)
        for v in (f.real, g.imag):
            assert np.allclose(ws.kstar_matrix(m) @ v, ref @ v, atol=1e-11)
    with pytest.raises(ValueError):
        ws.kstar_matrix("bogus")


def test_k_star_solve_round_trip(setup, rng):
    c, ws, _, _ = setup
    x = rng.normal(size=c.n)
    x = sp.dealias(x)
    y = x + ws.kstar_matrix() @ x
    assert np.allclose(k_star_solve(ws, y), x, atol=1e-9)


def test_k_star_solve_flags_singular(setup):
    _, ws, _, _ = setup
    with pytest.raises(SingularSystem):
        ws.k_star_solve(np.ones(ws.n), max_cond=1.0)


def test_module_wrappers_accept_curves(setup):
    c, ws, f, _ = setup
    assert np.allclose(curve_hilbert(c, f), ws.hilbert(f))


def test_g_forcing_on_equilibrium():
    n = 32
    z = np.exp(1j * sp.grid(n))
    # (I + H) conj(z) = 0 on the circle
    assert np.max(np.abs(g_forcing(z, np.zeros(n), 0.5))) < 1e-13


def test_candidate_e_vanishes_on_circle_constants():
    n = 32
    ws = Workspace(np.exp(1j * sp.grid(n)))
    assert np.max(np.abs(e_operator(None, np.ones(n), ws))) < 1e-13
