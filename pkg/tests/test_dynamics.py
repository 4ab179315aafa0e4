import numpy as np
import pytest

from sgfluid import spectral as sp
from sgfluid.curves import signed_area
from sgfluid.dynamics import (FluidState, accel, candidate_forcing, check_invariants,
                              compute_A1, compute_b, constraint_defect, equilibrium,
                              frame_residual, initial_state, lagrangian_jet, project,
                              reproject, solve_at, solve_at_direct, step,
                              step_with_info, with_identity_labels)
from sgfluid.errors import DegenerateParametrization, InvariantViolation
from sgfluid.identities import jet_triple


@pytest.fixture(scope="module")
def moving():
    s = initial_state(64, 0.05, 0.7, g={-2: 1.0})
    for _ in range(10):
        s = step(s, 1e-2)
    return s


def test_state_validation():
    n = 32
    with pytest.raises(ValueError):
        FluidState(np.ones(n), np.ones(n), omega0=2.0)
    with pytest.raises(ValueError):
        FluidState(np.ones(n), np.ones(n + 2), omega0=0.1)


@pytest.mark.parametrize("w", [0.0, 0.5, 1.0, 1.5])
def test_equilibrium_is_static(w):
    s = equilibrium(64, w)
    assert np.allclose(compute_A1(s), np.pi - w ** 2, atol=1e-12)
    s2 = step(s, 0.05)
    assert np.max(np.abs(s2.Z - s.Z)) < 1e-13
    assert np.max(np.abs(s2.Zt)) < 1e-13


def test_degenerate_parametrization():
    a = sp.grid(32)
    s = FluidState(np.exp(1j * a) + 0.5 * np.exp(2j * a), np.zeros(32), 0.0)
    with pytest.raises(DegenerateParametrization):
        compute_b(s)


def test_step_rejects_zero_dt(moving):
    with pytest.raises(ValueError):
        step(moving, 0.0)


def test_initial_state_constraints():
    s = initial_state(64, 0.05, 0.5)
    assert signed_area(s.Z) == pytest.approx(np.pi, abs=1e-12)
    assert constraint_defect(s) < 1e-13
    assert sp.negative_mode_energy(s.Z, include_constant=True) < 1e-20


def test_projection_is_idempotent(moving):
    Z, Zt, mag = project(moving.Z, moving.Zt)
    Z2, Zt2, mag2 = project(Z, Zt)
    assert mag2 < 1e-15
    r = reproject(moving)
    assert signed_area(r.Z) == pytest.approx(np.pi, abs=1e-14)
    assert np.allclose(reproject(r).Z, r.Z, atol=1e-15)


def test_short_run_conserves_invariants():
    s = initial_state(64, 0.05, 0.5)
    for _ in range(50):
        s, mag = step_with_info(s, 1e-2)
    d = check_invariants(s, area_tol=1e-10, constraint_tol=1e-12)
    assert abs(d["area"] - np.pi) < 1e-10


def test_invariant_violation_reports_diagnostics(moving):
    bad = FluidState(1.1 * moving.Z, moving.Zt, moving.omega0, moving.t)
    with pytest.raises(InvariantViolation) as info:
        check_invariants(bad)
    assert "area" in info.value.diagnostics


def test_time_reversal(moving):
    back = step(step(moving, 1e-2), -1e-2)
    assert np.max(np.abs(back.Z - moving.Z)) < 1e-9


def test_frame_equation_holds_in_lagrangian_frame(moving):
    j = lagrangian_jet(moving)
    assert frame_residual(j) < 1e-10


def test_lagrangian_jet_with_identity_labels_matches_riemann(moving):
    s = with_identity_labels(moving)
    j = lagrangian_jet(s)
    assert np.allclose(j.z, s.Z) and np.allclose(j.zt, s.Zt)


def _fd_at(s, dt=1e-3):
    jm, j0, jp = jet_triple(s, dt)
    return j0, (jp.a - jm.a) / (2 * dt)


def test_a_t_direct_matches_finite_differences(moving):
    j, fd = _fd_at(moving)
    assert np.max(np.abs(solve_at_direct(j) - fd)) < 1e-5 * max(1.0, np.max(np.abs(fd)))


def test_a_t_needs_the_arclength_adjoint(moving):
    j, fd = _fd_at(moving)
    assert np.max(np.abs(solve_at_direct(j, measure="uniform") - fd)) > 1e-4


def test_a_t_forcing_form_with_candidate_terms(moving):
    j, fd = _fd_at(moving)
    ga, gh = candidate_forcing(j)
    good = np.max(np.abs(solve_at(j, ga, gh) - fd))
    with_term = np.max(np.abs(solve_at(j, ga, gh, omega_coeff=1.0) - fd))
    assert good < 1e-5
    assert with_term > 100 * good


def test_accel_parts(moving):
    ztt, A, G = accel(moving, return_parts=True)
    assert np.all(A > 0)
    assert np.allclose(ztt, accel(moving))
