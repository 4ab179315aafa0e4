import numpy as np
import pytest

from sgfluid import identities as idt
from sgfluid import spectral as sp
from sgfluid.curves import solve_k
from sgfluid.dynamics import (candidate_forcing, equilibrium, initial_state,
                              lagrangian_jet, step)


@pytest.fixture(scope="module")
def jets():
    s = initial_state(64, 0.03, 0.7, g={-2: 1.0})
    for _ in range(10):
        s = step(s, 1e-2)
    return idt.jet_triple(s, 1e-3)


def test_delta_vanishes_on_equilibrium():
    j = lagrangian_jet(equilibrium(64, 0.5))
    assert np.max(np.abs(idt.delta(j))) < 1e-14
    assert np.max(np.abs(idt.delta_t(j))) < 1e-14
    _, pre = idt.n1_pre_e(j)
    assert np.max(np.abs(pre)) < 1e-12


def test_equilibrium_solves_fixed_frame_system():
    for t in (0.0, 1.3):
        r1, r2 = idt.equilibrium_residual(64, 0.9, t)
        assert r1 < 1e-12 and r2 < 1e-12


def test_delta_equation_along_trajectory(jets):
    res, lhs, rhs = idt.delta_equation_residual(jets, 1e-3)
    assert res < 1e-6


def test_delta_t_equation_pre_form(jets):
    assert idt.delta_t_equation_residual(jets, 1e-3) < 1e-6


def test_tilde_residual_equals_delta_residual(jets):
    a = idt.delta_equation_residual(jets, 1e-3)[0]
    b = idt.tilde_equation_residual(jets, 1e-3)
    assert b <= a + 1e-12


def test_tilde_transform_variants(jets):
    j = jets[1]
    d, dt_ = idt.delta(j), idt.delta_t(j)
    n1 = np.ones(j.n, dtype=complex)
    n2 = 2 * np.ones(j.n, dtype=complex)
    ph = np.exp(-1j * j.omega0 * j.t)
    a = idt.tilde_transform(j, d, dt_, n1, n2)
    b = idt.tilde_transform(j, d, dt_, n1, n2, variant="reference")
    assert np.allclose(a.delta, ph * d)
    assert np.allclose(a.forcing[1], ph * (n2 - 1j * j.omega0 * n1))
    assert np.allclose(b.forcing[1], ph * (n2 + 1j * n1))


def test_k_frame_preserves_sup_norm(jets):
    j = jets[1]
    ts = idt.tilde_transform(j, idt.delta(j), idt.delta_t(j))
    k = solve_k(j.curve)
    kf = idt.k_frame(ts, k, a=j.a, kt=np.zeros(j.n))
    assert sp.sup_norm(kf.chi) == pytest.approx(sp.sup_norm(ts.delta), rel=1e-6)


def test_k_identities(jets):
    checks = {c.check_name: c for c in idt.verify_k_identities(jets, 1e-3, 0.03)}
    for name in ("k_t_identity", "k_residual", "AV_epsilon", "Re_AV_k_t", "k_tt_identity"):
        assert checks[name].passed, checks[name].as_dict()


def test_check_record_keys():
    c = idt.Check("x", 64, 0.1, 0.5, 1e-3, 1e-2)
    assert set(c.as_dict()) == {"check_name", "resolution", "epsilon", "omega0",
                                "residual", "tolerance", "pass"}
    assert c.passed
    assert not idt.Check("x", 64, 0.1, 0.5, np.nan, 1.0).passed
    assert not idt.Check("x", 64, 0.1, 0.5, 0.0, 0.0, strict=True).passed


def test_cubic_scaling_small():
    r = idt.cubic_scaling_experiment([0.04, 0.02, 0.01], 0.0, n=64)
    assert 2.7 <= r["slopes"]["rhs_pre_minus_pi_delta"] <= 3.3
    assert 0.9 <= r["slopes"]["delta"] <= 1.1


def test_candidate_e_misses_pre_form_at_cubic_order():
    """The candidate E reproduces the structure but not the exact cubic terms."""
    rows = []
    for eps in (0.02, 0.01):
        j = lagrangian_jet(initial_state(64, eps, 0.0))
        rows.append(idt.e_validation_residual(j))
    assert rows[0] > 1e-8
    assert 2.5 < np.log(rows[0] / rows[1]) / np.log(2) < 3.5


def test_loglog_slope():
    assert idt.loglog_slope([1, 2, 4], [1, 8, 64]) == pytest.approx(3.0)
