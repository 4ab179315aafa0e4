import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgfluid import spectral as sp


def trig(n, coeffs):
    a = sp.grid(n)
    out = np.zeros(n, dtype=complex)
    for k, c in coeffs.items():
        out += c * np.exp(1j * k * a)
    return out


coeff_maps = st.dictionaries(
    st.integers(-10, 10),
    st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
    min_size=1, max_size=6)


def test_as_field_rejects_odd_and_small():
    with pytest.raises(ValueError):
        sp.as_field(np.ones(15))
    with pytest.raises(ValueError):
        sp.as_field(np.ones(8))
    with pytest.raises(ValueError):
        sp.as_field(np.array([np.nan] * 16))


def test_derivative_of_modes_is_exact():
    n = 32
    f = trig(n, {3: 1.0, -5: 2j})
    expected = trig(n, {3: 3j, -5: 2j * (-5j)})
    assert np.allclose(sp.derivative(f), expected, atol=1e-12)
    assert np.allclose(sp.derivative(f, 2), trig(n, {3: -9.0, -5: -50j}), atol=1e-11)


def test_derivative_keeps_real_input_real():
    f = np.cos(3 * sp.grid(32))
    assert np.isrealobj(sp.derivative(f))


@given(coeff_maps)
@settings(max_examples=40, deadline=None)
def test_antiderivative_inverts_derivative(coeffs):
    n = 64
    f = trig(n, {k: c for k, c in coeffs.items() if k != 0})
    assert np.allclose(sp.derivative(sp.antiderivative(f)), f, atol=1e-10)


@given(coeff_maps)
@settings(max_examples=40, deadline=None)
def test_circle_hilbert_is_an_involution(coeffs):
    f = trig(64, coeffs)
    assert np.allclose(sp.circle_hilbert(sp.circle_hilbert(f)), f, atol=1e-10)


def test_circle_hilbert_signs():
    n = 32
    assert np.allclose(sp.circle_hilbert(trig(n, {2: 1})), trig(n, {2: 1}))
    assert np.allclose(sp.circle_hilbert(np.ones(n)), np.ones(n))
    assert np.allclose(sp.circle_hilbert(trig(n, {-3: 1})), -trig(n, {-3: 1}))


def test_circle_hilbert_matrix_matches_multiplier(rng):
    n = 32
    f = rng.normal(size=n) + 1j * rng.normal(size=n)
    assert np.allclose(sp.circle_hilbert_matrix(n) @ f, sp.circle_hilbert(f), atol=1e-12)


def test_conjugate_function_of_cosine():
    a = sp.grid(64)
    assert np.allclose(sp.conjugate_function(np.cos(2 * a)), np.sin(2 * a), atol=1e-12)


def test_trapezoid_is_exact_for_trig_polynomials():
    a = sp.grid(32)
    assert sp.trapezoid_integral(np.cos(a) ** 2) == pytest.approx(np.pi, abs=1e-13)


def test_dealias_drops_top_third():
    n = 48
    f = trig(n, {5: 1, 17: 1, -20: 1})
    g = sp.dealias(f)
    assert np.allclose(g, trig(n, {5: 1}), atol=1e-12)


def test_project_modes_and_negative_energy():
    n = 32
    f = trig(n, {2: 1, -1: 0.5, 0: 3})
    assert sp.negative_mode_energy(f) == pytest.approx(0.25)
    assert sp.negative_mode_energy(f, include_constant=True) == pytest.approx(9.25)
    assert np.allclose(sp.holomorphic_part(f, include_constant=False), trig(n, {2: 1}))


def test_evaluate_and_interpolation_matrix_agree(rng):
    n = 32
    f = trig(n, {1: 1, -4: 0.3j, 7: 0.1})
    x = rng.uniform(0, 2 * np.pi, 9)
    exact = sum(c * np.exp(1j * k * x) for k, c in {1: 1, -4: 0.3j, 7: 0.1}.items())
    assert np.allclose(sp.evaluate(f, x), exact, atol=1e-12)
    assert np.allclose(sp.interpolation_matrix(n, x) @ f, exact, atol=1e-12)


def test_resample_preserves_the_interpolant():
    n = 32
    f = trig(n, {3: 1, -2: 2})
    g = sp.resample(f, 128)
    assert np.allclose(g, trig(128, {3: 1, -2: 2}), atol=1e-12)


def test_sup_norm_finds_off_grid_maximum():
    n = 16
    a = sp.grid(n)
    f = np.cos(a - 0.5 * 2 * np.pi / n)  # peak between samples
    assert np.max(np.abs(f)) < 0.99
    assert sp.sup_norm(f) == pytest.approx(1.0, abs=1e-12)
