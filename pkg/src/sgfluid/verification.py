"""Check suites shared by the ``verify`` command and the acceptance tests.

Each function returns a list of :class:`~sgfluid.identities.Check` records.
"""

import numpy as np

from . import gravity, oracles
from . import spectral as sp
from .curves import ClosedCurve, centroid, fourier_profile, signed_area, solve_k
from .dynamics import (FluidState, check_invariants, compute_A1, constraint_defect,
                       equilibrium, initial_state, step, step_with_info)
from .identities import (Check, average, cubic_scaling_experiment,
                         delta_t_equation_residual, equilibrium_residual,
                         jet_triple, tilde_equation_residual, trajectory_check,
                         verify_k_identities)
from .kernels import Workspace, csc_form


def random_modes(rng, scale=1.0, kmax=4, skip=(1,)):
    """Random Fourier coefficients on modes -kmax..kmax, decaying with |k|."""
    out = {}
    for k in range(-kmax, kmax + 1):
        if k in skip:
            continue
        out[k] = scale * complex(rng.normal(), rng.normal()) / (1 + abs(k)) ** 2
    return out


def random_curve(n, rng, eps=0.1, normalize=True):
    """e^{ia} + eps * random smooth profile, centred with area pi."""
    z = np.exp(1j * sp.grid(n)) + eps * fourier_profile(n, random_modes(rng, skip=(0, 1)))
    if normalize:
        z = z - centroid(z)
        z = z * np.sqrt(np.pi / signed_area(z))
    return ClosedCurve(z)


def _max(*xs):
    return float(max(np.max(np.abs(x)) for x in xs))


def equilibrium_checks(n=128, omega0=0.5, times=(0.0, 0.37, 2.0)):
    r1 = max(equilibrium_residual(n, omega0, t)[0] for t in times)
    r2 = max(equilibrium_residual(n, omega0, t)[1] for t in times)
    return [Check("equilibrium_momentum_line", n, 0.0, omega0, r1, 1e-10),
            Check("equilibrium_constraint_line", n, 0.0, omega0, r2, 1e-10)]


def taylor_sign_checks(n=128, omegas=(0.0, 0.5, 1.0, 1.5), samples=100, eps=0.05, seed=7):
    out = []
    for w in omegas:
        a1 = compute_A1(equilibrium(n, w))
        out.append(Check("A1_equilibrium", n, 0.0, w, _max(a1 - (np.pi - w ** 2)), 1e-10))
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(samples):
        w = float(rng.uniform(0, 1.7))
        s = initial_state(n, eps, w, f=random_modes(rng, skip=(1,)),
                          g=random_modes(rng, skip=()))
        worst = min(worst, float(compute_A1(s, check=False).min()))
    # recorded as -min(A1) against 0, strictly
    out.append(Check("A1_positive_random", n, eps, float("nan"), -worst, 0.0,
                     note=f"min A1 over {samples} states = {worst:.6g}", strict=True))
    return out


def operator_checks(n=128, curves=3, seed=11, eps=0.1):
    rng = np.random.default_rng(seed)
    worst = dict(H1=0.0, Hzn=0.0, H2=0.0, oracle=0.0)
    for _ in range(curves):
        c = random_curve(n, rng, eps)
        ws = Workspace(c)
        z = c.z
        worst["H1"] = max(worst["H1"], _max(ws.hilbert(np.ones(n)) - 1))
        for p in range(1, 5):
            worst["Hzn"] = max(worst["Hzn"], _max(ws.hilbert(z ** p) - z ** p))
        f = fourier_profile(n, random_modes(rng, kmax=6, skip=()))
        g = fourier_profile(n, random_modes(rng, kmax=6, skip=()))
        worst["H2"] = max(worst["H2"], _max(ws.hilbert(ws.hilbert(f)) - f))
        fr = f.real
        pairs = [
            (ws.hilbert(f), oracles.hilbert(z, f)),
            (ws.conj_hilbert(f), oracles.conj_hilbert(z, f)),
            (ws.commutator(f, g), oracles.commutator(z, f, g)),
            (ws.commutator_difference(f, g), oracles.commutator(z, f, g)),
            (ws.bracket_two(f, g), oracles.bracket_two(z, f, g)),
            (ws.quad_kernel(f, g), oracles.quad_kernel(z, f, g)),
            (csc_form(f), oracles.csc_form(f)),
            (ws.kstar_matrix() @ fr, oracles.kstar_matrix(z) @ fr),
        ]
        worst["oracle"] = max(worst["oracle"], max(_max(a - b) for a, b in pairs))
    return [Check("H_one", n, eps, float("nan"), worst["H1"], 1e-9),
            Check("H_powers", n, eps, float("nan"), worst["Hzn"], 1e-9),
            Check("H_squared", n, eps, float("nan"), worst["H2"], 1e-8),
            Check("operators_vs_oracles", n, eps, float("nan"), worst["oracle"], 1e-9)]


def gravity_checks(n=256, points=100, eps_list=(0.05, 0.02), seed=5):
    rng = np.random.default_rng(seed)
    disc = ClosedCurve(np.exp(1j * sp.grid(n)))
    r = np.sqrt(rng.uniform(0, 0.8 ** 2, points))
    x = r * np.exp(1j * rng.uniform(0, 2 * np.pi, points))
    field = gravity.grad_phi_oracle(disc, x).values
    out = [Check("disc_interior_field", n, 0.0, float("nan"), _max(field - np.pi * x), 1e-6)]
    for eps in eps_list:
        c = random_curve(n, rng, eps)
        out.append(Check("gravity_reduction", n, eps, float("nan"),
                         gravity.reduction_check(c), 1e-5))
    return out


def cubic_checks(n=128, eps_list=(0.05, 0.02, 0.01, 0.005), omegas=(0.0, 1.0)):
    out = []
    for w in omegas:
        r = cubic_scaling_experiment(eps_list, w, n=n)
        sl = r["slopes"]
        out.append(Check("cubic_slope", n, float("nan"), w,
                         abs(sl["rhs_pre_minus_pi_delta"] - 3.0), 0.3,
                         note=f"slope {sl['rhs_pre_minus_pi_delta']:.4f}"))
        out.append(Check("delta_control_slope", n, float("nan"), w,
                         abs(sl["delta"] - 1.0), 0.1, note=f"slope {sl['delta']:.4f}"))
    return out


def trajectory_checks(n=256, eps=0.02, dt=1e-3, t_end=1.0, omega0=0.5, every=0.1):
    s = initial_state(n, eps, omega0)
    rows = trajectory_check(s, dt, t_end, every)
    worst = max(r[1] for r in rows)
    return [Check("delta_equation_trajectory", n, eps, omega0, worst, 1e-5,
                  note=f"{len(rows)} samples, max |rhs_pre| {max(r[2] for r in rows):.3e}")]


def conservation_checks(n=256, eps=0.05, dt=1e-3, t_end=10.0, omega0=0.5):
    s = initial_state(n, eps, omega0)
    s = FluidState(s.Z, s.Zt, omega0, 0.0)
    area0 = signed_area(s.Z)
    drift, defect = 0.0, constraint_defect(s)
    for _ in range(int(round(t_end / dt))):
        s, _ = step_with_info(s, dt)
        drift = max(drift, abs(signed_area(s.Z) - area0))
        defect = max(defect, constraint_defect(s))
    return [Check("area_drift", n, eps, omega0, drift, 1e-8),
            Check("constraint_defect", n, eps, omega0, defect, 1e-6)]


def k_checks(n=128, curves=3, seed=3, eps=0.05, dt=1e-3, omega0=0.7):
    rng = np.random.default_rng(seed)
    worst_res, worst_av = 0.0, 0.0
    for _ in range(curves):
        c = random_curve(n, rng, eps)
        ws = Workspace(c)
        k, info = solve_k(c, workspace=ws, return_info=True)
        worst_res = max(worst_res, info["residuals"][-1])
        worst_av = max(worst_av, abs(average(ws, np.abs(c.z) ** 2 - 1)))
    s = initial_state(n, eps, omega0, g={-2: 1.0})
    for _ in range(10):
        s = step(s, 1e-2)
    ids = {c.check_name: c for c in verify_k_identities(jet_triple(s, dt), dt, eps)}
    return [Check("k_solve_residual", n, eps, float("nan"), worst_res, 1e-10),
            Check("AV_epsilon_random", n, eps, float("nan"), worst_av, 1e-10),
            ids["k_t_identity"]]


def extended_checks(n=128, eps=0.03, omega0=0.7, dt=1e-3):
    """Identity checks beyond the acceptance set, reported for information."""
    from .dynamics import candidate_forcing
    s = initial_state(n, eps, omega0, g={-2: 1.0})
    for _ in range(10):
        s = step(s, 1e-2)
    jets = jet_triple(s, dt)
    out = [Check("delta_t_equation", n, eps, omega0,
                 delta_t_equation_residual(jets, dt), 1e-6 + 10 * dt ** 2),
           Check("delta_t_equation_candidate_E", n, eps, omega0,
                 delta_t_equation_residual(jets, dt, form="e"), 1e-6 + 10 * dt ** 2,
                 note="candidate E operator"),
           Check("tilde_delta_equation", n, eps, omega0,
                 tilde_equation_residual(jets, dt), 1e-5)]
    ga, gh = candidate_forcing(jets[1])
    out += verify_k_identities(jets, dt, eps, ga, gh)
    return out
