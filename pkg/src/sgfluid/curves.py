"""Closed curves, reparametrizations, and the conformal and k coordinates."""

import json
from functools import cached_property

import numpy as np

from . import spectral as sp
from .errors import CurveError, NonConvergence

MIN_SPEED = 1e-8


def fourier_profile(n, coeffs):
    """Sample sum_k c_k exp(i k alpha) on an N-point grid.

    ``coeffs`` is a mapping mode -> complex, or an iterable of
    ``(mode, re, im)`` / ``(mode, complex)`` entries.
    """
    a = sp.grid(n)
    out = np.zeros(n, dtype=complex)
    items = coeffs.items() if isinstance(coeffs, dict) else coeffs
    for item in items:
        if isinstance(coeffs, dict):
            k, c = item
        elif len(item) == 3:
            k, c = item[0], complex(item[1], item[2])
        else:
            k, c = item
        out += complex(c) * np.exp(1j * int(k) * a)
    return out


def winding_number(z, center=0.0):
    w = np.asarray(z) - center
    ang = np.unwrap(np.angle(np.append(w, w[0])))
    return int(round((ang[-1] - ang[0]) / (2 * np.pi)))


class ClosedCurve:
    """Counterclockwise simple closed curve sampled on a uniform grid.

    Curves whose speed |z_alpha| drops below 1e-8 on the grid, or that do
    not wind once about the origin, are rejected.
    """

    def __init__(self, z, check=True):
        z = sp.as_field(z).copy()
        z.setflags(write=False)
        self._z = z
        if check:
            speed = np.abs(self.z_alpha)
            if speed.min() < MIN_SPEED:
                raise CurveError(f"degenerate parametrization: min |z_alpha| = {speed.min():.3e}")
            w = winding_number(z)
            if w != 1:
                raise CurveError(f"curve must wind once about the origin, winding = {w}")

    @property
    def z(self):
        return self._z

    @property
    def n(self):
        return len(self._z)

    @cached_property
    def z_alpha(self):
        return sp.derivative(self._z)

    @cached_property
    def z_alpha2(self):
        return sp.derivative(self._z, 2)

    @property
    def alpha(self):
        return sp.grid(self.n)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"ClosedCurve(N={self.n}, area={area(self):.6g})"


def _as_curve(c):
    return c if isinstance(c, ClosedCurve) else ClosedCurve(c)


def area(c):
    """Enclosed area (1/2) Im int conj(z) z_alpha; raises if clockwise."""
    c = _as_curve(c)
    val = 0.5 * float(np.imag(sp.trapezoid_integral(np.conj(c.z) * c.z_alpha)))
    if val <= 0:
        raise CurveError(f"curve is clockwise (signed area {val:.3e})")
    return val


def signed_area(z):
    z = np.asarray(z, dtype=complex)
    return 0.5 * float(np.imag(sp.trapezoid_integral(np.conj(z) * sp.derivative(z))))


def centroid(z):
    """Area centroid: (1/A) (1/2i) closed-int |z|^2 dz."""
    z = np.asarray(z, dtype=complex)
    moment = sp.trapezoid_integral(np.abs(z) ** 2 * sp.derivative(z)) / 2j
    return moment / signed_area(z)


def rotating_frame(z, t, omega0, zt=None):
    """Map to the frame rotating with the vorticity.

    Returns e^{i w t} z, and if ``zt`` is given also the rotated velocity
    e^{i w t}(z_t + i w z).
    """
    ph = np.exp(1j * omega0 * t)
    zz = ph * np.asarray(z)
    if zt is None:
        return zz
    return zz, ph * (np.asarray(zt) + 1j * omega0 * np.asarray(z))


def epsilon(c):
    """|z|^2 - 1 pointwise (real)."""
    z = c.z if isinstance(c, ClosedCurve) else np.asarray(c)
    return np.abs(z) ** 2 - 1.0


class Diffeo:
    """Circle diffeomorphism alpha -> alpha + u(alpha) with periodic real u."""

    def __init__(self, offset):
        u = sp.as_field(offset, dtype=float).copy()
        u.setflags(write=False)
        self.offset = u
        if self.min_slope <= 0:
            raise CurveError(f"map is not increasing: min slope {self.min_slope:.3e}")

    @classmethod
    def identity(cls, n):
        return cls(np.zeros(n))

    @property
    def n(self):
        return len(self.offset)

    @cached_property
    def slope(self):
        return 1.0 + sp.derivative(self.offset)

    @property
    def min_slope(self):
        return float(self.slope.min())

    @property
    def values(self):
        return sp.grid(self.n) + self.offset

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x + sp.evaluate(self.offset, x)

    def compose(self, f):
        """Samples of f(alpha_j + u(alpha_j)), i.e. f o self on the grid."""
        return sp.evaluate(np.asarray(f), self.values)

    def inverse(self, tol=1e-14, maxiter=50, accept=1e-10):
        """Diffeo of the inverse map, by Newton iteration on the interpolant.

        Rounding can stall the iteration just above ``tol``; a final update
        below ``accept`` is still taken as converged.
        """
        n = self.n
        beta = sp.grid(n)
        x = beta - self.offset  # first-order guess
        du = sp.derivative(self.offset)
        for _ in range(maxiter):
            f = x + sp.evaluate(self.offset, x) - beta
            dx = f / (1.0 + sp.evaluate(du, x))
            x = x - dx
            if np.max(np.abs(dx)) < tol:
                break
        else:
            if np.max(np.abs(dx)) > accept:
                raise NonConvergence("diffeomorphism inversion did not converge")
        return Diffeo(x - beta)

    def __repr__(self):
        return f"Diffeo(N={self.n}, max|u|={np.max(np.abs(self.offset)):.3e})"


def conformal_map(c, tol=1e-10, maxiter=500):
    """Theodorsen iteration for the boundary correspondence of a near circle.

    Returns ``(Z, hinv)``: the conformally parametrized boundary
    Z(alpha') = z(hinv(alpha')), whose Fourier modes n <= 0 vanish, and the
    Diffeo ``hinv``. The map is normalized with Phi(0) = 0, Phi'(0) > 0.
    """
    c = _as_curve(c)
    n = c.n
    alpha = sp.grid(n)
    phi = np.unwrap(np.angle(c.z))
    phi = phi - 2 * np.pi * np.round((phi[0] - np.angle(c.z[0])) / (2 * np.pi))
    psi = phi - alpha
    try:
        to_polar = Diffeo(psi)
    except CurveError as exc:
        raise NonConvergence("curve is not star-shaped about the origin") from exc
    from_polar = to_polar.inverse()
    logr = sp.evaluate(np.log(np.abs(c.z)), from_polar.values)

    sigma = np.zeros(n)
    relax = 1.0
    prev = np.inf
    history = []
    for _ in range(maxiter):
        new = sp.conjugate_function(sp.evaluate(logr, alpha + sigma))
        upd = new - sigma
        size = float(np.max(np.abs(upd)))
        history.append(size)
        if size > prev:
            relax = max(0.5 * relax, 1e-3)
        prev = size
        sigma = sigma + relax * upd
        if size < 1e-15:
            break
        if not np.isfinite(size) or size > 10:
            raise NonConvergence("conformal iteration diverged", history)
    hinv = Diffeo(sigma + sp.evaluate(from_polar.offset, alpha + sigma))
    Z = sp.evaluate(c.z, hinv.values)
    resid = sp.negative_mode_energy(Z, include_constant=True)
    if resid > tol:
        raise NonConvergence(f"conformal residual {resid:.3e} above tolerance", history)
    return Z, hinv


def conformal_parametrization(c, tol=1e-10):
    """Boundary correspondence h with z o h^{-1} holomorphic in the disc."""
    _, hinv = conformal_map(c, tol=tol)
    return hinv.inverse()


def _log_conj_z(c):
    """log(conj(z) e^{i alpha}) as a periodic field."""
    phi = np.unwrap(np.angle(c.z))
    phi = phi - 2 * np.pi * np.round((phi[0] - np.angle(c.z[0])) / (2 * np.pi))
    return np.log(np.abs(c.z)) - 1j * (phi - c.alpha)


def solve_k(c, tol=1e-10, maxiter=20, workspace=None, return_info=False):
    """Solve (I - H) log(conj(z) e^{ik}) = 0 for the real diffeo k.

    The equation is affine in k - alpha, so Newton's method reduces to a
    dense least-squares solve plus iterative refinement. The free constant
    is fixed by requiring F(0) > 0 for the holomorphic extension F of
    conj(z) e^{ik}.
    """
    from .kernels import Workspace

    c = _as_curve(c)
    ws = workspace if workspace is not None else Workspace(c)
    n = c.n
    proj = np.eye(n) - ws.hmat
    op = 1j * proj
    sysmat = np.vstack([op.real, op.imag])
    base = _log_conj_z(c)
    kappa = np.zeros(n)
    history = []
    for it in range(maxiter):
        resid = proj @ (base + 1j * kappa)
        history.append(float(np.max(np.abs(resid))))
        if history[-1] <= tol and it > 0:
            break
        rhs = -np.concatenate([resid.real, resid.imag])
        step, *_ = np.linalg.lstsq(sysmat, rhs, rcond=1e-13)
        kappa = kappa + step
        kappa = kappa - _f0_phase(c, base, kappa)
    else:
        if history[-1] > tol:
            raise NonConvergence(f"k solve residual {history[-1]:.3e}", history)
    k = Diffeo(kappa)
    if return_info:
        return k, {"residuals": history, "iterations": len(history)}
    return k


def _f0_phase(c, base, kappa):
    f_boundary = np.exp(base + 1j * kappa)  # conj(z) e^{ik}
    f0 = sp.trapezoid_integral(f_boundary * c.z_alpha / c.z) / (2j * np.pi)
    return float(np.angle(f0))


def holomorphic_extension_at_origin(c, values):
    """F(0) for F holomorphic inside the curve with boundary values given."""
    c = _as_curve(c)
    return sp.trapezoid_integral(values * c.z_alpha / c.z) / (2j * np.pi)


def log_conj_z_eik(c, k):
    """log(conj(z) e^{ik}) on the grid for a Diffeo k."""
    c = _as_curve(c)
    return _log_conj_z(c) + 1j * k.offset


def curve_to_json(c):
    z = c.z if isinstance(c, ClosedCurve) else np.asarray(c)
    return json.dumps([[float(v.real), float(v.imag)] for v in z])


def curve_from_json(text):
    data = json.loads(text)
    return ClosedCurve(np.array([complex(a, b) for a, b in data]))
