"""Curve Hilbert transform and the singular operators built on it.

The Hilbert transform of the curve z is

    Hf(a) = (1/(pi i)) p.v. int_0^{2pi} z_b(b) f(b) / (z(b) - z(a)) db,

normalized so that boundary values of functions holomorphic inside the
curve are fixed (H1 = 1). It is discretized by kernel splitting:

    z_b / (z(b) - z(a)) = (1/2) cot((b - a)/2) + i/2 + R(a, b),

where the first two pieces together give the unit-circle multiplier and
the remainder R is smooth with R(a, a) = z_aa / (2 z_a) - i/2. All
operators are assembled as dense N x N matrices; N <= 1024 is the design
range.
"""

from functools import lru_cache

import numpy as np

from . import spectral as sp
from .curves import ClosedCurve, _as_curve
from .errors import SingularSystem


def _offdiag_angles(n):
    a = sp.grid(n)
    d = a[None, :] - a[:, None]  # beta - alpha, rows index alpha
    np.fill_diagonal(d, 1.0)
    return d


@lru_cache(maxsize=8)
def _grid_tables(n):
    """Curve-independent tables: (1/2)cot, csc^2 of half differences, circle H."""
    d = _offdiag_angles(n)
    half_cot = 0.5 / np.tan(0.5 * d)
    csc2 = 1.0 / np.sin(0.5 * d) ** 2
    np.fill_diagonal(half_cot, 0.0)
    np.fill_diagonal(csc2, 0.0)
    for arr in (half_cot, csc2):
        arr.setflags(write=False)
    ch = sp.circle_hilbert_matrix(n)
    ch.setflags(write=False)
    return half_cot, csc2, ch


class Workspace:
    """Kernel tables for one curve, reused across operator applications."""

    def __init__(self, curve):
        self.curve = _as_curve(curve)
        c = self.curve
        n = c.n
        self.n = n
        self.h = 2 * np.pi / n
        z = c.z
        za = c.z_alpha
        diff = z[None, :] - z[:, None]
        np.fill_diagonal(diff, 1.0)
        self.diff = diff
        half_cot, _, circle = _grid_tables(n)
        rem = za[None, :] / diff - half_cot - 0.5j
        np.fill_diagonal(rem, 0.5 * c.z_alpha2 / za - 0.5j)
        self.hmat = circle + (self.h / (np.pi * 1j)) * rem

    # -- transforms -------------------------------------------------------
    def hilbert(self, f):
        return self.hmat @ np.asarray(f, dtype=complex)

    def conj_hilbert(self, f):
        return np.conj(self.hmat @ np.conj(np.asarray(f, dtype=complex)))

    def commutator(self, f, g):
        """[f, H] g = f Hg - H(fg)."""
        f = np.asarray(f, dtype=complex)
        g = np.asarray(g, dtype=complex)
        return f * self.hilbert(g) - self.hilbert(f * g)

    def commutator_difference(self, f, g):
        """[f, H] g from the difference kernel (f(a) - f(b)) / (z(b) - z(a)).

        Same operator as :meth:`commutator`, but with a smooth kernel and no
        cancellation, which is preferable when ``f`` is small.
        """
        f = np.asarray(f, dtype=complex)
        g = np.asarray(g, dtype=complex)
        za = self.curve.z_alpha
        ker = (f[:, None] - f[None, :]) / self.diff * za[None, :]
        np.fill_diagonal(ker, -sp.derivative(f))
        return (self.h / (np.pi * 1j)) * (ker @ g)

    def bracket_two(self, f, g):
        """[f, H 1/z_a + conj(H) 1/conj(z_a)] d_a g."""
        f = np.asarray(f, dtype=complex)
        ga = sp.derivative(np.asarray(g, dtype=complex))
        za = self.curve.z_alpha
        u = ga / za
        v = ga / np.conj(za)
        return (f * (self.hilbert(u) + self.conj_hilbert(v))
                - self.hilbert(f * u) - self.conj_hilbert(f * v))

    def quad_kernel(self, velocity, f):
        """(1/(pi i)) int ((v(b) - v(a)) / (z(b) - z(a)))^2 f_b(b) db."""
        v = np.asarray(velocity, dtype=complex)
        za = self.curve.z_alpha
        ker = ((v[None, :] - v[:, None]) / self.diff) ** 2
        np.fill_diagonal(ker, (sp.derivative(v) / za) ** 2)
        fb = sp.derivative(np.asarray(f, dtype=complex))
        return (self.h / (np.pi * 1j)) * (ker @ fb)

    # -- double-layer type real operator ----------------------------------
    @property
    def kmat(self):
        """K = Re H acting on real functions."""
        return self.hmat.real

    def kstar_matrix(self, measure="arclength"):
        """Formal adjoint of K.

        ``measure="arclength"`` takes the adjoint in the inner product
        int u v |z_a| da; ``"uniform"`` in int u v da. The two agree on the
        circle.
        """
        kt = self.kmat.T
        if measure == "uniform":
            return kt
        if measure != "arclength":
            raise ValueError(f"unknown measure {measure!r}")
        s = np.abs(self.curve.z_alpha)
        return kt * s[None, :] / s[:, None]

    def k_star_solve(self, y, measure="arclength", tol=1e-10, max_cond=1e12):
        y = np.asarray(y, dtype=float)
        # The grid Nyquist mode is a spurious -1 eigenvector of K (the circle
        # multiplier sends it to -1); shift it out of the kernel.
        nyq = (-1.0) ** np.arange(self.n)
        mat = (np.eye(self.n) + self.kstar_matrix(measure)
               + np.outer(nyq, nyq) / self.n)
        cond = np.linalg.cond(mat)
        if not np.isfinite(cond) or cond > max_cond:
            raise SingularSystem(f"(I + K*) condition number {cond:.3e}")
        x = np.linalg.solve(mat, y)
        for _ in range(3):
            r = y - mat @ x
            if np.max(np.abs(r)) <= tol:
                break
            x = x + np.linalg.solve(mat, r)
        return x


def _ws(c):
    return c if isinstance(c, Workspace) else Workspace(c)


def curve_hilbert(c, f):
    return _ws(c).hilbert(f)


def conj_hilbert(c, f):
    return _ws(c).conj_hilbert(f)


def commutator(c, f, g):
    return _ws(c).commutator(f, g)


def bracket_two(c, f, g):
    return _ws(c).bracket_two(f, g)


def quad_kernel(c, velocity, f):
    return _ws(c).quad_kernel(velocity, f)


def k_star_solve(c, y, measure="arclength"):
    return _ws(c).k_star_solve(y, measure=measure)


def csc_form(f):
    """S(f)(a) = (1/8pi) int |f(b) - f(a)|^2 csc^2((b - a)/2) db (real)."""
    f = np.asarray(f, dtype=complex)
    n = len(f)
    _, csc2, _ = _grid_tables(n)
    df = f[None, :] - f[:, None]
    ker = (df.real ** 2 + df.imag ** 2) * csc2
    ker.flat[::n + 1] = 4 * np.abs(sp.derivative(f)) ** 2
    return (2 * np.pi / n) / (8 * np.pi) * ker.sum(axis=1)


def g_forcing(Z, Zt, omega0, workspace=None):
    """G = (pi/2)(I + H) conj(Z) - 2 i w conj(Z_t), all in the disc variable."""
    ws = workspace if workspace is not None else Workspace(ClosedCurve(Z))
    zb = np.conj(Z)
    return 0.5 * np.pi * (zb + ws.hilbert(zb)) - 2j * omega0 * np.conj(Zt)


def e_operator(c, f, workspace=None):
    """Candidate for the cubic remainder operator E.

    E(f) := z [f, H](f_a / z_a) - (H + conj H) f + 2 mean(f). This is a
    reconstruction, not an established definition; see
    :func:`sgfluid.identities.e_validation_residual`.
    """
    ws = workspace if workspace is not None else _ws(c)
    f = np.asarray(f, dtype=complex)
    curve = ws.curve
    fa = sp.derivative(f)
    return (curve.z * ws.commutator(f, fa / curve.z_alpha)
            - ws.hilbert(f) - ws.conj_hilbert(f) + 2 * np.mean(f))


class EOperator:
    """Pluggable interface: ``E(workspace, f) -> field``."""

    def __call__(self, workspace, f):
        return e_operator(None, f, workspace=workspace)


default_e = EOperator()
