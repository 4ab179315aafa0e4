"""Self-gravity of a uniform patch and the boundary form of its force.

The gradient of the Newtonian potential with Laplacian 2*pi inside the
fluid is identified with the complex number d1(phi) + i d2(phi).
"""

from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .curves import _as_curve
from .errors import PointOnBoundary
from .kernels import Workspace


@dataclass(frozen=True)
class GravityField:
    points: np.ndarray
    values: np.ndarray


def _fine_curve(c, min_spacing):
    n = c.n
    length = float(np.sum(np.abs(c.z_alpha))) * 2 * np.pi / n
    m = n
    while length / m > min_spacing and m < 32768:
        m *= 2
    z = sp.resample(c.z, m)
    return z, sp.derivative(z)


def grad_phi_oracle(c, points, boundary_tol=None):
    """grad(phi)(x) = iint (x - y)/|x - y|^2 dy by polar decomposition about x.

    In polar coordinates centred at x the radial integral is exact, leaving
    -int R(theta) e^{i theta} d theta. Substituting the boundary parameter
    for theta gives -int (z - x) Im(z_a / (z - x)) da, which stays valid
    (as a signed sum over ray crossings) for exterior points. The angular
    integral is done by the trapezoid rule on a curve resampled finely
    enough for the distance of x to the boundary.
    """
    c = _as_curve(c)
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    tol = boundary_tol if boundary_tol is not None else 1e-3 * (2 * np.pi / c.n)
    zc, zac = _fine_curve(c, np.inf)
    vals = np.empty(len(pts), dtype=complex)
    for i, x in enumerate(pts):
        dist = float(np.min(np.abs(zc - x)))
        if dist <= tol:
            raise PointOnBoundary(f"point {x} is within {dist:.2e} of the boundary")
        z, za = _fine_curve(c, dist / 6.0)
        w = z - x
        integrand = -w * np.imag(za / w)
        vals[i] = sp.trapezoid_integral(integrand)
    return GravityField(points=pts, values=vals)


def boundary_gravity(c, workspace=None):
    """Reduced boundary gravity -(pi/2)(I - conj H) z."""
    ws = workspace if workspace is not None else Workspace(c)
    z = ws.curve.z
    return -0.5 * np.pi * (z - ws.conj_hilbert(z))


def _extrapolation_weights(nodes):
    """Lagrange weights for the value at 0 from samples at ``nodes``."""
    nodes = np.asarray(nodes, dtype=float)
    w = np.ones(len(nodes))
    for i, xi in enumerate(nodes):
        for j, xj in enumerate(nodes):
            if i != j:
                w[i] *= xj / (xj - xi)
    return w


def interior_limit(c, offsets_in_cells=1.0, levels=4):
    """grad(phi) on the boundary, by polynomial extrapolation from inside.

    Evaluates the oracle at inward normal offsets d, 2d, ..., levels*d with
    d = offsets_in_cells * 2pi/N and extrapolates to 0; the error is
    O(d^levels).
    """
    c = _as_curve(c)
    d = offsets_in_cells * 2 * np.pi / c.n
    inward = 1j * c.z_alpha / np.abs(c.z_alpha)
    nodes = np.arange(1, levels + 1)
    w = _extrapolation_weights(nodes)
    return sum(wi * grad_phi_oracle(c, c.z + s * d * inward).values
               for wi, s in zip(w, nodes))


def reduction_check(c):
    """Sup-norm gap between -(pi/2)(I - conj H) z and -grad(phi) on the boundary."""
    c = _as_curve(c)
    return float(np.max(np.abs(boundary_gravity(c) + interior_limit(c))))


def circulation(c, center, radius, m=256):
    """Circulation of grad(phi) around a small circle (should vanish)."""
    th = sp.grid(m)
    pts = center + radius * np.exp(1j * th)
    g = grad_phi_oracle(c, pts).values
    tangent = 1j * radius * np.exp(1j * th)
    return float(np.real(sp.trapezoid_integral(np.conj(g) * tangent)))


def laplacian(c, x, step=1e-3):
    """Five-point divergence of grad(phi) at x (2 pi inside, 0 outside)."""
    offs = np.array([step, -step, 1j * step, -1j * step])
    g = grad_phi_oracle(c, x + offs).values
    return float((g[0].real - g[1].real + g[2].imag - g[3].imag) / (2 * step))
