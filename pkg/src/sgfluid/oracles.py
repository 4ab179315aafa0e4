"""Direct O(N^2) double-loop quadratures used to cross-check the kernels.

These deliberately avoid the kernel-splitting used in :mod:`kernels`:
the Hilbert transform is evaluated by singularity subtraction,

    Hf(a) = f(a) + (1/(pi i)) int z_b (f(b) - f(a)) / (z(b) - z(a)) db,

whose integrand is smooth with diagonal value f_a(a). Slow by design.
"""

import numpy as np

from . import spectral as sp


def hilbert(z, f):
    z = np.asarray(z, dtype=complex)
    f = np.asarray(f, dtype=complex)
    n = len(z)
    h = 2 * np.pi / n
    za = sp.derivative(z)
    fa = sp.derivative(f)
    out = np.empty(n, dtype=complex)
    for j in range(n):
        acc = 0.0 + 0.0j
        for l in range(n):
            if l == j:
                acc += fa[j]
            else:
                acc += za[l] * (f[l] - f[j]) / (z[l] - z[j])
        out[j] = f[j] + h / (np.pi * 1j) * acc
    return out


def conj_hilbert(z, f):
    return np.conj(hilbert(z, np.conj(np.asarray(f, dtype=complex))))


def commutator(z, f, g):
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    return f * hilbert(z, g) - hilbert(z, f * g)


def bracket_two(z, f, g):
    z = np.asarray(z, dtype=complex)
    f = np.asarray(f, dtype=complex)
    za = sp.derivative(z)
    ga = sp.derivative(np.asarray(g, dtype=complex))
    u = ga / za
    v = ga / np.conj(za)
    return (f * (hilbert(z, u) + conj_hilbert(z, v))
            - hilbert(z, f * u) - conj_hilbert(z, f * v))


def quad_kernel(z, velocity, f):
    z = np.asarray(z, dtype=complex)
    v = np.asarray(velocity, dtype=complex)
    n = len(z)
    h = 2 * np.pi / n
    za = sp.derivative(z)
    va = sp.derivative(v)
    fb = sp.derivative(np.asarray(f, dtype=complex))
    out = np.empty(n, dtype=complex)
    for j in range(n):
        acc = 0.0 + 0.0j
        for l in range(n):
            if l == j:
                k = (va[j] / za[j]) ** 2
            else:
                k = ((v[l] - v[j]) / (z[l] - z[j])) ** 2
            acc += k * fb[l]
        out[j] = h / (np.pi * 1j) * acc
    return out


def csc_form(f):
    f = np.asarray(f, dtype=complex)
    n = len(f)
    a = sp.grid(n)
    fa = sp.derivative(f)
    out = np.empty(n)
    for j in range(n):
        acc = 0.0
        for l in range(n):
            if l == j:
                acc += 4 * abs(fa[j]) ** 2
            else:
                acc += abs(f[l] - f[j]) ** 2 / np.sin(0.5 * (a[l] - a[j])) ** 2
        out[j] = acc * (2 * np.pi / n) / (8 * np.pi)
    return out


def kstar_matrix(z, measure="arclength"):
    """Dense K* assembled entry by entry from the subtraction form of K."""
    z = np.asarray(z, dtype=complex)
    n = len(z)
    eye = np.eye(n)
    kmat = np.empty((n, n))
    for l in range(n):
        kmat[:, l] = hilbert(z, eye[l]).real
    kt = kmat.T
    if measure == "uniform":
        return kt
    s = np.abs(sp.derivative(z))
    return kt * s[None, :] / s[:, None]
