"""Uniform periodic grids, Fourier multipliers and trapezoid quadrature.

Fields are plain 1-D numpy arrays of N samples at alpha_j = 2*pi*j/N.
Fourier coefficients follow ``c_n = fft(f)[n] / N`` so that
``f(alpha) = sum_n c_n exp(i n alpha)``. For even N the mode -N/2 is
counted as negative.
"""

import numpy as np

MIN_POINTS = 16


def as_field(f, dtype=complex):
    """Validate and return ``f`` as a periodic field array."""
    f = np.asarray(f, dtype=dtype)
    if f.ndim != 1:
        raise ValueError("periodic fields must be one-dimensional")
    n = f.size
    if n < MIN_POINTS or n % 2:
        raise ValueError(f"grid size must be even and >= {MIN_POINTS}, got {n}")
    if not np.all(np.isfinite(f)):
        raise ValueError("periodic field contains NaN or Inf")
    return f


def grid(n):
    return 2 * np.pi * np.arange(n) / n


def modes(n):
    """Integer wavenumbers in fft order, -N/2 treated as negative."""
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(int)


def coefficients(f):
    return np.fft.fft(f) / len(f)


def from_coefficients(c):
    return np.fft.ifft(c) * len(c)


def apply_multiplier(f, symbol):
    """Apply a Fourier multiplier given as an array in fft order."""
    return np.fft.ifft(np.fft.fft(f) * symbol)


def derivative(f, order=1):
    """Spectral derivative. The Nyquist mode is dropped for odd orders."""
    n = len(f)
    k = modes(n).astype(float)
    if order % 2:
        k[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(f) * (1j * k) ** order)
    return out.real if np.isrealobj(f) else out


def antiderivative(f):
    """Zero-mean periodic antiderivative of the non-constant part of ``f``."""
    n = len(f)
    k = modes(n).astype(float)
    sym = np.zeros(n, dtype=complex)
    nz = k != 0
    sym[nz] = 1.0 / (1j * k[nz])
    sym[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(f) * sym)
    return out.real if np.isrealobj(f) else out


def circle_hilbert_symbol(n):
    """+1 for modes n >= 0, -1 for n < 0 (so constants are fixed)."""
    return np.where(modes(n) >= 0, 1.0, -1.0)


def circle_hilbert(f):
    """Hilbert transform of the unit circle.

    Fixes boundary values of functions holomorphic in the disc (including
    constants) and negates anti-holomorphic modes.
    """
    return np.fft.ifft(np.fft.fft(f) * circle_hilbert_symbol(len(f)))


def conjugate_function(u):
    """Harmonic conjugate on the circle: multiplier -i sgn(n), mean zero.

    For real ``u`` this returns real ``v`` with ``u + i v`` holomorphic in
    the disc and ``v`` of zero mean.
    """
    n = len(u)
    sym = -1j * np.sign(modes(n))
    sym[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(u) * sym)
    return out.real if np.isrealobj(u) else out


def circle_hilbert_matrix(n):
    """Dense matrix of :func:`circle_hilbert` (circulant)."""
    col = np.fft.ifft(circle_hilbert_symbol(n))
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return col[idx]


def trapezoid_integral(f):
    """(2 pi / N) * sum(f); spectrally accurate for smooth periodic f."""
    return 2 * np.pi * np.mean(f)


def mean(f):
    return np.mean(f)


def project_modes(f, keep):
    """Zero every Fourier mode for which ``keep(mode)`` is False."""
    n = len(f)
    mask = keep(modes(n))
    out = np.fft.ifft(np.fft.fft(f) * mask)
    return out


def holomorphic_part(f, include_constant=True):
    """Part of ``f`` with modes n >= 0 (n >= 1 if not include_constant)."""
    lo = 0 if include_constant else 1
    return project_modes(f, lambda k: k >= lo)


def negative_mode_energy(f, include_constant=False):
    """Sum of |c_n|^2 over n < 0 (n <= 0 if include_constant)."""
    c = coefficients(f)
    k = modes(len(f))
    sel = k <= 0 if include_constant else k < 0
    return float(np.sum(np.abs(c[sel]) ** 2))


def dealias(f, fraction=2.0 / 3.0):
    """2/3-rule truncation: keep |n| <= fraction * N / 2, drop -N/2."""
    n = len(f)
    k = modes(n)
    keep = (np.abs(k) <= fraction * n / 2) & (k != -n // 2)
    out = np.fft.ifft(np.fft.fft(f) * keep)
    return out.real if np.isrealobj(f) else out


def interpolation_matrix(n, x):
    """Matrix evaluating the trigonometric interpolant of N samples at ``x``.

    The Nyquist mode is split symmetrically, so real samples interpolate to
    real values.
    """
    x = np.asarray(x, dtype=float)
    k = modes(n).astype(float)
    phase = np.exp(1j * np.outer(x, k))
    phase[:, n // 2] = np.cos(0.5 * n * x)
    # columns act on coefficients; fold in the forward DFT
    dft = np.exp(-1j * np.outer(k, grid(n))) / n
    return phase @ dft


def evaluate(f, x):
    """Evaluate the trigonometric interpolant of ``f`` at points ``x``."""
    n = len(f)
    x = np.asarray(x, dtype=float)
    c = coefficients(f)
    k = modes(n).astype(float)
    phase = np.exp(1j * np.outer(x, k))
    phase[:, n // 2] = np.cos(0.5 * n * x)
    out = phase @ c
    return out.real if np.isrealobj(f) else out


def resample(f, m):
    """Band-limited resampling of ``f`` onto a uniform grid of size m >= N."""
    n = len(f)
    c = coefficients(f)
    k = modes(n)
    cm = np.zeros(m, dtype=complex)
    for kk, cc in zip(k, c):
        if kk == -n // 2:
            cm[-n // 2] += 0.5 * cc
            cm[n // 2] += 0.5 * cc
        else:
            cm[kk % m] += cc
    out = from_coefficients(cm)
    return out.real if np.isrealobj(f) else out


def sup_norm(f, oversample=8, refine=True):
    """Sup norm of the trigonometric interpolant, not just of the samples.

    The maximum of |f| on an oversampled grid is refined by Newton steps on
    d/dx |f|^2, which matters when comparing norms of fields sampled at
    different points.
    """
    n = len(f)
    fine = resample(np.asarray(f, dtype=complex), oversample * n)
    j = int(np.argmax(np.abs(fine)))
    best = float(np.abs(fine[j]))
    if not refine or best == 0.0:
        return best
    c = coefficients(np.asarray(f, dtype=complex))
    k = modes(n).astype(float)
    k[n // 2] = 0.0
    c = c.copy()
    c[n // 2] = 0.0
    x = 2 * np.pi * j / (oversample * n)
    for _ in range(20):
        e = np.exp(1j * k * x)
        v = np.dot(e, c)
        d1 = np.dot(e, 1j * k * c)
        d2 = np.dot(e, -(k ** 2) * c)
        g = 2 * np.real(np.conj(v) * d1)
        gp = 2 * (np.abs(d1) ** 2 + np.real(np.conj(v) * d2))
        if gp >= 0:
            break
        dx = -g / gp
        x += dx
        if abs(dx) < 1e-15:
            break
    val = float(np.abs(np.dot(np.exp(1j * k * x), c) + (coefficients(
        np.asarray(f, dtype=complex))[n // 2] * np.cos(0.5 * n * x))))
    return max(best, val)
