"""Closed-form reference solutions used to verify the solvers.

heat_oracle duplicates the exact dissipative semigroup with independent code
(no shared wavenumber precomputation) so the two implementations can check
each other.  cole_hopf evaluates the classical exact solution of the viscous
quadratic conservation law

    u_t + (u^2)_x = u_xx

on a periodic interval via u = -(log phi)_x with phi solving the heat
equation from phi(0) = exp(-potential(u_0)).
"""

from __future__ import annotations

import numpy as np

from .spectral import SpectralField

__all__ = ["heat_oracle", "cole_hopf"]


def heat_oracle(field: SpectralField, theta: float, t: float) -> SpectralField:
    """Per-mode exact evolution exp(-t |k|^(2*theta)); independent of
    semigroup_apply by construction."""
    if t < 0:
        raise ValueError(f"oracle time must be nonnegative, got {t}")
    grid = field.grid
    modsq = np.zeros(grid.shape)
    for axis, (n, L) in enumerate(zip(grid.modes, grid.periods)):
        m = np.rint(np.fft.fftfreq(n) * n)
        k = (2.0 * np.pi / L) * m
        shape = [1] * grid.dimension
        shape[axis] = n
        modsq = modsq + k.reshape(shape) ** 2
    factor = np.exp(-t * modsq ** float(theta))
    return SpectralField(grid, field.coeffs * factor, field.mean_zero)


def cole_hopf(u0_samples, t: float, refine: int = 4, period: float = 2.0 * np.pi) -> np.ndarray:
    """Exact periodic solution of u_t + (u^2)_x = u_xx at time t >= 0.

    u0_samples are physical samples on a uniform 1D grid with zero mean (the
    potential must be periodic).  The potential is integrated spectrally, the
    heat factor phi = exp(-potential) is evolved on a refine-x finer grid to
    keep exp() alias-free, and the log-derivative is taken spectrally.  Fails
    for max|potential| > 20 where exp() would lose all accuracy.
    """
    u0 = np.asarray(u0_samples, dtype=float)
    if u0.ndim != 1:
        raise ValueError("the exact solution is one-dimensional")
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    n = u0.size
    mean = float(np.mean(u0))
    scale = max(float(np.max(np.abs(u0))), 1e-300)
    if abs(mean) > 1e-12 * scale:
        raise ValueError("initial data must have zero mean")

    c = np.fft.fft(u0) / n
    m = np.rint(np.fft.fftfreq(n) * n)
    k = (2.0 * np.pi / period) * m
    # antiderivative: psi' = u0, zero-mean branch
    with np.errstate(divide="ignore", invalid="ignore"):
        psi_c = np.where(k != 0, c / (1j * np.where(k != 0, k, 1.0)), 0.0)
    psi_c[np.rint(m).astype(int) == -n // 2] = 0.0

    nf = refine * n
    fine = np.zeros(nf, dtype=complex)
    mf = np.rint(np.fft.fftfreq(nf) * nf).astype(int)
    mi = np.rint(m).astype(int)
    pos = mi >= 0
    fine[mi[pos]] = psi_c[pos]
    fine[mi[~pos] + nf] = psi_c[~pos]
    psi = np.fft.ifft(fine * nf).real
    if np.max(np.abs(psi)) > 20.0:
        raise ValueError(
            "potential amplitude exceeds 20; exp() would overflow the "
            "representation (documented limitation)"
        )

    phi0 = np.exp(-psi)
    kf = (2.0 * np.pi / period) * mf.astype(float)
    phi_c = np.fft.fft(phi0) / nf
    phi_c = phi_c * np.exp(-t * kf**2)
    phi = np.fft.ifft(phi_c * nf).real
    phi_x = np.fft.ifft(1j * kf * phi_c * nf).real
    u_fine = -phi_x / phi
    return u_fine[::refine].copy()
