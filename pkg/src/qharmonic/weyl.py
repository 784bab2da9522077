"""Weyl quantisation, its inverse, the cross-Wigner distribution and the
Fourier-Weyl transform on the sampled phase space.

The kernel of the Weyl quantisation is

    K(x, y) = integral tau((x + y)/2, xi) exp(2 pi i xi (x - y)) dxi.

On the grid, ``x - y`` is taken as the wrapped difference ``d`` in
``[-N/2, N/2)`` steps and the midpoint ``y + d/2`` falls on the half-spaced
refinement of the position axis. Symbols are evaluated there by band-limited
(FFT) interpolation. The map is exactly invertible on symbols whose position
spectrum has no Nyquist component, and under it the plane wave
``exp(-2 pi i sigma(w, .))`` quantises to the time-frequency shift ``rho(w)``
for every grid point ``w`` away from the window edge.
"""

import numpy as np

from .operators import OperatorMatrix, WindowVector
from .phase_space import SymbolGrid, _same_grid

__all__ = ["cross_wigner", "weyl_quantize", "weyl_symbol", "fourier_weyl"]


def _half_step(a, direction=1):
    """Band-limited shift of ``a`` by half a sample along axis 0.

    The Nyquist bin is dropped: after a half-sample shift it carries no
    information that survives in both directions.
    """
    n = a.shape[0]
    f = np.fft.fftfreq(n)
    ramp = np.exp(1j * np.pi * direction * f)
    ramp[n // 2] = 0.0
    shape = (n,) + (1,) * (a.ndim - 1)
    return np.fft.ifft(np.fft.fft(a, axis=0) * ramp.reshape(shape), axis=0)


def _upsample(a):
    """Samples on the half-spaced grid: even rows are ``a``, odd rows sit halfway."""
    out = np.empty((2 * a.shape[0],) + a.shape[1:], dtype=np.complex128)
    out[0::2] = a
    out[1::2] = _half_step(a, +1)
    return out


def _wrapped_indices(n):
    """Index arrays ``(i, j, d, u)`` with ``d`` the wrapped difference ``i - j``
    in ``[-n/2, n/2)`` and ``u = 2j + d`` the half-grid midpoint index."""
    i, j = np.indices((n, n))
    d = (i - j + n // 2) % n - n // 2
    u = (2 * j + d) % (2 * n)
    return i, j, d, u


def _sign(n):
    return 1 - 2 * (np.arange(n) % 2)


def weyl_quantize(tau: SymbolGrid) -> OperatorMatrix:
    """Kernel of ``L_tau``, assembled slice by slice from the symbol."""
    g = tau.grid
    n = g.N
    up = _upsample(tau.values)
    # F[u, d] = dxi * sum_k tau_up[u, k] exp(2 pi i xi_k d dx)
    F = g.dxi * n * np.fft.ifft(up, axis=1) * _sign(n)[None, :]
    i, j, d, u = _wrapped_indices(n)
    return OperatorMatrix(g, F[u, d % n])


def _symbol_from_slices(S, dx):
    """``dx * sum_d S[i, d] exp(-2 pi i xi_k d dx)`` for the centered xi grid."""
    n = S.shape[1]
    return dx * np.fft.fft(S * _sign(n)[None, :], axis=1)


def weyl_symbol(T: OperatorMatrix) -> SymbolGrid:
    """Inverse of :func:`weyl_quantize`:
    ``tau(x, xi) = integral K(x + t/2, x - t/2) exp(-2 pi i xi t) dt``."""
    g = T.grid
    n = g.N
    i, j, d, u = _wrapped_indices(n)
    F = np.zeros((2 * n, n), dtype=np.complex128)
    F[u, d % n] = T.kernel
    odd = (np.arange(n) % 2).astype(bool)
    S = F[0::2].copy()
    # odd differences have odd midpoints; move them back onto the grid
    S[:, odd] = _half_step(F[1::2][:, odd], -1)
    return SymbolGrid(g, _symbol_from_slices(S, g.dx))


def cross_wigner(psi: WindowVector, phi: WindowVector) -> SymbolGrid:
    """``W(psi, phi)(x, xi) = integral phi(x + t/2) conj(psi(x - t/2)) exp(-2 pi i xi t) dt``.

    Both windows are interpolated to the half grid and the ``t``-slices are
    transformed with one FFT per position.
    """
    _same_grid(psi.grid, phi.grid)
    g = psi.grid
    n = g.N
    phi_up = _upsample(phi.values)
    psi_up = _upsample(psi.values)
    i = np.arange(n)[:, None]
    m = (np.arange(n)[None, :] + n // 2) % n - n // 2
    S = phi_up[(2 * i + m) % (2 * n)] * psi_up[(2 * i - m) % (2 * n)].conj()
    return SymbolGrid(g, _symbol_from_slices(S, g.dx))


def fourier_weyl(T: OperatorMatrix) -> SymbolGrid:
    """Fourier-Weyl transform ``F_W(T)(z) = tr(T rho(-z))`` at every grid point.

    Grouping the trace by shift-diagonals turns it into one FFT per
    diagonal, ``O(N^2 log N)`` in total.
    """
    g = T.grid
    n = g.N
    M = g.dx * T.kernel
    a = np.arange(n) - n // 2
    jj = np.arange(n)
    D = M[(jj[None, :] + a[:, None]) % n, jj[None, :]]
    Q = np.fft.fftshift(np.fft.fft(D, axis=1), axes=1)
    b = a
    phase = np.exp(-1j * np.pi * np.outer(a, b) / n) * _sign(n)[None, :] * (-1) ** (n // 2)
    return SymbolGrid(g, phase * Q)
