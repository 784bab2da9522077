"""
Truncating a symbol in frequency
================================

Cutting the spectrum of a symbol at growing radii gives approximants whose
quantizations converge in operator norm.
"""

import math

import qharmonic as qh

grid = qh.PhaseGrid(256, 8.0)
tau = qh.random_bandlimited_symbol(grid, qh.Region.disc(2.0), seed=9)
F = qh.symplectic_fourier(tau)
L = qh.weyl_quantize(tau)

for n in range(1, 7):
    r = 0.3 * n
    tau_n = qh.symplectic_fourier(F * qh.smooth_cutoff(grid, qh.Region.disc(r), 0.25))
    op = qh.schatten_norm(L - qh.weyl_quantize(tau_n), math.inf).value
    sup = qh.lp_norm(tau - tau_n, math.inf)
    print(f"radius {r:.1f}: operator error {op:.3e}, symbol sup error {sup:.3e}")
