"""
Symbols, kernels and Wigner functions
=====================================

Quantize a phase-space function, read the symbol back, and look at the
Gaussian that becomes a rank-one projector.
"""

import numpy as np

import qharmonic as qh

grid = qh.PhaseGrid(256, 8.0)
print(grid, "dx =", grid.dx, "dxi =", grid.dxi)

# %%
# A random symbol whose symplectic Fourier transform lives in a disc.
region = qh.Region.disc(2.0)
tau = qh.random_bandlimited_symbol(grid, region, seed=0)
L = qh.weyl_quantize(tau)
back = qh.weyl_symbol(L)
err = np.linalg.norm(back.values - tau.values) / np.linalg.norm(tau.values)
print("round trip error:", err)

# %%
# Hilbert-Schmidt norm of the operator equals the L^2 norm of the symbol.
print("||L_tau||_S2 =", qh.schatten_norm(L, 2).value, " ||tau||_2 =", qh.lp_norm(tau, 2))

# %%
# 2 exp(-2 pi |z|^2) is the symbol of the projector onto phi_0.
proj = qh.build_symbol(grid, {"kind": "gaussian", "amplitude": 2.0, "width": 2**-0.5})
s = qh.schatten_norm(qh.weyl_quantize(proj), 1).singular_values
print("projector singular values:", s[:3])

phi0 = qh.gaussian_window(grid)
W = qh.cross_wigner(phi0, phi0)
print("max |W(phi0, phi0) - symbol|:", np.abs(W.values - proj.values).max())

# %%
# Quantization and Fourier-Weyl transform commute with the symplectic transform.
lhs = qh.fourier_weyl(L).values
rhs = qh.symplectic_fourier(tau).values
print("F_W(L_tau) vs F_sigma(tau):", np.abs(lhs - rhs).max() / np.abs(rhs).max())
