"""
Symbol norms against operator norms
===================================

For a band-limited symbol, the L^p norm of the symbol and the Schatten
p-norm of its quantization control each other. One direction has a
computable constant; the other is estimated from samples.
"""

import math

import qharmonic as qh
from qharmonic.qha import cutoff_certificate

grid = qh.PhaseGrid(256, 8.0)
region = qh.Region.disc(2.0)

# %%
# The constant of the lower bound is the trace norm of the quantized
# transform of a smooth cutoff equal to 1 on the region.
cert = cutoff_certificate(grid, region, margin=0.5)
print("certificate ||L_{F Psi}||_S1 =", cert.trace_norm)

# %%
tau = qh.random_bandlimited_symbol(grid, region, seed=3)
for p in (1, 2, math.inf):
    lower, young = qh.verify_bound_chain(tau, region, p, certificate=cert)
    print(f"p={p}: {lower.lhs:.4g} <= {lower.rhs:.4g} ({lower.passed}),"
          f" smoothing step {young.lhs:.4g} <= {young.rhs:.4g} ({young.passed})")

# %%
# Upper direction: ratio of the Schatten norm to the smoothed symbol norm.
for N in (128, 256):
    est = qh.estimate_constant(region, math.inf, 20, 0, qh.PhaseGrid(N, 8.0))
    print(f"N={N}: ratio min {est.min:.3f} mean {est.mean:.3f} max {est.max:.3f}")
