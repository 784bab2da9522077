"""
Convolving two operators
========================

The convolution of two operators is a function on phase space. For
quantized symbols it is the ordinary convolution of the symbols.
"""

import math

import numpy as np

import qharmonic as qh
from qharmonic.phase_space import rng_for
from qharmonic.qha import random_low_rank_operator

grid = qh.PhaseGrid(64, 4.0)
rng = rng_for(1)
T = random_low_rank_operator(grid, rng, rank=3)
S = random_low_rank_operator(grid, rng, rank=3)

# %%
# Direct trace evaluation against the FFT path.
direct = qh.op_conv(T, S, "direct").values
fast = qh.op_conv(T, S, "fast").values
print("direct vs fast:", np.abs(direct - fast).max() / np.abs(direct).max())

# %%
# Integrating over phase space gives the product of the traces.
print("integral:", grid.cell_area * direct.sum())
print("tr T tr S:", qh.trace(T) * qh.trace(S))

# %%
# Two band-limited symbols: operator side against function side.
region = qh.Region.disc(1.2)
a = qh.random_bandlimited_symbol(grid, region, 5, index=0, margin=0.25)
b = qh.random_bandlimited_symbol(grid, region, 5, index=1, margin=0.25)
rep = qh.check_intertwining(a, b, "direct", region=region)
print("L_a * L_b vs a * b, relative sup error:", rep.lhs)

# %%
# Young's inequality with Schatten norms, 50 random pairs per triple.
for triple in [(1, 1, 1), (1, 2, 2), (2, 2, math.inf)]:
    r = qh.werner_young_trial(*triple, trials=50, seed=0, grid=grid)
    print(triple, "violations:", r.violations, "largest lhs/rhs:", float(np.max(r.lhs / r.rhs)))
