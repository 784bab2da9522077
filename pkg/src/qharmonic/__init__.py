"""Quantum harmonic analysis on a sampled one-dimensional phase space.

Weyl quantisation, cross-Wigner distributions, the symplectic Fourier
transform, Werner's operator convolution and Schatten norms, plus a harness
that certifies the equivalence between L^p norms of band-limited symbols and
Schatten p-norms of their quantisations.
"""

from .errors import (
    DomainError,
    FileFormatError,
    GridAlignmentError,
    GridMismatchError,
    HypothesisViolation,
    InvalidParameterError,
    QHAError,
)
from .operators import (
    OperatorMatrix,
    SchattenValue,
    WindowVector,
    gaussian_window,
    identity_operator,
    parity_conjugate,
    rank_one,
    schatten_norm,
    tf_shift,
    trace,
    translate_operator,
)
from .phase_space import (
    PhaseGrid,
    PhasePoint,
    Region,
    SymbolGrid,
    build_symbol,
    convolve_symbols,
    lp_norm,
    make_grid,
    random_bandlimited_symbol,
    smooth_cutoff,
    symplectic_fourier,
)
from .qha import (
    BoundReport,
    ConstantEstimate,
    check_intertwining,
    estimate_constant,
    op_conv,
    verify_batch,
    verify_bound_chain,
    werner_young_trial,
)
from .weyl import cross_wigner, fourier_weyl, weyl_quantize, weyl_symbol

__version__ = "0.1.0"
