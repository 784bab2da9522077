"""Discretized operators on L^2(R).

An operator is stored through its integral kernel sampled on the position
grid, ``K[i, j] ~ K(x_i, x_j)``, and acts by the rectangle rule

    (T f)(x_i) = dx * sum_j K[i, j] f(x_j).

This single convention fixes everything else: the trace is
``dx * sum_i K[i, i]``, composition is ``dx * K_S @ K_T``, and the singular
values of the operator are ``dx`` times those of the array ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridAlignmentError, GridMismatchError, InvalidParameterError
from .phase_space import PhaseGrid, PhasePoint, _same_grid, parse_exponent

__all__ = [
    "WindowVector",
    "OperatorMatrix",
    "SchattenValue",
    "gaussian_window",
    "tf_shift",
    "parity_conjugate",
    "translate_operator",
    "rank_one",
    "trace",
    "schatten_norm",
    "identity_operator",
]

# singular values below this fraction of the largest count as zero for rank
RANK_TOL = 1e-12


def _readonly(a, dtype=np.complex128):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WindowVector:
    """Samples ``f(x_j)`` of a function on the position grid."""

    grid: PhaseGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = _readonly(self.values)
        if v.shape != (self.grid.N,):
            raise InvalidParameterError(f"expected {self.grid.N} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidParameterError("window samples must be finite")
        object.__setattr__(self, "values", v)

    def inner(self, other: "WindowVector") -> complex:
        """Quadrature inner product, conjugate-linear in ``other``."""
        _same_grid(self.grid, other.grid)
        return complex(self.grid.dx * np.vdot(other.values, self.values))

    def norm(self) -> float:
        return float(np.sqrt(self.grid.dx) * np.linalg.norm(self.values))

    def normalized(self) -> "WindowVector":
        return WindowVector(self.grid, self.values / self.norm())


@dataclass(frozen=True)
class OperatorMatrix:
    """Sampled integral kernel of an operator (see module docstring)."""

    grid: PhaseGrid
    kernel: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = _readonly(self.kernel)
        n = self.grid.N
        if k.shape != (n, n):
            raise InvalidParameterError(f"kernel must have shape {(n, n)}, got {k.shape}")
        if not np.all(np.isfinite(k)):
            raise InvalidParameterError("kernel entries must be finite")
        object.__setattr__(self, "kernel", k)

    @property
    def matrix(self) -> np.ndarray:
        """The matrix acting on sample vectors, ``dx * K``."""
        return self.grid.dx * self.kernel

    def apply(self, f: WindowVector) -> WindowVector:
        _same_grid(self.grid, f.grid)
        return WindowVector(self.grid, self.matrix @ f.values)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, self.kernel.conj().T)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _same_grid(self.grid, other.grid)
        return OperatorMatrix(self.grid, self.grid.dx * (self.kernel @ other.kernel))

    def __add__(self, other):
        _same_grid(self.grid, other.grid)
        return OperatorMatrix(self.grid, self.kernel + other.kernel)

    def __sub__(self, other):
        _same_grid(self.grid, other.grid)
        return OperatorMatrix(self.grid, self.kernel - other.kernel)

    def __mul__(self, c):
        return OperatorMatrix(self.grid, c * self.kernel)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SchattenValue:
    """A Schatten norm together with the singular values it came from."""

    p: float
    value: float
    singular_values: np.ndarray = field(repr=False)
    rank: int

    def __float__(self):
        return self.value


def identity_operator(grid: PhaseGrid) -> OperatorMatrix:
    """The discrete identity, kernel ``I / dx``."""
    return OperatorMatrix(grid, np.eye(grid.N) / grid.dx)


def gaussian_window(grid: PhaseGrid, center=(0.0, 0.0), width: float = 1.0) -> WindowVector:
    """``2^(1/4) w^(-1/2) exp(-pi (t - x0)^2 / w^2) exp(2 pi i xi0 t)``.

    With the defaults this is the L^2-normalized Gaussian ``phi_0``.
    """
    x0, xi0 = center
    t = grid.x
    v = 2**0.25 / math.sqrt(width) * np.exp(-np.pi * (t - x0) ** 2 / width**2)
    return WindowVector(grid, v * np.exp(2j * np.pi * xi0 * t))


def _shift_steps(grid, x, mode):
    a = x / grid.dx
    if mode == "snapped":
        if abs(a - round(a)) > 1e-12 * max(1.0, abs(a)):
            raise GridAlignmentError(f"x = {x} is not a multiple of dx = {grid.dx}")
        return int(round(a))
    if mode == "interpolated":
        return a
    raise InvalidParameterError(f"unknown shift mode {mode!r}")


def _shift_columns(v, a, axis=0):
    """Translate samples by ``a`` grid steps along ``axis`` (periodic)."""
    if isinstance(a, int):
        return np.roll(v, a, axis=axis)
    n = v.shape[axis]
    ramp = np.exp(-2j * np.pi * np.fft.fftfreq(n) * a)
    shape = [1] * v.ndim
    shape[axis] = n
    return np.fft.ifft(np.fft.fft(v, axis=axis) * ramp.reshape(shape), axis=axis)


def tf_shift(f: WindowVector, z, mode: str = "snapped") -> WindowVector:
    """Symmetric time-frequency shift
    ``rho(x, xi) f(t) = exp(-pi i x xi) exp(2 pi i xi t) f(t - x)``.

    Parameters
    ----------
    f : WindowVector
    z : PhasePoint or pair
    mode : {'snapped', 'interpolated'}
        ``snapped`` requires ``x`` to be a multiple of ``dx`` and shifts by
        whole samples; ``interpolated`` applies a band-limited fractional
        shift through the FFT, accurate for functions resolved well inside
        the window.
    """
    x, xi = PhasePoint(*z)
    g = f.grid
    a = _shift_steps(g, x, mode)
    shifted = _shift_columns(f.values, a)
    phase = np.exp(-1j * np.pi * x * xi)
    return WindowVector(g, phase * np.exp(2j * np.pi * xi * g.x) * shifted)


def parity_conjugate(T: OperatorMatrix) -> OperatorMatrix:
    """``P T P`` with ``P f(t) = f(-t)`` acting by periodic index reflection."""
    r = T.grid.reflect_index()
    return OperatorMatrix(T.grid, T.kernel[np.ix_(r, r)])


def translate_operator(T: OperatorMatrix, z, mode: str = "snapped") -> OperatorMatrix:
    """Operator translation ``rho(z) T rho(-z)``.

    The scalar phase of ``rho`` cancels in the conjugation, leaving a shift of
    both kernel axes and a modulation ``exp(2 pi i xi (x_i - x_j))``.
    """
    x, xi = PhasePoint(*z)
    g = T.grid
    a = _shift_steps(g, x, mode)
    if isinstance(a, int):
        k = np.roll(T.kernel, (a, a), axis=(0, 1))
    else:
        # S K S^H with S the (unitary) fractional shift
        sk = _shift_columns(T.kernel, a, 0)
        k = _shift_columns(sk.conj().T, a, 0).conj().T
    m = np.exp(2j * np.pi * xi * g.x)
    return OperatorMatrix(g, m[:, None] * k * m.conj()[None, :])


def rank_one(g: WindowVector, h: WindowVector) -> OperatorMatrix:
    """``(g (x) h) f = <f, h> g``, kernel ``g(x) conj(h(y))``."""
    _same_grid(g.grid, h.grid)
    return OperatorMatrix(g.grid, np.outer(g.values, h.values.conj()))


def trace(T: OperatorMatrix) -> complex:
    return complex(T.grid.dx * np.trace(T.kernel))


def singular_values(T: OperatorMatrix) -> np.ndarray:
    """Operator singular values in descending order."""
    return T.grid.dx * np.linalg.svd(T.kernel, compute_uv=False)


def schatten_from_singular_values(s: np.ndarray, p) -> SchattenValue:
    """Schatten norm from precomputed (descending) singular values."""
    p = parse_exponent(p)
    s = np.asarray(s, dtype=float)
    top = float(s[0]) if s.size else 0.0
    rank = int(np.count_nonzero(s > RANK_TOL * top)) if top > 0 else 0
    if top == 0.0 or p == math.inf:
        value = top
    else:
        value = top * float(np.sum((s / top) ** p)) ** (1.0 / p)
    return SchattenValue(p, value, s, rank)


def schatten_norm(T: OperatorMatrix, p) -> SchattenValue:
    """``||T||_{S^p} = (sum_k s_k^p)^(1/p)``; the largest singular value for ``p = inf``.

    Raises
    ------
    InvalidParameterError
        If ``p < 1``.
    """
    p = parse_exponent(p)
    return schatten_from_singular_values(singular_values(T), p)
