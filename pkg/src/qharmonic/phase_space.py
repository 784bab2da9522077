"""Sampled phase space: grids, symbols, the symplectic Fourier transform.

Phase space is the plane of points ``z = (x, xi)``. It is sampled on an
``N x N`` grid whose position axis has spacing ``dx = 2L/N`` over
``[-L, L)`` and whose frequency axis has spacing ``dxi = 1/(2L)``, so that
``dx * dxi * N = 1``. With that choice the DFT maps the grid onto itself,
and every transform below is exact on periodic, band-limited samples.

The area element of the grid is ``dx * dxi = 1/N``. For the default window
(``N = 256, L = 8``) both spacings equal ``1/16`` and the window is the
square ``[-8, 8)^2``.

The symplectic form is ``sigma((x, xi), (x', xi')) = xi*x' - x*xi'`` and

    F_sigma(S)(zeta) = integral exp(-2 pi i sigma(zeta, z)) S(z) dz.

With this sign the symplectic transform of a symbol coincides with the
Fourier-Weyl transform ``tr(L_tau rho(-z))`` of its Weyl quantisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .errors import DomainError, GridMismatchError, InvalidParameterError

# sign s in sigma(z, z') = s * (xi*x' - x*xi'); see module docstring
SYMPLECTIC_SIGN = 1
# F_sigma carries the quadrature weight dx*dxi, which makes it unitary
FFT_NORMALIZATION = "area-weighted"

__all__ = [
    "PhaseGrid",
    "PhasePoint",
    "Region",
    "SymbolGrid",
    "make_grid",
    "build_symbol",
    "symplectic_fourier",
    "convolve_symbols",
    "lp_norm",
    "smooth_cutoff",
    "random_bandlimited_symbol",
    "parse_exponent",
    "rng_for",
]


@dataclass(frozen=True)
class PhaseGrid:
    """Square-index discretization of the phase-space window.

    Parameters
    ----------
    N : int
        Samples per axis, even and at least 8.
    L : float
        Half-width of the position window.
    """

    N: int
    L: float

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise InvalidParameterError(f"N must be an integer, got {self.N!r}")
        if self.N < 8 or self.N % 2:
            raise InvalidParameterError(f"N must be even and >= 8, got {self.N}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise InvalidParameterError(f"L must be positive and finite, got {self.L!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def dxi(self) -> float:
        return 1.0 / (2.0 * self.L)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dxi

    @property
    def xi_max(self) -> float:
        """Half-width of the frequency window, ``N / (4L)``."""
        return self.N * self.dxi / 2.0

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.N) - self.N // 2) * self.dx

    @property
    def xi(self) -> np.ndarray:
        return (np.arange(self.N) - self.N // 2) * self.dxi

    def mesh(self):
        """Return ``(X, XI)`` arrays of shape ``(N, N)``, position along rows."""
        return np.meshgrid(self.x, self.xi, indexing="ij")

    def reflect_index(self) -> np.ndarray:
        """Periodic index reflection ``j -> (N - j) mod N``, i.e. ``x -> -x``."""
        return (-np.arange(self.N)) % self.N

    def point_index(self, z) -> tuple[int, int]:
        """Indices of the grid point ``z``; raises if ``z`` is off-grid."""
        z = PhasePoint(*z)
        i = z.x / self.dx + self.N // 2
        k = z.xi / self.dxi + self.N // 2
        ii, kk = round(i), round(k)
        if abs(i - ii) > 1e-9 or abs(k - kk) > 1e-9:
            raise InvalidParameterError(f"{z} is not a grid point")
        return ii % self.N, kk % self.N

    def to_dict(self) -> dict:
        return {"N": self.N, "L": self.L}


def make_grid(N: int, L: float) -> PhaseGrid:
    """Build a :class:`PhaseGrid`; validation happens in the constructor."""
    return PhaseGrid(N, L)


class PhasePoint(NamedTuple):
    x: float
    xi: float


@dataclass(frozen=True)
class SymbolGrid:
    """Complex samples of a phase-space function.

    ``values[i, k]`` is the sample at ``(grid.x[i], grid.xi[k])``. The array
    is copied and made read-only on construction.
    """

    grid: PhaseGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.shape != (self.grid.N, self.grid.N):
            raise InvalidParameterError(
                f"values must have shape {(self.grid.N, self.grid.N)}, got {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidParameterError("symbol samples must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def _check(self, other):
        if isinstance(other, SymbolGrid):
            _same_grid(self.grid, other.grid)
            return other.values
        return other

    def __add__(self, other):
        return SymbolGrid(self.grid, self.values + self._check(other))

    def __sub__(self, other):
        return SymbolGrid(self.grid, self.values - self._check(other))

    def __mul__(self, other):
        return SymbolGrid(self.grid, self.values * self._check(other))

    __rmul__ = __mul__

    def __neg__(self):
        return SymbolGrid(self.grid, -self.values)

    def conj(self) -> "SymbolGrid":
        return SymbolGrid(self.grid, self.values.conj())

    def reflect(self) -> "SymbolGrid":
        """The symbol ``z -> S(-z)``."""
        r = self.grid.reflect_index()
        return SymbolGrid(self.grid, self.values[np.ix_(r, r)])

    def shift(self, z) -> "SymbolGrid":
        """The symbol ``w -> S(w - z)`` for a grid point ``z`` (periodic)."""
        z = PhasePoint(*z)
        a = _snap(z.x, self.grid.dx)
        b = _snap(z.xi, self.grid.dxi)
        return SymbolGrid(self.grid, np.roll(self.values, (a, b), axis=(0, 1)))


def _snap(value, step):
    n = value / step
    if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
        raise InvalidParameterError(f"{value} is not a multiple of the grid step {step}")
    return int(round(n))


def _same_grid(a: PhaseGrid, b: PhaseGrid):
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")


def parse_exponent(p) -> float:
    """Normalize an exponent: accepts numbers and the strings ``'inf'``/``'∞'``."""
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "∞"):
            return math.inf
        try:
            p = float(s)
        except ValueError:
            raise InvalidParameterError(f"not an exponent: {p!r}") from None
    p = float(p)
    if math.isnan(p) or p < 1:
        raise InvalidParameterError(f"exponent must lie in [1, inf], got {p}")
    return p


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Region:
    """A disc or an axis-aligned rectangle in phase space.

    Use :meth:`disc` / :meth:`rect` rather than the raw constructor. For a
    rectangle ``extent`` holds the half-widths ``(ax, axi)``; for a disc it
    holds ``(R, R)``.
    """

    kind: str
    center: PhasePoint
    extent: tuple

    def __post_init__(self):
        if self.kind not in ("disc", "rect"):
            raise InvalidParameterError(f"unknown region kind {self.kind!r}")
        object.__setattr__(self, "center", PhasePoint(*map(float, self.center)))
        ext = tuple(float(e) for e in self.extent)
        if len(ext) != 2 or not all(math.isfinite(e) and e > 0 for e in ext):
            raise InvalidParameterError(f"region extents must be positive, got {self.extent}")
        if self.kind == "disc" and ext[0] != ext[1]:
            raise InvalidParameterError("a disc has a single radius")
        if not all(math.isfinite(c) for c in self.center):
            raise InvalidParameterError("region center must be finite")
        object.__setattr__(self, "extent", ext)

    @classmethod
    def disc(cls, radius, center=(0.0, 0.0)):
        return cls("disc", center, (radius, radius))

    @classmethod
    def rect(cls, half_x, half_xi, center=(0.0, 0.0)):
        return cls("rect", center, (half_x, half_xi))

    @classmethod
    def parse(cls, text: str) -> "Region":
        """Parse ``disc:R``, ``disc:R@x0,xi0``, ``rect:ax,axi`` or ``rect:ax,axi@x0,xi0``."""
        try:
            kind, rest = text.split(":", 1)
            if "@" in rest:
                rest, c = rest.split("@", 1)
                center = tuple(float(t) for t in c.split(","))
            else:
                center = (0.0, 0.0)
            nums = [float(t) for t in rest.split(",")]
            if kind == "disc" and len(nums) == 1:
                return cls.disc(nums[0], center)
            if kind == "rect" and len(nums) == 2:
                return cls.rect(nums[0], nums[1], center)
        except (ValueError, TypeError):
            pass
        raise InvalidParameterError(f"cannot parse region {text!r}")

    @property
    def radius(self) -> float:
        return self.extent[0]

    def distance(self, x, xi):
        """Euclidean distance from ``(x, xi)`` to the region (0 inside)."""
        dx = np.asarray(x) - self.center.x
        dxi = np.asarray(xi) - self.center.xi
        if self.kind == "disc":
            return np.maximum(np.hypot(dx, dxi) - self.extent[0], 0.0)
        ox = np.maximum(np.abs(dx) - self.extent[0], 0.0)
        oxi = np.maximum(np.abs(dxi) - self.extent[1], 0.0)
        return np.hypot(ox, oxi)

    def contains(self, x, xi):
        return self.distance(x, xi) <= 0.0

    def dilate(self, margin: float) -> "Region":
        return Region(self.kind, self.center, tuple(e + margin for e in self.extent))

    def erode(self, margin: float) -> "Region":
        return Region(self.kind, self.center, tuple(e - margin for e in self.extent))

    def is_centered(self) -> bool:
        return self.center.x == 0.0 and self.center.xi == 0.0

    def check_fits(self, grid: PhaseGrid, margin: float = 0.0):
        """Raise :class:`DomainError` unless the dilated region lies strictly
        inside the grid window."""
        ax, axi = (e + margin for e in self.extent)
        cx, cxi = self.center
        if not (-grid.L < cx - ax and cx + ax < grid.L - grid.dx
                and -grid.xi_max < cxi - axi and cxi + axi < grid.xi_max - grid.dxi):
            raise DomainError(
                f"{self.describe()} dilated by {margin} does not fit the window "
                f"[-{grid.L}, {grid.L}) x [-{grid.xi_max}, {grid.xi_max})"
            )

    def describe(self) -> str:
        c = ""
        if not self.is_centered():
            c = f"@{self.center.x:g},{self.center.xi:g}"
        if self.kind == "disc":
            return f"disc:{self.extent[0]:g}{c}"
        return f"rect:{self.extent[0]:g},{self.extent[1]:g}{c}"


# ---------------------------------------------------------------------------
# symbol construction


def build_symbol(grid: PhaseGrid, descriptor) -> SymbolGrid:
    """Sample a phase-space function described by ``descriptor``.

    ``descriptor`` is a mapping with a ``kind`` key:

    * ``gaussian``: ``amplitude * exp(-pi |z - center|^2 / width^2)``;
      ``center`` defaults to the origin. ``amplitude=2, width=2**-0.5``
      is the symbol ``2 exp(-2 pi |z|^2)`` of the Gaussian projector.
    * ``constant``: the constant ``c``.
    * ``coordinate``: the coordinate function of ``axis`` (``x`` or ``xi``).
    * ``file``: a QHAGRID1 file at ``path`` (its grid must equal ``grid``).
    """
    if not isinstance(descriptor, Mapping) or "kind" not in descriptor:
        raise InvalidParameterError(f"symbol descriptor needs a 'kind': {descriptor!r}")
    kind = descriptor["kind"]
    X, XI = grid.mesh()
    if kind == "gaussian":
        a = descriptor.get("amplitude", 1.0)
        w = float(descriptor.get("width", 1.0))
        if w <= 0:
            raise InvalidParameterError("gaussian width must be positive")
        cx, cxi = descriptor.get("center", (0.0, 0.0))
        vals = a * np.exp(-np.pi * ((X - cx) ** 2 + (XI - cxi) ** 2) / w**2)
    elif kind == "constant":
        vals = np.full((grid.N, grid.N), descriptor.get("c", 1.0), dtype=np.complex128)
    elif kind == "coordinate":
        axis = descriptor.get("axis", "x")
        if axis not in ("x", "xi"):
            raise InvalidParameterError(f"unknown axis {axis!r}")
        vals = X if axis == "x" else XI
    elif kind == "file":
        from .io import read_symbol

        sym = read_symbol(descriptor["path"])
        _same_grid(grid, sym.grid)
        return sym
    else:
        raise InvalidParameterError(f"unknown symbol kind {kind!r}")
    return SymbolGrid(grid, vals)


# ---------------------------------------------------------------------------
# transforms


def _centered_fft(a, axis):
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(a, axes=axis), axis=axis), axes=axis)


def _centered_ifft(a, axis):
    # unnormalized: sum_j a_j exp(+2 pi i k j / N)
    n = a.shape[axis]
    return n * np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(a, axes=axis), axis=axis), axes=axis)


def symplectic_fourier(S: SymbolGrid) -> SymbolGrid:
    """Discrete symplectic Fourier transform.

    ``out(x', xi') = dA * sum exp(-2 pi i (xi' x - x' xi)) S(x, xi)``. The
    position axis is transformed with a forward DFT (producing ``xi'``), the
    frequency axis with a backward one (producing ``x'``), and the axes are
    swapped. The map is a unitary involution.
    """
    g = S.grid
    a = S.values
    if SYMPLECTIC_SIGN > 0:
        b = _centered_fft(a, 0)
        c = _centered_ifft(b, 1)
    else:
        b = _centered_ifft(a, 0)
        c = _centered_fft(b, 1)
    return SymbolGrid(g, g.cell_area * c.T)


def convolve_symbols(A: SymbolGrid, B: SymbolGrid) -> SymbolGrid:
    """Periodic convolution ``(A*B)(z) = integral A(z - w) B(w) dw`` on the grid."""
    _same_grid(A.grid, B.grid)
    g = A.grid
    c = np.fft.ifft2(np.fft.fft2(A.values) * np.fft.fft2(B.values))
    # the grid origin sits at index N/2, so the circular result is off by N/2
    c = np.roll(c, -(g.N // 2), axis=(0, 1))
    return SymbolGrid(g, g.cell_area * c)


def lp_norm(S: SymbolGrid, p) -> float:
    """``(dA * sum |S|^p)^(1/p)``, or ``max |S|`` for ``p = inf``."""
    p = parse_exponent(p)
    m = np.abs(S.values)
    top = float(m.max())
    if p == math.inf or top == 0.0:
        return top
    # scaled to avoid overflow for large p
    return top * float(S.grid.cell_area * np.sum((m / top) ** p)) ** (1.0 / p)


# ---------------------------------------------------------------------------
# cutoffs and random band-limited symbols


def _transition(s):
    """C-infinity step: 1 for s <= 0, 0 for s >= 1, monotone in between."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f_in = np.where(s < 1.0, np.exp(-1.0 / np.where(s < 1.0, 1.0 - s, 1.0)), 0.0)
        f_out = np.where(s > 0.0, np.exp(-1.0 / np.where(s > 0.0, s, 1.0)), 0.0)
    return f_in / (f_in + f_out)


def smooth_cutoff(grid: PhaseGrid, region: Region, margin: float = 0.5) -> SymbolGrid:
    """Smooth function equal to 1 on ``region`` and 0 beyond ``region + margin``.

    The transition is a C-infinity monotone step in the distance to the
    region, normalized by ``margin``.
    """
    if not (margin > 0):
        raise InvalidParameterError("margin must be positive")
    region.check_fits(grid, margin)
    X, XI = grid.mesh()
    d = region.distance(X, XI)
    return SymbolGrid(grid, _transition(d / margin))


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, index)``.

    Streams for different indices are independent, so a batch gives the same
    numbers under any evaluation order.
    """
    if int(seed) != seed or seed < 0 or int(index) != index or index < 0:
        raise InvalidParameterError("seed and index must be non-negative integers")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def random_bandlimited_symbol(
    grid: PhaseGrid,
    region: Region,
    seed: int,
    real_valued: bool = False,
    *,
    index: int = 0,
    margin: float = 0.5,
) -> SymbolGrid:
    """Random symbol whose symplectic Fourier transform lives in ``region``.

    Complex white noise on the grid is multiplied by a smooth envelope that is
    1 on ``region`` shrunk by ``margin`` and vanishes outside ``region``, and the
    result is transformed with :func:`symplectic_fourier`. The support is
    exact, so ``smooth_cutoff(grid, region, margin)`` reproduces the symbol.

    With ``real_valued`` the noise is symmetrized, ``G(-z) = conj G(z)``,
    which requires a region centered at the origin.
    """
    region.check_fits(grid)
    taper = min(margin, 0.5 * min(region.extent))
    if not taper > 0:
        raise InvalidParameterError("margin must be positive")
    envelope = smooth_cutoff(grid, region.erode(taper), taper).values.real
    rng = rng_for(seed, index)
    shape = (grid.N, grid.N)
    noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    G = noise * envelope
    if real_valued:
        if not region.is_centered():
            raise DomainError("a real-valued symbol needs a region centered at the origin")
        r = grid.reflect_index()
        G = 0.5 * (G + G[np.ix_(r, r)].conj())
    tau = symplectic_fourier(SymbolGrid(grid, G))
    if real_valued:
        tau = SymbolGrid(grid, tau.values.real)
    return tau


def out_of_region_fraction(S: SymbolGrid, region: Region) -> float:
    """Share of the energy of ``F_sigma(S)`` lying outside ``region``."""
    F = np.abs(symplectic_fourier(S).values) ** 2
    total = F.sum()
    if total == 0:
        return 0.0
    X, XI = S.grid.mesh()
    outside = ~region.contains(X, XI)
    return float(F[outside].sum() / total)
