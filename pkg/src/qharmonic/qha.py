"""Werner's operator convolution and the inequality-certification harness.

``T * S(z) = tr(T alpha_z(P S P))`` turns a pair of operators into a
phase-space function. For Weyl quantisations it reproduces the ordinary
convolution of symbols, ``L_tau * L_Phi = tau * Phi``, and it satisfies
Young's inequality with Schatten norms on the operator side. The functions
below evaluate both, and certify the two-sided bound between
``||tau||_{L^p}`` and ``||L_tau||_{S^p}`` for symbols whose symplectic
Fourier transform is supported in a bounded region.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolation, InvalidParameterError
from .operators import (
    OperatorMatrix,
    WindowVector,
    gaussian_window,
    parity_conjugate,
    rank_one,
    schatten_from_singular_values,
    schatten_norm,
    singular_values,
)
from .phase_space import (
    PhaseGrid,
    Region,
    SymbolGrid,
    _same_grid,
    convolve_symbols,
    lp_norm,
    out_of_region_fraction,
    parse_exponent,
    random_bandlimited_symbol,
    rng_for,
    smooth_cutoff,
    symplectic_fourier,
)
from .weyl import cross_wigner, fourier_weyl, weyl_quantize

__all__ = [
    "BoundReport",
    "ConstantEstimate",
    "YoungTrialReport",
    "op_conv",
    "check_intertwining",
    "werner_young_trial",
    "verify_bound_chain",
    "estimate_constant",
    "random_low_rank_operator",
    "cutoff_certificate",
    "verify_batch",
]

INTERTWINING_TOL = 1e-6
YOUNG_TOL = 1e-6
SUPPORT_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-8
DEGENERATE_TOL = 1e-14


def _exp_json(p):
    return "inf" if p == math.inf else p


def max_workers() -> int:
    """Thread cap from ``QHA_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("QHA_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise InvalidParameterError(f"QHA_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise InvalidParameterError("QHA_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _map(fn, items):
    items = list(items)
    n = min(max_workers(), len(items))
    if n <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# reports


@dataclass
class BoundReport:
    """One side-by-side evaluation of an inequality ``lhs <= rhs``."""

    p: float
    lhs: float
    rhs: float
    certificate: dict = field(default_factory=dict)
    tolerance: float = 0.0
    label: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.lhs <= self.rhs * (1.0 + self.tolerance))

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "p": _exp_json(self.p),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "certificate": self.certificate,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class ConstantEstimate:
    """Ratio statistics ``||L_tau||_{S^p} / ||L_tau * (g (x) h)||_{L^p}``."""

    region: Region
    p: float
    grid: PhaseGrid
    seed: int
    ratios: np.ndarray = field(repr=False)
    flagged: int = 0

    @property
    def samples(self) -> int:
        return int(self.ratios.size) + self.flagged

    @property
    def min(self) -> float:
        return float(self.ratios.min())

    @property
    def max(self) -> float:
        return float(self.ratios.max())

    @property
    def mean(self) -> float:
        return float(self.ratios.mean())

    def to_dict(self) -> dict:
        return {
            "region": self.region.describe(),
            "p": _exp_json(self.p),
            "samples": self.samples,
            "flagged": self.flagged,
            "ratios": {"min": self.min, "max": self.max, "mean": self.mean},
            "grid": self.grid.to_dict(),
            "seed": self.seed,
        }


@dataclass
class YoungTrialReport:
    p: float
    q: float
    r: float
    seed: int
    lhs: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    tolerance: float = YOUNG_TOL

    @property
    def trials(self) -> int:
        return int(self.lhs.size)

    @property
    def slack(self) -> np.ndarray:
        return self.rhs - self.lhs

    @property
    def violations(self) -> int:
        return int(np.count_nonzero(self.lhs > self.rhs * (1.0 + self.tolerance)))

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "p": _exp_json(self.p),
            "q": _exp_json(self.q),
            "r": _exp_json(self.r),
            "trials": self.trials,
            "violations": self.violations,
            "min_slack": float(self.slack.min()),
            "max_ratio": float(np.max(self.lhs / self.rhs)),
            "seed": self.seed,
            "pass": self.passed,
        }


# ---------------------------------------------------------------------------
# operator convolution


def _op_conv_direct(T: OperatorMatrix, S: OperatorMatrix) -> np.ndarray:
    g = T.grid
    n = g.N
    R = parity_conjugate(S).kernel
    idx = np.arange(n)
    # diagonals: A[i, d] = K_T[i, i+d], B[k, d] = R[k+d, k]
    A = T.kernel[idx[:, None], (idx[:, None] + idx[None, :]) % n]
    B = R[(idx[:, None] + idx[None, :]) % n, idx[:, None]]
    out = np.empty((n, n), dtype=np.complex128)
    for row, a in enumerate(idx - n // 2):
        # tr(T alpha_z(R)) for z = (a dx, b dxi), summed over the position axis;
        # the modulation sum over d is one inverse DFT
        c = np.einsum("id,id->d", A, np.roll(B, a, axis=0))
        vals = n * np.fft.ifft(c)
        out[row] = np.fft.fftshift(vals)
    return g.dx**2 * out


def op_conv(T: OperatorMatrix, S: OperatorMatrix, method: str = "fast") -> SymbolGrid:
    """Operator convolution ``T * S(z) = tr(T alpha_z(P S P))`` on the grid.

    Parameters
    ----------
    method : {'direct', 'fast'}
        ``direct`` evaluates the trace for every grid point (grouped by
        shift-diagonal, ``O(N^3)``); ``fast`` uses
        ``F_sigma(F_W(T) F_W(S))`` in ``O(N^2 log N)``.
    """
    _same_grid(T.grid, S.grid)
    if method == "direct":
        return SymbolGrid(T.grid, _op_conv_direct(T, S))
    if method == "fast":
        prod = fourier_weyl(T).values * fourier_weyl(S).values
        return symplectic_fourier(SymbolGrid(T.grid, prod))
    raise InvalidParameterError(f"unknown method {method!r}")


def _rel_sup(a, b):
    scale = max(np.abs(a).max(), np.abs(b).max())
    if scale == 0:
        return 0.0
    return float(np.abs(a - b).max() / scale)


def check_intertwining(tau: SymbolGrid, Phi: SymbolGrid, method: str = "direct",
              region: Region | None = None) -> BoundReport:
    """Compare ``L_tau * L_Phi`` with ``tau * Phi``.

    The report's ``lhs`` is the relative sup-norm discrepancy and ``rhs`` the
    tolerance (1e-6). If ``region`` is given, both symbols are first checked
    to be band-limited to it.
    """
    _same_grid(tau.grid, Phi.grid)
    if region is not None:
        for s in (tau, Phi):
            leak = out_of_region_fraction(s, region)
            if leak > SUPPORT_TOL:
                raise HypothesisViolation(f"{leak:.3g} of the spectral energy lies outside {region.describe()}")
    lhs = op_conv(weyl_quantize(tau), weyl_quantize(Phi), method).values
    rhs = convolve_symbols(tau, Phi).values
    err = _rel_sup(lhs, rhs)
    return BoundReport(
        p=math.inf, lhs=err, rhs=INTERTWINING_TOL, label="intertwining",
        certificate={"sup_operator_side": float(np.abs(lhs).max()),
                     "sup_function_side": float(np.abs(rhs).max())},
    )


# ---------------------------------------------------------------------------
# Young's inequality for operators


def _reciprocal(p):
    return 0.0 if p == math.inf else 1.0 / p


def check_young_exponents(p, q, r):
    """Normalize ``(p, q, r)`` and verify ``1 + 1/r = 1/p + 1/q``."""
    p, q, r = (parse_exponent(e) for e in (p, q, r))
    if not math.isclose(1.0 + _reciprocal(r), _reciprocal(p) + _reciprocal(q), abs_tol=1e-12):
        raise InvalidParameterError(f"exponents ({p}, {q}, {r}) violate 1 + 1/r = 1/p + 1/q")
    return p, q, r


def random_window(grid: PhaseGrid, rng: np.random.Generator, spread: float | None = None) -> WindowVector:
    """Random smooth window: complex noise smoothed in frequency and
    multiplied by a Gaussian envelope centered at a random point."""
    n = grid.N
    spread = grid.L / 4 if spread is None else spread
    c = rng.uniform(-grid.L / 4, grid.L / 4)
    env = np.exp(-np.pi * ((grid.x - c) / spread) ** 2)
    noise = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    # keep frequencies well inside the band so the window stays resolved
    f = np.fft.fftfreq(n, d=grid.dx)
    lowpass = np.exp(-np.pi * (f / (0.25 * grid.xi_max)) ** 2)
    smooth = np.fft.ifft(np.fft.fft(noise) * lowpass)
    return WindowVector(grid, env * smooth).normalized()


def random_low_rank_operator(grid: PhaseGrid, rng: np.random.Generator,
                             rank: int = 5, psd: bool = False) -> OperatorMatrix:
    """Sum of ``rank`` random rank-one terms with random positive weights."""
    k = np.zeros((grid.N, grid.N), dtype=np.complex128)
    for _ in range(rank):
        u = random_window(grid, rng)
        v = u if psd else random_window(grid, rng)
        k += rng.uniform(0.1, 1.0) * rank_one(u, v).kernel
    return OperatorMatrix(grid, k)


def werner_young_trial(p, q, r, trials: int = 100, seed: int = 0,
                       grid: PhaseGrid | None = None, max_rank: int = 5,
                       method: str = "fast") -> YoungTrialReport:
    """Check ``||S * T||_{L^r} <= ||S||_{S^p} ||T||_{S^q}`` on random operators.

    Each trial draws ``S`` and ``T`` of rank at most ``max_rank`` from the
    stream keyed by ``(seed, trial)``.
    """
    p, q, r = check_young_exponents(p, q, r)
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    grid = grid or PhaseGrid(64, 4.0)

    def one(t):
        rng = rng_for(seed, t)
        S = random_low_rank_operator(grid, rng, int(rng.integers(1, max_rank + 1)))
        T = random_low_rank_operator(grid, rng, int(rng.integers(1, max_rank + 1)))
        lhs = lp_norm(op_conv(S, T, method), r)
        rhs = schatten_norm(S, p).value * schatten_norm(T, q).value
        return lhs, rhs

    res = np.array(_map(one, range(trials)))
    return YoungTrialReport(p, q, r, seed, res[:, 0], res[:, 1])


def young_pair(S: OperatorMatrix, T: OperatorMatrix, p, q, r, method: str = "fast") -> BoundReport:
    """Werner-Young for one given pair."""
    p, q, r = check_young_exponents(p, q, r)
    lhs = lp_norm(op_conv(S, T, method), r)
    rhs = schatten_norm(S, p).value * schatten_norm(T, q).value
    return BoundReport(p=r, lhs=lhs, rhs=rhs, tolerance=YOUNG_TOL, label="werner-young",
                       certificate={"p": _exp_json(p), "q": _exp_json(q)})


# ---------------------------------------------------------------------------
# the two-sided bound


@dataclass(frozen=True)
class CutoffCertificate:
    """Cutoff ``Psi`` for a region, its transform, and ``||L_{F_sigma Psi}||_{S^1}``."""

    region: Region
    margin: float
    cutoff: SymbolGrid = field(repr=False)
    kernel: SymbolGrid = field(repr=False)
    trace_norm: float


def cutoff_certificate(grid: PhaseGrid, region: Region, margin: float = 0.5) -> CutoffCertificate:
    psi = smooth_cutoff(grid, region, margin)
    k = symplectic_fourier(psi)
    s1 = schatten_norm(weyl_quantize(k), 1).value
    return CutoffCertificate(region, margin, psi, k, s1)


@dataclass(frozen=True)
class GaussianPair:
    """The windows ``g = h = phi_0`` with ``W(phi_0, phi_0)`` and its transforms."""

    window: WindowVector = field(repr=False)
    operator: OperatorMatrix = field(repr=False)
    wigner: SymbolGrid = field(repr=False)
    wigner_l1: float
    fw: SymbolGrid = field(repr=False)


def gaussian_pair(grid: PhaseGrid) -> GaussianPair:
    phi = gaussian_window(grid)
    op = rank_one(phi, phi)
    w = cross_wigner(phi, phi)
    return GaussianPair(phi, op, w, lp_norm(w, 1), fourier_weyl(op))


def _check_support(tau: SymbolGrid, region: Region):
    leak = out_of_region_fraction(tau, region)
    if leak > SUPPORT_TOL:
        raise HypothesisViolation(
            f"{leak:.3g} of the energy of F_sigma(tau) lies outside {region.describe()}"
        )
    return leak


def verify_bound_chain(tau: SymbolGrid, region: Region, p, margin: float = 0.5, *,
                       certificate: CutoffCertificate | None = None,
                       pair: GaussianPair | None = None,
                       operator_sv: np.ndarray | None = None,
                       lower_tol: float = 1e-3, young_tol: float = 1e-9):
    """Certify both inequalities of the two-sided bound for one symbol.

    Returns ``(lower, young)``:

    * ``lower``: ``||tau||_{L^p} <= ||L_{F_sigma Psi}||_{S^1} ||L_tau||_{S^p}``,
      where ``Psi = smooth_cutoff(region, margin)``. The reconstruction
      ``tau = tau * F_sigma(Psi)`` is checked as part of the certificate.
    * ``young``: ``||tau * W||_{L^p} <= ||W||_{L^1} ||tau||_{L^p}`` for
      ``W = W(phi_0, phi_0)``, together with the identity
      ``L_tau * (phi_0 (x) phi_0) = tau * W``.

    ``certificate``, ``pair`` and ``operator_sv`` (singular values of
    ``L_tau``) may be passed in to share work across calls.

    Raises
    ------
    HypothesisViolation
        If more than 1e-8 of the energy of ``F_sigma(tau)`` lies outside ``region``.
    """
    p = parse_exponent(p)
    grid = tau.grid
    leak = _check_support(tau, region)
    cert = certificate or cutoff_certificate(grid, region, margin)
    _same_grid(grid, cert.cutoff.grid)
    pair = pair or gaussian_pair(grid)

    rebuilt = convolve_symbols(tau, cert.kernel)
    tau_l2 = lp_norm(tau, 2)
    recon = lp_norm(tau - rebuilt, 2) / tau_l2 if tau_l2 else 0.0

    sv = singular_values(weyl_quantize(tau)) if operator_sv is None else operator_sv
    op_norm = schatten_from_singular_values(sv, p).value
    tau_lp = lp_norm(tau, p)
    lower = BoundReport(
        p=p, lhs=tau_lp, rhs=cert.trace_norm * op_norm, tolerance=lower_tol, label="lower-bound",
        certificate={"cutoff_trace_norm": cert.trace_norm, "operator_norm": op_norm,
                     "reconstruction_error": recon, "spectral_leak": leak},
    )
    if recon > RECONSTRUCTION_TOL:
        lower.passed = False

    smoothed = convolve_symbols(tau, pair.wigner)
    conv_op = op_conv(weyl_quantize(tau), pair.operator, "fast")
    ident = _rel_sup(conv_op.values, smoothed.values)
    young = BoundReport(
        p=p, lhs=lp_norm(smoothed, p), rhs=pair.wigner_l1 * tau_lp, tolerance=young_tol,
        label="smoothing-young",
        certificate={"wigner_l1": pair.wigner_l1, "symbol_norm": tau_lp,
                     "intertwining_error": ident},
    )
    if ident > INTERTWINING_TOL:
        young.passed = False
    return lower, young


# ---------------------------------------------------------------------------
# empirical division-lemma constant


def constant_ratio(tau: SymbolGrid, p, pair: GaussianPair | None = None,
                   operator_sv: np.ndarray | None = None):
    """``(||L_tau||_{S^p}, ||L_tau * (phi_0 (x) phi_0)||_{L^p})``."""
    pair = pair or gaussian_pair(tau.grid)
    L = weyl_quantize(tau)
    sv = singular_values(L) if operator_sv is None else operator_sv
    num = schatten_from_singular_values(sv, p).value
    conv = symplectic_fourier(SymbolGrid(tau.grid, fourier_weyl(L).values * pair.fw.values))
    return num, lp_norm(conv, p)


def estimate_constant(region: Region, p, samples: int, seed: int, grid: PhaseGrid,
                      margin: float = 0.5, symbols=None) -> ConstantEstimate:
    """Empirical lower bound for the constant ``C(region)``.

    Draws ``samples`` symbols band-limited to ``region`` (or uses the given
    ``symbols``) and records ``||L_tau||_{S^p} / ||L_tau * (phi_0 (x) phi_0)||_{L^p}``.
    Samples whose denominator is below ``1e-14`` times the numerator are
    dropped and counted in ``flagged``.
    """
    p = parse_exponent(p)
    if symbols is None:
        if samples < 1:
            raise InvalidParameterError("samples must be >= 1")
        region.check_fits(grid)
        symbols = [lambda i=i: random_bandlimited_symbol(grid, region, seed, index=i, margin=margin)
                   for i in range(samples)]
    else:
        symbols = [lambda s=s: s for s in symbols]
    pair = gaussian_pair(grid)

    def one(make):
        return constant_ratio(make(), p, pair)

    ratios, flagged = [], 0
    for num, den in _map(one, symbols):
        if den <= DEGENERATE_TOL * num:
            flagged += 1
            continue
        ratios.append(num / den)
    if flagged:
        warnings.warn(f"{flagged} sample(s) with degenerate denominator excluded", RuntimeWarning)
    if not ratios:
        raise InvalidParameterError("every sample had a degenerate denominator")
    return ConstantEstimate(region, p, grid, seed, np.array(ratios), flagged)


# ---------------------------------------------------------------------------
# batches


@dataclass
class BatchEntry:
    sample: int
    p: float
    lower: BoundReport
    young: BoundReport
    schatten: float
    smoothed: float

    @property
    def ratio(self) -> float:
        return self.schatten / self.smoothed if self.smoothed > 0 else math.inf


@dataclass
class VerifyBatch:
    """All reports of one ``verify_batch`` run."""

    grid: PhaseGrid
    region: Region
    margin: float
    seed: int
    exponents: tuple
    trace_norm: float
    entries: list = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(e.lower.passed and e.young.passed for e in self.entries)

    def max_ratio(self, p=None) -> float:
        rs = [e.ratio for e in self.entries if p is None or e.p == parse_exponent(p)]
        return max(rs)

    def to_dict(self) -> dict:
        lower = [dict(e.lower.to_dict(), sample=e.sample) for e in self.entries]
        young = [dict(e.young.to_dict(), sample=e.sample) for e in self.entries]
        return {
            "grid": self.grid.to_dict(),
            "region": self.region.describe(),
            "margin": self.margin,
            "seed": self.seed,
            "samples": len({e.sample for e in self.entries}),
            "p": [_exp_json(p) for p in self.exponents],
            "certificate": {"cutoff_trace_norm": self.trace_norm},
            "reports": lower,
            "young_reports": young,
            "ratios": {
                str(_exp_json(p)): {
                    "max": self.max_ratio(p),
                    "min": min(e.ratio for e in self.entries if e.p == p),
                }
                for p in self.exponents
            },
            "pass": self.passed,
        }

    def ratio_rows(self):
        """Rows ``(sample, p, lp_norm, schatten_norm, smoothed_norm, ratio)``."""
        for e in self.entries:
            yield (e.sample, _exp_json(e.p), e.lower.lhs, e.schatten, e.smoothed, e.ratio)


def verify_batch(grid: PhaseGrid, region: Region, exponents, samples: int, seed: int,
                 margin: float = 0.5) -> VerifyBatch:
    """Run :func:`verify_bound_chain` and the constant ratio on ``samples``
    random symbols band-limited to ``region``, for every exponent."""
    exponents = tuple(parse_exponent(p) for p in exponents)
    if samples < 1:
        raise InvalidParameterError("samples must be >= 1")
    cert = cutoff_certificate(grid, region, margin)
    pair = gaussian_pair(grid)

    def one(i):
        tau = random_bandlimited_symbol(grid, region, seed, index=i, margin=margin)
        sv = singular_values(weyl_quantize(tau))
        out = []
        for p in exponents:
            lo, yg = verify_bound_chain(tau, region, p, margin, certificate=cert, pair=pair,
                                        operator_sv=sv)
            num, den = constant_ratio(tau, p, pair, sv)
            out.append(BatchEntry(i, p, lo, yg, num, den))
        return out

    entries = [e for chunk in _map(one, range(samples)) for e in chunk]
    return VerifyBatch(grid, region, margin, seed, exponents, cert.trace_norm, entries)
