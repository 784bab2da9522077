"""In-process invariant suite behind ``qharmonic selftest``.

Each check yields ``(name, error, tolerance)`` and passes when
``error <= tolerance``. The default grid is small enough for a sub-second run.
"""

import math

import numpy as np

from .operators import (
    gaussian_window,
    rank_one,
    schatten_norm,
    trace,
    translate_operator,
)
from .phase_space import (
    PhaseGrid,
    Region,
    build_symbol,
    convolve_symbols,
    lp_norm,
    random_bandlimited_symbol,
    rng_for,
    symplectic_fourier,
)
from .qha import (
    check_intertwining,
    cutoff_certificate,
    gaussian_pair,
    op_conv,
    random_low_rank_operator,
    random_window,
    verify_bound_chain,
    werner_young_trial,
)
from .weyl import cross_wigner, fourier_weyl, weyl_quantize, weyl_symbol


def _rel(a, b):
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def _checks(grid: PhaseGrid, trials: int):
    region = Region.disc(min(1.5, 0.3 * grid.L, 0.3 * grid.xi_max))
    syms = [random_bandlimited_symbol(grid, region, 11, index=i, margin=0.25) for i in range(3)]
    tau = syms[0]
    L = weyl_quantize(tau)

    F = symplectic_fourier(tau)
    yield "sfourier involution", _rel(symplectic_fourier(F).values, tau.values), 1e-12
    yield "sfourier plancherel", abs(lp_norm(F, 2) / lp_norm(tau, 2) - 1), 1e-12
    conv = convolve_symbols(syms[0], syms[1])
    yield ("convolution theorem",
           _rel(symplectic_fourier(conv).values,
                symplectic_fourier(syms[0]).values * symplectic_fourier(syms[1]).values), 1e-10)

    yield "weyl round trip", _rel(weyl_symbol(L).values, tau.values), 1e-10
    yield "pool isometry", abs(schatten_norm(L, 2).value / lp_norm(tau, 2) - 1), 1e-10
    yield "convention pin F_W(L_tau) = F_sigma(tau)", _rel(fourier_weyl(L).values, F.values), 1e-8

    gp = weyl_quantize(build_symbol(grid, {"kind": "gaussian", "amplitude": 2, "width": 2**-0.5}))
    s = schatten_norm(gp, 1).singular_values
    yield "gaussian projector", max(abs(s[0] - 1), s[1]), 1e-6

    phi = gaussian_window(grid)
    W = cross_wigner(phi, phi)
    yield "symbol of rank one", _rel(weyl_symbol(rank_one(phi, phi)).values, W.values), 1e-8

    rng = rng_for(11, 99)
    a, b = random_window(grid, rng), random_window(grid, rng)
    lhs = L.apply(a).inner(b)
    rhs = grid.cell_area * np.sum(tau.values * cross_wigner(b, a).values)
    yield "pairing identity", abs(lhs - rhs) / (lp_norm(tau, 2) * a.norm() * b.norm()), 1e-8

    z = (grid.x[grid.N // 2 + 3], grid.xi[grid.N // 2 - 2])
    cov = weyl_quantize(tau.shift(z)).kernel
    yield "covariance", _rel(cov, translate_operator(L, z).kernel), 1e-8

    for i in range(len(syms) - 1):
        yield f"intertwining #{i}", check_intertwining(syms[i], syms[i + 1], "direct").lhs, 1e-6

    T = random_low_rank_operator(grid, rng, 3)
    S = random_low_rank_operator(grid, rng, 3)
    d = op_conv(T, S, "direct")
    yield "op_conv direct = fast", _rel(op_conv(T, S, "fast").values, d.values), 1e-8
    fub = grid.cell_area * d.values.sum()
    yield "fubini", abs(fub - trace(T) * trace(S)) / abs(trace(T) * trace(S)), 1e-6

    for triple in [(1, 1, 1), (1, 2, 2), (2, 2, math.inf), (1, math.inf, math.inf)]:
        rep = werner_young_trial(*triple, trials=trials, seed=3, grid=grid)
        yield f"werner-young {triple}", float(rep.violations), 0.5

    cert = cutoff_certificate(grid, region, 0.25)
    pair = gaussian_pair(grid)
    worst = 0.0
    for t in syms:
        for p in (1, 2, math.inf):
            lo, yg = verify_bound_chain(t, region, p, 0.25, certificate=cert, pair=pair)
            worst = max(worst, 0.0 if (lo.passed and yg.passed) else 1.0)
    yield "bound chain", worst, 0.5


def run_selftest(grid: PhaseGrid | None = None, trials: int = 20, echo=print) -> bool:
    grid = grid or PhaseGrid(64, 4.0)
    ok = True
    for name, err, tol in _checks(grid, trials):
        passed = bool(err <= tol)
        ok &= passed
        if echo:
            echo(f"{'PASS' if passed else 'FAIL'}  {name}: {err:.3g} (tol {tol:g})")
    return ok


__all__ = ["run_selftest"]
