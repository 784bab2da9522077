"""Command-line front end.

Exit codes: 0 success, 1 a bound failed, 2 usage / configuration / file
error, 3 the symbol violates the band-limitation hypothesis.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from datetime import datetime, timezone

from . import io
from .errors import FileFormatError, HypothesisViolation, QHAError
from .operators import schatten_norm
from .phase_space import (
    PhaseGrid,
    Region,
    convolve_symbols,
    parse_exponent,
    symplectic_fourier,
)
from .qha import (
    _check_support,
    estimate_constant,
    op_conv,
    verify_batch,
    verify_bound_chain,
)
from .selftest import run_selftest
from .weyl import cross_wigner, weyl_quantize, weyl_symbol

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_HYPOTHESIS = 0, 1, 2, 3


class UsageError(QHAError):
    pass


@dataclasses.dataclass
class RunConfig:
    """Validated parameters of a ``verify`` / ``estimate-constant`` run."""

    N: int = 256
    L: float = 8.0
    omega: str = "disc:2"
    p: tuple = (1.0, 2.0, math.inf)
    samples: int = 50
    seed: int = 0
    margin: float = 0.5
    method: str = "fast"
    out: str | None = None
    csv: str | None = None
    symbol: str | None = None
    timestamp: bool = True

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self):
        self.p = tuple(parse_exponent(q) for q in (self.p if isinstance(self.p, (list, tuple))
                                                   else str(self.p).split(",")))
        if not self.p:
            raise UsageError("at least one exponent is required")
        grid = PhaseGrid(self.N, self.L)
        self.region.check_fits(grid, self.margin)
        if int(self.samples) != self.samples or self.samples < 1:
            raise UsageError("samples must be a positive integer")
        if int(self.seed) != self.seed or self.seed < 0:
            raise UsageError("seed must be a non-negative integer")
        if self.method not in ("direct", "fast"):
            raise UsageError(f"unknown method {self.method!r}")

    @property
    def grid(self) -> PhaseGrid:
        return PhaseGrid(self.N, self.L)

    @property
    def region(self) -> Region:
        return Region.parse(self.omega)


def _exponents(text):
    try:
        return tuple(parse_exponent(t) for t in text.split(","))
    except QHAError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _p(p):
    return "inf" if p == math.inf else p


def _dump(obj, path):
    text = json.dumps(obj, indent=2, allow_nan=False)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _stamp(doc, cfg):
    if cfg.timestamp:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat()
    return doc


def _config(args) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot load config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    for key in ("N", "L", "omega", "p", "samples", "seed", "margin", "out", "csv", "symbol"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if getattr(args, "no_timestamp", False):
        data["timestamp"] = False
    return RunConfig.from_mapping(data)


# ---------------------------------------------------------------------------
# subcommands


def cmd_quantize(args):
    io.write_operator(args.output, weyl_quantize(io.read_symbol(args.input)))


def cmd_symbol(args):
    io.write_symbol(args.output, weyl_symbol(io.read_operator(args.input)))


def cmd_wigner(args):
    io.write_symbol(args.output, cross_wigner(io.read_vector(args.psi), io.read_vector(args.phi)))


def cmd_sfourier(args):
    io.write_symbol(args.output, symplectic_fourier(io.read_symbol(args.input)))


def cmd_convolve(args):
    io.write_symbol(args.output, convolve_symbols(io.read_symbol(args.a), io.read_symbol(args.b)))


def cmd_opconv(args):
    T, S = io.read_operator(args.t), io.read_operator(args.s)
    io.write_symbol(args.output, op_conv(T, S, args.method))


def cmd_schatten(args):
    T = io.read_operator(args.input)
    out = []
    for p in args.p:
        v = schatten_norm(T, p)
        out.append({"p": _p(p), "value": v.value, "rank": v.rank})
    _dump({"grid": T.grid.to_dict(), "norms": out}, args.out)


def cmd_verify(args):
    cfg = _config(args)
    if cfg.symbol:
        tau = io.read_symbol(cfg.symbol)
        _check_support(tau, cfg.region)
        reports = []
        for p in cfg.p:
            lo, yg = verify_bound_chain(tau, cfg.region, p, cfg.margin)
            reports.append({"p": _p(p), "lower": lo.to_dict(), "young": yg.to_dict()})
        ok = all(r["lower"]["pass"] and r["young"]["pass"] for r in reports)
        _dump(_stamp({"symbol": cfg.symbol, "region": cfg.region.describe(),
                      "reports": reports, "pass": ok}, cfg), cfg.out)
        return EXIT_OK if ok else EXIT_FAIL

    batch = verify_batch(cfg.grid, cfg.region, cfg.p, cfg.samples, cfg.seed, cfg.margin)
    if cfg.csv:
        with open(cfg.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample", "p", "lp_norm", "schatten_norm", "smoothed_norm", "ratio"])
            for row in batch.ratio_rows():
                w.writerow([row[0], row[1]] + [f"{v:.17g}" for v in row[2:]])
    _dump(_stamp(batch.to_dict(), cfg), cfg.out)
    return EXIT_OK if batch.passed else EXIT_FAIL


def cmd_estimate(args):
    cfg = _config(args)
    results = []
    for p in cfg.p:
        est = estimate_constant(cfg.region, p, cfg.samples, cfg.seed, cfg.grid, cfg.margin)
        results.append(est.to_dict())
    doc = results[0] if len(results) == 1 else {"estimates": results}
    _dump(_stamp(doc, cfg), cfg.out)


def cmd_selftest(args):
    grid = PhaseGrid(args.N, args.L)
    return EXIT_OK if run_selftest(grid, args.trials) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qharmonic", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def files(name, fn, *names, help):
        sp = sub.add_parser(name, help=help)
        for n in names:
            sp.add_argument(n)
        sp.set_defaults(func=fn)
        return sp

    files("quantize", cmd_quantize, "input", "output", help="QHAGRID1 symbol -> QHAOP1 operator")
    files("symbol", cmd_symbol, "input", "output", help="QHAOP1 operator -> QHAGRID1 symbol")
    files("wigner", cmd_wigner, "psi", "phi", "output", help="two QHAVEC1 windows -> W(psi, phi)")
    files("sfourier", cmd_sfourier, "input", "output", help="symplectic Fourier transform")
    files("convolve", cmd_convolve, "a", "b", "output", help="convolution of two symbols")
    sp = files("opconv", cmd_opconv, "t", "s", "output", help="operator convolution T * S")
    sp.add_argument("--method", choices=("direct", "fast"), default="fast")
    sp = files("schatten", cmd_schatten, "input", help="Schatten norms of a QHAOP1 operator")
    sp.add_argument("--p", type=_exponents, default=(2.0,))
    sp.add_argument("--out")

    for name, fn, help in (("verify", cmd_verify, "certify the two-sided bound on random symbols"),
                           ("estimate-constant", cmd_estimate, "empirical division-lemma constant")):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--config", help="JSON file with RunConfig keys")
        sp.add_argument("--omega", help="region, e.g. disc:2 or rect:1,2")
        sp.add_argument("--p", type=_exponents)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--N", type=int)
        sp.add_argument("--L", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--margin", type=float)
        sp.add_argument("--out")
        sp.add_argument("--no-timestamp", action="store_true")
        if name == "verify":
            sp.add_argument("--csv", help="write the per-sample ratio table here")
            sp.add_argument("--symbol", help="verify this QHAGRID1 symbol instead of random ones")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("selftest", help="run the invariant suite")
    sp.add_argument("--N", type=int, default=64)
    sp.add_argument("--L", type=float, default=4.0)
    sp.add_argument("--trials", type=int, default=20)
    sp.set_defaults(func=cmd_selftest)
    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        code = args.func(args)
    except HypothesisViolation as exc:
        print(f"qharmonic: hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except FileFormatError as exc:
        print(f"qharmonic: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QHAError, OSError) as exc:
        print(f"qharmonic: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if code is None else code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
