"""Command line front end.

Subcommands: ``classify``, ``analyze``, ``frame``, ``reconstruct``, ``verify``.
Exit status is 0 on success, 1 when a verification or frame check fails and
2 on input errors. ``MTFA_THREADS`` caps the number of worker threads used
by the compiled kernels.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import distributions as dist
from . import frames as fr
from . import io
from . import modspaces as ms
from . import verify as vf
from .gaussian import standard_gaussian
from .metaplectic import SampledSignal
from .symplectic import BlockSymplectic, classify, make_named

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def _exponent(text: str) -> float:
    try:
        return ms.MixedNormSpec(text, 2).p
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--matrix", metavar="PATH", help="projection as JSON {d, rows}")
    common.add_argument("--signal", metavar="PATH", help="signal CSV")
    common.add_argument("--window", metavar="PATH", help="window CSV (default: standard Gaussian)")
    common.add_argument("--tau", type=float, help="use the tau-Wigner projection instead of --matrix")
    common.add_argument("--hbar", type=float, help="use the hbar-STFT projection instead of --matrix")
    common.add_argument("--p", type=_exponent, default=2.0, help="mixed-norm exponent over x (number or inf)")
    common.add_argument("--q", type=_exponent, default=2.0, help="mixed-norm exponent over xi (number or inf)")
    common.add_argument("--s", type=float, default=0.0, help="weight exponent of (1+|z|^2)^(s/2)")
    common.add_argument("--a", type=float, default=0.5, help="lattice step in x")
    common.add_argument("--b", type=float, default=0.5, help="lattice step in xi")
    common.add_argument("--N", type=int, default=256, help="grid size when no signal file is given")
    common.add_argument("--dx", type=float, default=1 / 16, help="grid spacing when no signal file is given")
    common.add_argument("--out", metavar="PATH", help="output file")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")

    p = argparse.ArgumentParser(prog="mtfa", description="Metaplectic time-frequency analysis toolkit")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("classify", parents=[common], help="classify a matrix (symplectic, covariant, shift-invertible)")
    sub.add_parser("analyze", parents=[common], help="compute W_A(f, g) on the grid")
    sub.add_parser("frame", parents=[common], help="canonical dual window and frame bounds")
    sub.add_parser("reconstruct", parents=[common], help="frame analysis/synthesis round trip")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", default="all", choices=sorted(vf.SUITES) + ["all"])
    return p


def _projection(args) -> BlockSymplectic:
    given = [args.matrix is not None, args.tau is not None, args.hbar is not None]
    if sum(given) != 1:
        raise UsageError("give exactly one of --matrix, --tau, --hbar")
    if args.matrix is not None:
        A = io.read_matrix(args.matrix)
    elif args.tau is not None:
        A = make_named("tau", tau=args.tau)
    else:
        A = make_named("hbar", hbar=args.hbar)
    if A.n != 2:
        raise UsageError(f"expected a 4 x 4 projection (d = 1), got {A.matrix.shape}")
    return A


def _grid(args):
    if args.N < 2 or args.N & (args.N - 1):
        raise UsageError(f"--N must be a power of two, got {args.N}")
    if not args.dx > 0:
        raise UsageError("--dx must be positive")
    return args.N, args.dx


def _signal(path, args) -> SampledSignal:
    if path is None:
        N, dx = _grid(args)
        return SampledSignal.from_gaussian(standard_gaussian(), N, dx)
    return io.read_signal(path)


def _emit(args, report: dict):
    text = io.write_report(None, report)
    if args.out and Path(args.out).suffix.lower() == ".json":
        io.write_report(args.out, report)
    sys.stdout.write(text)


def cmd_classify(args) -> int:
    if args.matrix is None:
        raise UsageError("classify needs --matrix")
    M = io.read_matrix(args.matrix, check=False)
    sys.stdout.write(io.write_report(None, classify(M).to_dict()))
    return EXIT_OK


def cmd_analyze(args) -> int:
    A = _projection(args)
    if args.signal is None:
        raise UsageError("analyze needs --signal")
    f = io.read_signal(args.signal)
    g = io.read_signal(args.window) if args.window else f
    W = dist.wigner_A_grid(A, f, g)
    if args.out:
        io.write_grid(args.out, W)
    a = np.abs(W.values)
    i, k = np.unravel_index(np.argmax(a), a.shape)
    spec = ms.MixedNormSpec(args.p, args.q, args.s)
    report = {
        "N": W.N,
        "dx": W.dx,
        "dxi": W.dxi,
        "path": W.meta.get("path"),
        "spill": W.spill,
        "peak": {"x": float(W.x[i]), "xi": float(W.xi[k]), "modulus": float(a[i, k])},
        "norm": W.norm(),
        "mixed_norm": {"spec": spec.to_dict(), "value": ms.mixed_norm(W, spec)},
        "output": args.out,
    }
    sys.stdout.write(io.write_report(None, report))
    return EXIT_OK


def _frame_report(A, g, lat, dw=None, exc=None) -> dict:
    rep = {"N": g.N, "dx": g.dx, "lattice": lat.to_dict(), "projection": A.matrix.tolist()}
    if dw is not None:
        rep.update(frame=True, bounds=list(dw.bounds), iterations=dw.iterations, residual=dw.residual)
    else:
        rep.update(frame=False, bounds=list(exc.bounds), iterations=exc.iterations, residual=exc.residual,
                   diagnostic=str(exc))
    return rep


def cmd_frame(args) -> int:
    A = _projection(args)
    g = _signal(args.window, args)
    lat = fr.Lattice(args.a, args.b)
    lat.check_grid(g.N, g.dx)
    try:
        dw = fr.dual_window(A, g, lat)
    except fr.NotAFrameError as exc:
        _emit(args, _frame_report(A, g, lat, exc=exc))
        print(f"mtfa: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rep = _frame_report(A, g, lat, dw)
    if args.out:
        out = Path(args.out)
        dual = out.with_suffix(".csv") if out.suffix.lower() == ".json" else out
        io.write_signal(dual, dw.gamma)
        rep["dual_window"] = str(dual)
    _emit(args, rep)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    A = _projection(args)
    if args.signal is None:
        raise UsageError("reconstruct needs --signal")
    f = io.read_signal(args.signal)
    g = io.read_signal(args.window) if args.window else SampledSignal.from_gaussian(standard_gaussian(), f.N, f.dx)
    lat = fr.Lattice(args.a, args.b)
    lat.check_grid(f.N, f.dx)
    try:
        fs = fr.FrameSystem(A, g, lat)
        dw = fr.dual_window(A, g, lat, system=fs)
    except fr.NotAFrameError as exc:
        _emit(args, _frame_report(A, g, lat, exc=exc))
        print(f"mtfa: {exc}", file=sys.stderr)
        return EXIT_FAIL
    coeffs = fs.analysis(f)
    rec = fr.reconstruct(A, g, dw.gamma, lat, coeffs)
    err = float(np.linalg.norm(rec.values - f.values) / np.linalg.norm(f.values))
    rep = _frame_report(A, g, lat, dw)
    rep.update(reconstruction_error=err, coefficients=len(coeffs))
    if args.out and Path(args.out).suffix.lower() == ".csv":
        io.write_signal(args.out, rec)
        rep["reconstruction"] = args.out
    _emit(args, rep)
    return EXIT_OK


def cmd_verify(args) -> int:
    N, dx = _grid(args)
    results = vf.run_suites(args.suite, seed=args.seed, N=N, dx=dx)
    for r in results:
        print(f"== {r.name} ({r.elapsed:.1f} s)")
        for line in r.lines():
            print(line)
    ok = all(r.passed for r in results)
    print("ALL PASS" if ok else "SOME CHECKS FAILED")
    if args.out:
        io.write_report(args.out, {"passed": ok, "seed": args.seed, "N": N,
                                   "suites": [r.to_dict() for r in results]})
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "classify": cmd_classify,
    "analyze": cmd_analyze,
    "frame": cmd_frame,
    "reconstruct": cmd_reconstruct,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"mtfa: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
