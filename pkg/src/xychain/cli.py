"""Command-line front end: ``xychain {verify,compile,sweep,pst}``.

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config, parse_angle
from .experiment import QubitState, amplitude_curve, fit_cos2, pst_transfer
from .nmrcompile import compile_u, fidelity, simulate_sequence
from .xymodel import decomposition_deviations, propagator_analytic

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _g12(x: float) -> str:
    return format(float(x) + 0.0, ".12g")


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc.strerror}") from None


def verify_phis(cfg: RunConfig, phi: float | None) -> np.ndarray:
    if phi is not None:
        return np.array([phi])
    rng = np.random.default_rng(cfg.verify_seed)
    return np.sort(rng.uniform(0.0, 2 * math.pi, cfg.verify_count))


def cmd_verify(cfg: RunConfig, phi: float | None = None, out=None) -> int:
    out = out or sys.stdout
    phis = verify_phis(cfg, phi)
    worst_phi, worst_pair, worst = 0.0, "", -1.0
    for p in phis:
        for pair, dev in decomposition_deviations(p).items():
            if dev > worst:
                worst_phi, worst_pair, worst = float(p), pair, dev
    ok = worst <= cfg.tol_verify
    print(f"phases checked: {len(phis)}", file=out)
    print(f"tolerance: {cfg.tol_verify:.3g}", file=out)
    print(f"max deviation: {worst:.3e}", file=out)
    if not ok:
        print(f"worst offender: phi={_g12(worst_phi)} ({worst_pair})", file=out)
    print("PASS" if ok else "FAIL", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_compile(cfg: RunConfig, phi: float, expand: bool, path: str, out=None) -> int:
    out = out or sys.stdout
    sys_ = cfg.spin_system
    seq = compile_u(phi, expand, sys_)
    _write(path, seq.to_text())
    f = fidelity(simulate_sequence(seq, sys_), propagator_analytic(phi))
    print(f"wrote {len(seq)} events to {path}", file=out)
    print(f"fidelity: {f:.9f}", file=out)
    print(f"total delay: {seq.duration:.6f} s", file=out)
    return EXIT_OK if 1 - f <= cfg.tol_compile else EXIT_FAIL


def cmd_sweep(cfg: RunConfig, branch: str, path: str, fit: bool = False, out=None) -> int:
    out = out or sys.stdout
    phis = np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_count)
    samples = amplitude_curve(phis, branch)
    lines = ["phi,amp_c1,amp_c3"]
    lines += [f"{_g12(s.phi)},{_g12(s.amp_c1)},{_g12(s.amp_c3)}" for s in samples]
    if fit:
        a1, a3, _ = fit_cos2(samples)
        lines.append(f"# fit a1={_g12(a1)} a3={_g12(a3)}")
        print(f"fit: a1={a1:.12f} a3={a3:.12f}", file=out)
    _write(path, "\n".join(lines) + "\n")
    print(f"wrote {len(samples)} samples (branch {branch}) to {path}", file=out)
    return EXIT_OK


def cmd_pst(cfg: RunConfig, alpha: complex, beta: complex, correct: bool, path: str, out=None) -> int:
    out = out or sys.stdout
    q = QubitState.normalized(alpha, beta)
    final, fid = pst_transfer(q, correct)
    record = {
        "alpha_re": float(q.alpha.real),
        "alpha_im": float(q.alpha.imag),
        "beta_re": float(q.beta.real),
        "beta_im": float(q.beta.imag),
        "fidelity": fid,
        "corrected": correct,
        "final_state": [[float(c.real) + 0.0, float(c.imag) + 0.0] for c in final],
    }
    _write(path, json.dumps(record, indent=2) + "\n")
    print(f"normalized input: alpha={q.alpha:.12g} beta={q.beta:.12g}", file=out)
    print(f"fidelity: {fid:.12f} (corrected={str(correct).lower()})", file=out)
    return EXIT_OK


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xychain", description="Three-spin XY chain: propagator checks, NMR pulse compilation, amplitude sweeps and state transfer.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file (defaults: trichloroethylene sample constants)")
    common.add_argument("--out", help="output path (overrides out.* in the config)")
    common.add_argument("--tol", type=float, help="tolerance override")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="three-way propagator agreement check")
    p.add_argument("--phi", type=_angle, help="check a single phase instead of random samples")

    p = sub.add_parser("compile", parents=[common], help="write the NMR pulse sequence")
    p.add_argument("--phi", type=_angle, default=math.pi / 2, help="phase, e.g. 0.5pi (default)")
    p.add_argument("--expand", action="store_true", help="expand composite blocks into hard pulses")

    p = sub.add_parser("sweep", parents=[common], help="C1/C3 amplitude sweep as CSV")
    p.add_argument("--branch", choices=("A", "B"), default="A")
    p.add_argument("--fit", action="store_true", help="append the cos^2/sin^2 fit")

    p = sub.add_parser("pst", parents=[common], help="perfect state transfer of one qubit")
    for name, default in (("alpha-re", 1.0), ("alpha-im", 0.0), ("beta-re", 0.0), ("beta-im", 0.0)):
        p.add_argument(f"--{name}", type=float, default=default)
    p.add_argument("--correct", action="store_true", help="apply sigma_z on spin 3")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.tol is not None:
            if not args.tol > 0:
                raise ConfigError("--tol must be positive")
            key = "tol_compile" if args.command == "compile" else "tol_verify"
            cfg = cfg.with_overrides(**{key: args.tol})
        if args.command == "verify":
            return cmd_verify(cfg, args.phi)
        if args.command == "compile":
            return cmd_compile(cfg, args.phi, args.expand, args.out or cfg.out_compile)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.branch, args.out or cfg.out_sweep, args.fit)
        alpha = complex(args.alpha_re, args.alpha_im)
        beta = complex(args.beta_re, args.beta_im)
        return cmd_pst(cfg, alpha, beta, args.correct, args.out or cfg.out_pst)
    except (ConfigError, ValueError) as exc:
        print(f"xychain: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
