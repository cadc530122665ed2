"""Command-line front end: `mrbp simulate`, `mrbp info`, `mrbp gen-dataset`."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .channel import SnrSpec
from .codes import load_alist
from .data import build_dataset, write_dataset
from .models import load_weights
from .simulate import SimConfig, emit_results, run_sweep


def parse_snrs(text: str) -> tuple:
    """SNR list: 'a:b:step' (inclusive), comma list, or a single value."""
    if ":" in text:
        parts = [float(t) for t in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError(
                "range must be start:stop:step with positive step")
        start, stop, step = parts
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise argparse.ArgumentTypeError("empty SNR range")
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(float(t) for t in text.split(","))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrbp")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte-Carlo FER/BER sweep")
    sim.add_argument("--code", required=True, help="alist file")
    sim.add_argument("--decoder", choices=["bp", "mrbp"], default="bp")
    sim.add_argument("--rule", choices=["chmag", "appmag", "nsmea", "nn"],
                     default="nsmea")
    sim.add_argument("--T", type=int, default=5)
    sim.add_argument("--l0", type=int, default=20)
    sim.add_argument("--l1", type=int, default=20)
    sim.add_argument("--sat", type=float, default=1e6)
    sim.add_argument("--snr", type=parse_snrs, required=True,
                     help="Eb/N0 in dB: 'a:b:step', 'x,y,z' or a single value")
    sim.add_argument("--target-errors", type=int, default=100)
    sim.add_argument("--max-frames", type=int, default=10_000_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--batch", type=int, default=2048)
    sim.add_argument("--weights", help="model container for --rule nn")
    sim.add_argument("--all-zero", action="store_true",
                     help="transmit the all-zero codeword instead of random ones")
    sim.add_argument("--genie-check", action="store_true")
    sim.add_argument("--out", required=True)
    sim.add_argument("--format", choices=["csv", "json"], default="csv")

    info = sub.add_parser("info", help="print code parameters")
    info.add_argument("--code", required=True)

    gen = sub.add_parser("gen-dataset", help="generate labeled BP failures")
    gen.add_argument("--code", required=True)
    gen.add_argument("--snr-db", type=float, required=True)
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--l0", type=int, default=20)
    gen.add_argument("--l1", type=int, default=20)
    gen.add_argument("--sat", type=float, default=1e6)
    gen.add_argument("--kind", choices=["d1", "d2"], default="d2")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--workers", type=int, default=1)
    gen.add_argument("--random-codewords", action="store_true",
                     help="force random codewords (default: all-zero for d2)")
    gen.add_argument("--loose-labels", action="store_true",
                     help="label on convergence to any codeword")
    gen.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "info":
        code = load_alist(args.code)
        vprof, cprof = code.degree_profile()
        print(f"n={code.n} m={code.m} k={code.k} rank={code.rank} "
              f"edges={code.num_edges}")
        print("VN degrees: " + " ".join(f"{d}x{c}" for d, c in sorted(vprof.items())))
        print("check degrees: " + " ".join(f"{d}x{c}" for d, c in sorted(cprof.items())))
        return 0

    if args.command == "simulate":
        code = load_alist(args.code)
        weights = load_weights(args.weights) if args.weights else None
        config = SimConfig(code=args.code, decoder=args.decoder, rule=args.rule,
                           T=args.T, sat=args.sat, l0=args.l0, l1=args.l1,
                           snrs_db=args.snr, target_errors=args.target_errors,
                           max_frames=args.max_frames, seed=args.seed,
                           workers=args.workers, batch=args.batch,
                           all_zero=args.all_zero, weights=args.weights,
                           genie_check=args.genie_check)
        result = run_sweep(code, config, weights)
        emit_results(result, args.format, args.out)
        for p in result.points:
            lo, hi = p.fer_ci95
            print(f"snr={p.snr_db:g} frames={p.frames} errors={p.frame_errors} "
                  f"fer={p.fer:.4g} [{lo:.3g}, {hi:.3g}] ber={p.ber:.4g} "
                  f"undetected={p.undetected} wall={p.wall_time:.1f}s")
        return 0

    if args.command == "gen-dataset":
        code = load_alist(args.code)
        all_zero = None
        if args.random_codewords:
            all_zero = False
        header, records = build_dataset(
            code, SnrSpec(args.snr_db, code.k / code.n), args.l0, args.l1,
            args.count, args.seed, kind=args.kind, all_zero=all_zero,
            sat=args.sat, strict=not args.loose_labels, workers=args.workers)
        write_dataset(args.out, header, records)
        pos = records.labels.any(axis=1).mean()
        print(f"wrote {header.count} records to {args.out} "
              f"(repairable fraction {pos:.3f})")
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
