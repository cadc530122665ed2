#!/usr/bin/env python3
"""Desk-scale learned-rule evaluation.

Trains a gru_d2 model on >= 500k labeled failures of the (96,48) code at
3 dB, exports the weight container, then checks two things using the
exported artifact end to end: (a) the top-5 hit rate on 20k held-out
records beats the random baseline T/n by at least 3x, and (b) multi-round
FER with the learned rule at T=5 is no worse than the oscillation expert
rule within 95% confidence intervals.

Usage:
    python trainer/scripts/desk_eval.py --dataset /root/work/qc96_d2_520k.ds \
        --epochs 4 --lr 2e-4 --out-dir /root/work/desk

Writes gru_d2.bin and desk_report.json into --out-dir and prints one
PASS/FAIL line per criterion.  --skip-train reuses an existing gru_d2.bin.
"""

from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

import numpy as np

from mrbp.codes import load_alist
from mrbp.models import forward_gru_batch, load_weights
from mrbp.simulate import SimConfig, run_point

from mrbp_trainer.data import FlipDataset, load_dataset
from mrbp_trainer.evaluate import top_t_hit_rate
from mrbp_trainer.training import TrainConfig, train

HOLDOUT = 20_000
T = 5


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--dataset", required=True)
    parser.add_argument("--epochs", type=int, default=4)
    parser.add_argument("--lr", type=float, default=2e-4)
    parser.add_argument("--batch-size", type=int, default=1024)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="/root/work/desk")
    parser.add_argument("--code", default=str(Path(__file__).parents[2]
                                              / "codes" / "qc_96_48.alist"))
    parser.add_argument("--snr-db", type=float, default=3.0)
    parser.add_argument("--target-errors", type=int, default=150)
    parser.add_argument("--skip-train", action="store_true",
                        help="reuse out-dir/gru_d2.bin from an earlier run")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    weights_path = out_dir / "gru_d2.bin"

    full = load_dataset(args.dataset)
    assert len(full) >= 500_000 + HOLDOUT, "need >= 520k records"
    train_ds = FlipDataset(header=full.header, inputs=full.inputs[:-HOLDOUT],
                           labels=full.labels[:-HOLDOUT])
    held = FlipDataset(header=full.header, inputs=full.inputs[-HOLDOUT:],
                       labels=full.labels[-HOLDOUT:])
    print(f"dataset: {len(full)} records ({len(train_ds)} train, "
          f"{len(held)} held out), n={full.n}", flush=True)

    report = {"dataset": args.dataset, "train_records": len(train_ds),
              "epochs": args.epochs, "lr": args.lr, "seed": args.seed}

    if not args.skip_train:
        config = TrainConfig(dataset="", architecture="gru_d2",
                             epochs=args.epochs, lr=args.lr,
                             batch_size=args.batch_size, val_fraction=0.02,
                             seed=args.seed, out=str(weights_path))
        t0 = time.monotonic()

        def progress(epoch, rep):
            print(f"epoch {epoch + 1}/{args.epochs} "
                  f"train={rep.train_loss[-1]:.5f} val={rep.val_loss[-1]:.5f} "
                  f"lr={rep.lr_trace[-1]:.2e} "
                  f"({time.monotonic() - t0:.0f}s)", flush=True)

        _, train_rep = train(config, dataset=train_ds, progress=progress)
        report.update(train_loss=train_rep.train_loss,
                      val_loss=train_rep.val_loss,
                      best_val=train_rep.best_val,
                      train_wall_s=train_rep.wall_time)

    weights = load_weights(weights_path)

    # criterion A: top-5 hit rate on held-out records vs the random baseline,
    # computed from the exported container
    scores = np.concatenate([forward_gru_batch(weights, held.inputs[a:a + 2048])
                             for a in range(0, len(held), 2048)])
    hit = top_t_hit_rate(scores, held.labels, T)
    baseline = T / full.n
    ok_hit = hit >= 3.0 * baseline
    print(f"DESK top5-hit-rate: {'PASS' if ok_hit else 'FAIL'} "
          f"(hit={hit:.4f}, baseline T/n={baseline:.4f}, "
          f"ratio={hit / baseline:.2f}, needs >= 3)", flush=True)
    report.update(top5_hit=hit, top5_baseline=baseline)

    # criterion B: learned rule vs expert rule at T=5 on fresh frames
    code = load_alist(args.code)
    points = {}
    for rule in ("nsmea", "nn"):
        config = SimConfig(code=args.code, decoder="mrbp", rule=rule, T=T,
                           l0=full.header["l0"], l1=full.header["l1"],
                           snrs_db=(args.snr_db,),
                           target_errors=args.target_errors,
                           max_frames=500_000, seed=777, workers=2, batch=4096,
                           weights=str(weights_path) if rule == "nn" else None)
        p = run_point(code, config, args.snr_db,
                      weights if rule == "nn" else None)
        points[rule] = p
        print(f"  {rule}: fer={p.fer:.5f} "
              f"CI=[{p.fer_ci95[0]:.5f},{p.fer_ci95[1]:.5f}] "
              f"({p.frame_errors}/{p.frames})", flush=True)
        report[f"fer_{rule}"] = {"fer": p.fer, "ci": list(p.fer_ci95),
                                 "errors": p.frame_errors, "frames": p.frames}
    nn_p, ex_p = points["nn"], points["nsmea"]
    ok_fer = nn_p.fer <= ex_p.fer or nn_p.fer_ci95[0] <= ex_p.fer_ci95[1]
    print(f"DESK learned-vs-expert-fer: {'PASS' if ok_fer else 'FAIL'} "
          f"(nn={nn_p.fer:.5f}, nsmea={ex_p.fer:.5f}; 'no worse within CI')",
          flush=True)

    report.update(pass_top5=bool(ok_hit), pass_fer=bool(ok_fer))
    (out_dir / "desk_report.json").write_text(json.dumps(report, indent=2))
    print(f"report written to {out_dir / 'desk_report.json'}")
    return 0 if (ok_hit and ok_fer) else 1


if __name__ == "__main__":
    raise SystemExit(main())
