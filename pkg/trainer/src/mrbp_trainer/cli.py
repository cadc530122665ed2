"""Command-line trainer: `mrbp-train --dataset D --arch gru_d2 --out w.bin`."""

from __future__ import annotations

import argparse
import sys

from .data import load_dataset
from .evaluate import evaluate_topT
from .training import TrainConfig, train


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mrbp-train")
    parser.add_argument("--dataset", required=True)
    parser.add_argument("--arch", default="gru_d2",
                        choices=["mlpa_d1", "mlpa_d2", "mlpb_d2", "gru_d2"])
    parser.add_argument("--epochs", type=int, default=250)
    parser.add_argument("--lr", type=float, default=1e-4)
    parser.add_argument("--batch-size", type=int, default=4096)
    parser.add_argument("--val-split", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--loss", choices=["bce", "mse"], default="bce")
    parser.add_argument("--max-records", type=int)
    parser.add_argument("--eval-top", type=int, default=5,
                        help="report the top-T hit rate on the validation split")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    config = TrainConfig(dataset=args.dataset, architecture=args.arch,
                         epochs=args.epochs, lr=args.lr,
                         batch_size=args.batch_size,
                         val_fraction=args.val_split, seed=args.seed,
                         loss=args.loss, max_records=args.max_records,
                         out=args.out)

    def progress(epoch, report):
        print(f"epoch {epoch + 1}/{config.epochs} "
              f"train={report.train_loss[-1]:.5f} val={report.val_loss[-1]:.5f} "
              f"lr={report.lr_trace[-1]:.2e}", flush=True)

    model, report = train(config, progress=progress)
    print(f"best val loss {report.best_val:.5f} at epoch {report.best_epoch + 1}; "
          f"{report.parameters:,} parameters; torch {report.torch_version}; "
          f"wall {report.wall_time:.0f}s")
    ds = load_dataset(args.dataset)
    hit = evaluate_topT(model, ds, args.eval_top)
    print(f"top-{args.eval_top} hit rate on the full dataset: {hit:.4f}")
    print(f"weights written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
