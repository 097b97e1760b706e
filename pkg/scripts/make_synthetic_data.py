#!/usr/bin/env python3
"""Generate the synthetic benchmark dataset: an evaluation corpus with
per-subgroup card-position CSVs, plus a disjoint training corpus."""

import argparse
import csv
from pathlib import Path

from ticketrec.corpus import save_tickets
from ticketrec.synthetic import make_synthetic_corpus, make_synthetic_positions


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data", help="output directory")
    parser.add_argument("--per-category", type=int, default=30)
    parser.add_argument("--train-per-category", type=int, default=20)
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args()

    out = Path(args.out_dir)
    positions_dir = out / "positions"
    positions_dir.mkdir(parents=True, exist_ok=True)

    corpus = make_synthetic_corpus(args.per_category, seed=args.seed)
    save_tickets(corpus, out / "eval.jsonl")
    train = make_synthetic_corpus(
        args.train_per_category, seed=args.seed + 86, id_prefix="TRAIN"
    )
    save_tickets(train, out / "train.jsonl")

    for group, positions in make_synthetic_positions(corpus, seed=args.seed).items():
        with (positions_dir / f"subgroup_{group}.csv").open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["external_id", "x", "y"])
            for p in positions:
                writer.writerow([p.external_id, p.x, p.y])

    print(f"eval corpus : {out / 'eval.jsonl'} ({len(corpus)} tickets)")
    print(f"train corpus: {out / 'train.jsonl'} ({len(train)} tickets)")
    print(f"positions   : {positions_dir}/subgroup_{{0,1,2}}.csv")


if __name__ == "__main__":
    main()
