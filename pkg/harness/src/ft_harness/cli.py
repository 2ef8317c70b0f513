"""Command-line entry mirroring HarnessConfig; nonzero exit on bad inputs."""

from __future__ import annotations

import argparse
import json
import sys

from .harness import HarnessConfig, finetune_and_predict


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ft-harness",
        description="Fine-tune a transformer sentence classifier and write "
        "the predictions interchange file",
    )
    parser.add_argument("--train-labels", required=True, help="labels CSV (id,label)")
    parser.add_argument("--train-sentences", required=True, help="sentences JSONL")
    parser.add_argument("--eval-sentences", required=True, help="sentences JSONL to score")
    parser.add_argument("--model-name", required=True,
                        help="pretrained model name or local path")
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--epochs", type=int, default=2)
    parser.add_argument("--learning-rate", type=float, default=2e-5)
    parser.add_argument("--max-len", type=int, default=100)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", default="predictions.jsonl")
    args = parser.parse_args(argv)

    try:
        cfg = HarnessConfig(
            model_name=args.model_name,
            batch_size=args.batch_size,
            epochs=args.epochs,
            learning_rate=args.learning_rate,
            max_len=args.max_len,
            seed=args.seed,
        )
        n = finetune_and_predict(
            args.train_labels, args.train_sentences, args.eval_sentences, cfg, args.out
        )
    except (ValueError, FileNotFoundError, OSError) as exc:
        json.dump({"error": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    print(f"wrote {n} predictions -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
