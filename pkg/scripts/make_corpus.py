"""Regenerate the bundled synthetic corpus under data/synthetic."""
import argparse
from pathlib import Path

from fixscore.synthetic import write_corpus

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(ROOT / "data" / "synthetic"))
    ap.add_argument("-n", type=int, default=30, help="samples per modality")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    path = write_corpus(args.out, n=args.n, seed=args.seed)
    print(f"wrote {args.n} samples per modality to {path}")


if __name__ == "__main__":
    main()
