"""Baseline table over the synthetic corpus: one block per setting, one row per extractor.

Writes <out>/<setting>.tsv (plus .json sidecars) and prints aligned tables.
"""
import argparse
import time
from pathlib import Path

from fixscore.harness import evaluate, format_table, load_dataset, write_report

ROOT = Path(__file__).resolve().parents[1]

SETTINGS = {
    "massmaps": ("massmaps", "image", "massmaps",
                 ["identity", "random", "patch:8x8", "quickshift", "clustering:k=6"]),
    "supernova": ("supernova", "series", "supernova",
                  ["identity", "random", "slice:5", "slice:10", "slice:15", "clustering:k=4"]),
    "politeness": ("text", "text", "politeness",
                   ["identity", "random", "words", "phrases", "sentences", "clustering:k=4"]),
    "emotion": ("text", "text", "emotion",
                ["identity", "random", "words", "phrases", "sentences", "clustering:k=4"]),
    "explicit": ("explicit", "image", None,
                 ["expert", "identity", "random", "patch:4x4", "quickshift:2,4", "clustering:k=4"]),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--corpus", default=str(ROOT / "data" / "synthetic"))
    ap.add_argument("--out", default=str(ROOT / "results"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--iters", type=int, default=1000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", nargs="*", choices=sorted(SETTINGS))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.only or SETTINGS:
        sub, modality, scorer, extractors = SETTINGS[name]
        ds = load_dataset(Path(args.corpus) / sub, modality)
        t0 = time.perf_counter()
        reports = [evaluate(ds, e, scorer, seed=args.seed, boot_iters=args.iters, workers=args.workers)
                   for e in extractors]
        write_report(reports, out / f"{name}.tsv")
        print(f"== {name} ({len(ds)} samples, {time.perf_counter() - t0:.1f}s)")
        print(format_table(reports))
        print()


if __name__ == "__main__":
    main()
