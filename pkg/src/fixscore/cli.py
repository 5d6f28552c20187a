"""Batch command line: ``fixscore {extract,score,evaluate,bootstrap}``.

Exit status is 0 on success, 2 for usage/configuration problems and 1 for
data problems (unreadable or malformed inputs).
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .core import ExplicitScorer, fix_score, group_scores
from .errors import ConfigurationError, FixScoreError, ParseError
from .extractors import extract, parse_extractor
from .harness import (SCORER_MODALITY, SCORERS, bootstrap_std, build_scorer, evaluate, format_table,
                      load_dataset, write_report)

EPILOG = """\
extractors (KIND[:PARAMS]):
  identity                     one group holding every feature
  random[:groups=N]            random partition; default group maximum =
                               ceil(1.5 x expert features): massmaps 25,
                               supernova 9, politeness 40, emotion 40
  patch[:RxC]                  image grid, default 8x8
  slice[:W]                    consecutive timestamps, try 5, 10, 15 (default 5)
  words | phrases | sentences  text units split at punctuation
  quickshift[:K,D,S,R]         kernel_size=5, max_dist=10, sigma=0.2, ratio=1
  clustering:k=N[,base=KIND]   k-means merge of base segments
  expert                       the annotated groups themselves (explicit data)

scorers:
  massmaps    void/cluster purity x ratio (image); params void_below=0, cluster_sigmas=3, eps=1e-6
  supernova   linear consistency x density (series); params eps=1, window=10, step=5
  politeness  lexicon-centroid cosine (text); needs --embeddings and --lexicon
  emotion     circumplex signal/relatedness (text); needs --embeddings, optional --anchors
  explicit    best IoU against annotations (any modality with .rle companions)

config file: one 'key = value' per line using the long flag names
(extractor may list several kinds separated by ';'; scorer params as param.NAME).
Flags override the config file, which overrides defaults.
"""

DEFAULTS = {"seed": None, "iters": 1000, "workers": 1, "index": 0}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="sample file or dataset directory")
    p.add_argument("--modality", choices=("image", "series", "text"))
    p.add_argument("--scorer", choices=SCORERS)
    p.add_argument("--seed", type=int, help="required for random/clustering extractors")
    p.add_argument("--out", help="output path")
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--embeddings", help="word<TAB>vector file (text)")
    p.add_argument("--lexicon", action="append", metavar="[LANG=]PATH",
                   help="politeness lexicon, repeat per language")
    p.add_argument("--anchors", help="PV/NV/HA/LA anchor word lists (emotion)")
    p.add_argument("--param", action="append", metavar="NAME=VALUE", help="scorer parameter")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fixscore", description="Score feature groups against expert criteria.",
                     epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="verb", metavar="VERB", parser_class=_Parser)

    p = sub.add_parser("extract", help="run an extractor on one sample and write its groups",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    p.add_argument("--extractor", help="extractor spec, e.g. patch:8x8")
    p.add_argument("--index", type=int, help="record number for text files (0-based)")

    p = sub.add_parser("score", help="score a group file against one sample",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    p.add_argument("--groups", help="mask file with the proposed groups")
    p.add_argument("--annotations", help="mask file with expert groups (explicit scorer)")
    p.add_argument("--index", type=int, help="record number for text files (0-based)")

    p = sub.add_parser("evaluate", help="mean FIXScore per extractor over a dataset",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    p.add_argument("--extractor", action="append", help="extractor spec; repeat for several rows")
    p.add_argument("--iters", type=int, help="bootstrap resamples (default 1000)")
    p.add_argument("--workers", type=int, help="parallel samples (default 1)")

    p = sub.add_parser("bootstrap", help="bootstrap std of the mean of a score list")
    _common(p)
    p.add_argument("--iters", type=int, help="bootstrap resamples (default 1000)")
    return parser


def read_config(path) -> dict:
    out: dict = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, ln in enumerate(lines, start=1):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        key, eq, value = ln.partition("=")
        if not eq:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults < config file < command-line flags."""
    settings = dict(DEFAULTS)
    params: dict = {}
    if args.config:
        for key, value in read_config(args.config).items():
            if key.startswith("param."):
                params[key[6:]] = value
            elif key == "extractor":
                settings[key] = [v.strip() for v in value.split(";") if v.strip()]
            elif key == "lexicon":
                settings[key] = [v.strip() for v in value.split(";") if v.strip()]
            elif key in ("seed", "iters", "workers", "index"):
                try:
                    settings[key] = int(value)
                except ValueError:
                    raise UsageError(f"config: {key} must be an integer") from None
            else:
                settings[key] = value
    for key, value in vars(args).items():
        if key in ("config", "param", "verb") or value is None:
            continue
        settings[key] = value
    for item in args.param or []:
        key, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        params[key.strip()] = value.strip()
    if isinstance(settings.get("extractor"), str):
        settings["extractor"] = [settings["extractor"]]
    if isinstance(settings.get("lexicon"), str):
        settings["lexicon"] = [settings["lexicon"]]
    settings["params"] = params
    return settings


def _need(settings: dict, *keys: str) -> None:
    for key in keys:
        if settings.get(key) in (None, "", []):
            raise UsageError(f"--{key} is required")


def _modality(settings: dict) -> str:
    mod = settings.get("modality")
    scorer = settings.get("scorer")
    if mod is None and scorer in SCORER_MODALITY:
        mod = SCORER_MODALITY[scorer]
    if mod is None:
        suffix = Path(settings.get("input", "")).suffix
        mod = {".raster": "image", ".csv": "series", ".tsv": "text"}.get(suffix)
    if mod is None:
        raise UsageError("cannot infer --modality; pass it explicitly")
    if mod not in ("image", "series", "text"):
        raise UsageError(f"unknown modality {mod!r}")
    if scorer in SCORER_MODALITY and SCORER_MODALITY[scorer] != mod:
        raise ConfigurationError(f"scorer {scorer!r} needs {SCORER_MODALITY[scorer]} data, not {mod}")
    return mod


def _lexica(settings: dict):
    entries = settings.get("lexicon")
    if not entries:
        return None
    out = {}
    for item in entries:
        lang, eq, path = item.partition("=")
        if eq:
            out[lang.strip()] = path.strip()
        else:
            out["*"] = item
    return out


def _dataset(settings: dict, modality: str):
    return load_dataset(settings["input"], modality, embeddings=settings.get("embeddings"),
                        lexica=_lexica(settings), anchors=settings.get("anchors"))


def _one_sample(settings: dict, modality: str):
    ds = _dataset(settings, modality)
    idx = settings.get("index", 0)
    if not 0 <= idx < len(ds):
        raise UsageError(f"--index {idx} out of range for {len(ds)} samples")
    ann = ds.annotations[idx] if ds.annotations is not None else None
    return ds, ds.samples[idx], ann


def _labelled(groups) -> list[str]:
    return [f"g{j}" for j in range(len(groups))]


def cmd_extract(settings: dict, out) -> int:
    _need(settings, "input", "extractor")
    if len(settings["extractor"]) != 1:
        raise UsageError("extract takes exactly one --extractor")
    modality = _modality(settings)
    config = parse_extractor(settings["extractor"][0], settings.get("seed"))
    ds, x, ann = _one_sample(settings, modality)
    groups = extract(config, x, scorer=settings.get("scorer"), annotations=ann, embeddings=ds.embeddings)
    if settings.get("out"):
        io.write_masks(groups, settings["out"], _labelled(groups))
    else:
        for label, m in zip(_labelled(groups), groups.masks):
            out.write(f"{label}\t{io.encode_rle(m)}\n")
    return 0


def cmd_score(settings: dict, out) -> int:
    _need(settings, "input", "groups")
    modality = _modality(settings)
    ds, x, ann = _one_sample(settings, modality)
    if settings.get("annotations"):
        ann = io.load_masks(settings["annotations"], x.d)[0]
    scorer_name = settings.get("scorer") or ("explicit" if ann is not None else None)
    if scorer_name is None:
        raise UsageError("--scorer is required for unannotated samples")
    if scorer_name == "explicit":
        if ann is None:
            raise ConfigurationError("explicit scorer needs --annotations or a .rle companion")
        scorer = ExplicitScorer(ann)
    else:
        scorer = build_scorer(scorer_name, ds, settings["params"])
    groups, labels = io.load_masks(settings["groups"], x.d)
    scores = group_scores(groups, x, scorer)
    lines = [f"{lab}\t{s!r}" for lab, s in zip(labels, scores.tolist())]
    lines.append(f"FIXScore\t{fix_score(groups, x, scorer)!r}")
    text = "\n".join(lines) + "\n"
    if settings.get("out"):
        Path(settings["out"]).write_text(text, encoding="utf-8")
    out.write(text)
    return 0


def cmd_evaluate(settings: dict, out) -> int:
    _need(settings, "input", "extractor")
    modality = _modality(settings)
    configs = [parse_extractor(spec, settings.get("seed")) for spec in settings["extractor"]]
    ds = _dataset(settings, modality)
    scorer = settings.get("scorer")
    if scorer is None and not ds.explicit:
        raise UsageError("--scorer is required for unannotated datasets")
    reports = [evaluate(ds, c, scorer, seed=settings.get("seed"), boot_iters=settings["iters"],
                        workers=settings["workers"], scorer_params=settings["params"]) for c in configs]
    for r in reports:
        r.config["settings"] = {k: v for k, v in sorted(settings.items()) if k not in ("out",)}
    out.write(format_table(reports) + "\n")
    if settings.get("out"):
        write_report(reports, settings["out"])
    return 0


def cmd_bootstrap(settings: dict, out) -> int:
    _need(settings, "input")
    path = Path(settings["input"])
    try:
        tokens = path.read_text(encoding="utf-8").split()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path) from None
    try:
        scores = np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise ParseError(str(exc), path) from None
    if not np.isfinite(scores).all():
        raise ParseError("scores must be finite", path)
    seed = settings.get("seed") or 0
    std = bootstrap_std(scores, settings["iters"], seed)
    text = f"n\t{scores.size}\nmean\t{float(scores.mean())!r}\nboot_std\t{std!r}\niters\t{settings['iters']}\nseed\t{seed}\n"
    if settings.get("out"):
        Path(settings["out"]).write_text(text, encoding="utf-8")
    out.write(text)
    return 0


COMMANDS = {"extract": cmd_extract, "score": cmd_score, "evaluate": cmd_evaluate, "bootstrap": cmd_bootstrap}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out):
            args = parser.parse_args(argv)
        if args.verb is None:
            parser.print_help(out)
            return 2
        logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                            format="%(levelname)s %(name)s: %(message)s")
        settings = resolve(args)
        return COMMANDS[args.verb](settings, out)
    except (UsageError, ConfigurationError) as exc:
        err.write(f"fixscore: error: {exc}\n")
        return 2
    except (FixScoreError, OSError) as exc:
        err.write(f"fixscore: {exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
