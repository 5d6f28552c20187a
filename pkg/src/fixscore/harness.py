"""Dataset-level evaluation, bootstrap statistics and report files."""
from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import io
from .core import MODALITIES, AlignmentScorer, ExplicitScorer, GroupSet, fix_score
from .errors import ArgumentError, ConfigurationError, ParseError
from .extractors import MODALITY_KINDS, ExtractorConfig, extract, parse_extractor
from .massmaps import MassMapScorer
from .supernova import ConsistencyParams, SupernovaScorer
from .text import (DEFAULT_ANCHORS, EmbeddingTable, EmotionScorer, Lexicon, PolitenessScorer,
                   build_axes, build_centroids)

log = logging.getLogger(__name__)

SCORERS = ("massmaps", "supernova", "politeness", "emotion", "explicit")
SCORER_MODALITY = {"massmaps": "image", "supernova": "series", "politeness": "text", "emotion": "text"}
REPORT_COLUMNS = ("extractor", "scorer", "mean", "boot_std", "n", "seed")


@dataclass
class Dataset:
    samples: list
    modality: str
    annotations: list[GroupSet] | None = None
    names: list[str] = field(default_factory=list)
    embeddings: EmbeddingTable | None = None
    lexica: dict[str, Lexicon] = field(default_factory=dict)
    anchors: dict[str, Sequence[str]] | None = None
    source: str = ""

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise ConfigurationError(f"unknown modality {self.modality!r}")
        for s in self.samples:
            if s.modality != self.modality:
                raise ConfigurationError(f"dataset mixes {self.modality} and {s.modality} samples")
        if self.annotations is not None:
            if len(self.annotations) != len(self.samples):
                raise ConfigurationError("annotations must be given for every sample or none")
            for s, g in zip(self.samples, self.annotations):
                if g.d != s.d:
                    raise ConfigurationError(f"annotation d={g.d} does not match sample d={s.d}")
        if not self.names:
            self.names = [getattr(s, "name", "") or f"sample{i}" for i, s in enumerate(self.samples)]

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def explicit(self) -> bool:
        return self.annotations is not None


@dataclass
class EvalReport:
    extractor: str
    scorer: str
    scores: list[float]
    mean: float
    boot_std: float
    n: int
    seed: int | None
    names: list[str] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)

    def row(self) -> dict[str, Any]:
        return {k: getattr(self, k) for k in REPORT_COLUMNS}


def build_scorer(name: str, ds: Dataset, params: dict | None = None) -> AlignmentScorer | None:
    """Scorer for ``ds``; ``None`` for explicit mode (bound per sample)."""
    params = dict(params or {})
    if name not in SCORERS:
        raise ConfigurationError(f"unknown scorer {name!r}; choose from {', '.join(SCORERS)}")
    if name == "explicit":
        if not ds.explicit:
            raise ConfigurationError("explicit scorer needs annotated samples")
        return None
    if SCORER_MODALITY[name] != ds.modality:
        raise ConfigurationError(f"scorer {name!r} needs {SCORER_MODALITY[name]} data, dataset is {ds.modality}")
    if name == "massmaps":
        return MassMapScorer(**{k: float(v) for k, v in params.items()
                                if k in ("void_below", "cluster_sigmas", "eps")})
    if name == "supernova":
        return SupernovaScorer(ConsistencyParams(**{k: float(v) for k, v in params.items()
                                                    if k in ("eps", "window", "step")}))
    if ds.embeddings is None:
        raise ConfigurationError(f"scorer {name!r} needs an embedding table")
    if name == "politeness":
        if not ds.lexica:
            raise ConfigurationError("politeness scorer needs a lexicon")
        return PolitenessScorer({lang: build_centroids(lex, ds.embeddings) for lang, lex in ds.lexica.items()},
                                ds.embeddings)
    return EmotionScorer(build_axes(ds.embeddings, ds.anchors or DEFAULT_ANCHORS), ds.embeddings)


def sample_seed(seed: int | None, index: int) -> int | None:
    """Independent per-sample seed, stable regardless of evaluation order."""
    if seed is None:
        return None
    return int(np.random.SeedSequence([int(seed), index]).generate_state(1, dtype=np.uint64)[0])


def bootstrap_std(scores, iters: int = 1000, seed: int = 0) -> float:
    """Std (population form) of the means of ``iters`` with-replacement resamples."""
    x = np.asarray(scores, dtype=float).reshape(-1)
    if x.size == 0:
        raise ArgumentError("bootstrap needs at least one score")
    if iters < 1:
        raise ArgumentError("iters must be at least 1")
    if (x == x[0]).all():
        return 0.0
    rng = np.random.default_rng(seed)
    n = x.size
    chunk = max(1, 2_000_000 // n)
    means = np.empty(iters)
    for start in range(0, iters, chunk):
        stop = min(iters, start + chunk)
        means[start:stop] = x[rng.integers(0, n, size=(stop - start, n))].mean(axis=1)
    return float(means.std())


def score_sample(ds: Dataset, i: int, config: ExtractorConfig, scorer: AlignmentScorer | None,
                 scorer_name: str, seed: int | None) -> float:
    x = ds.samples[i]
    ann = ds.annotations[i] if ds.annotations is not None else None
    groups = extract(config, x, scorer=scorer_name, annotations=ann, embeddings=ds.embeddings,
                     seed=sample_seed(seed, i))
    s = scorer if scorer is not None else ExplicitScorer(ann)
    return fix_score(groups, x, s)


def evaluate(ds: Dataset, extractor: ExtractorConfig | str, scorer: str | None = None, *,
             seed: int | None = None, boot_iters: int = 1000, workers: int = 1,
             scorer_params: dict | None = None, scorer_obj: AlignmentScorer | None = None) -> EvalReport:
    """Mean FIXScore of ``extractor`` over ``ds`` plus its bootstrap std."""
    config = parse_extractor(extractor) if isinstance(extractor, str) else extractor
    seed = config.seed if seed is None else seed
    if not len(ds):
        raise ArgumentError("dataset is empty")
    if scorer is None:
        if scorer_obj is not None:
            scorer = scorer_obj.name
        elif ds.explicit:
            scorer = "explicit"
        else:
            raise ConfigurationError("implicit datasets need a scorer")
    if config.kind not in MODALITY_KINDS[ds.modality]:
        raise ConfigurationError(f"extractor {config.kind!r} does not apply to {ds.modality} data")
    if config.kind == "expert" and not ds.explicit:
        raise ConfigurationError("expert extractor needs annotated samples")
    if config.kind in ("random", "clustering") and seed is None:
        raise ConfigurationError(f"extractor {config.kind!r} requires a seed")
    bound = scorer_obj if scorer_obj is not None else build_scorer(scorer, ds, scorer_params)
    if bound is not None:
        bound.check_compatible(ds.samples[0])

    def work(i: int) -> float:
        return score_sample(ds, i, config, bound, scorer, seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(work, range(len(ds))))
    else:
        scores = [work(i) for i in range(len(ds))]
    mean = float(np.cumsum(scores)[-1] / len(scores))
    snapshot = {
        "extractor": {"kind": config.kind, "params": dict(config.params)},
        "scorer": scorer,
        "scorer_params": bound.config() if hasattr(bound, "config") else dict(scorer_params or {}),
        "boot_iters": boot_iters,
        "modality": ds.modality,
        "source": ds.source,
    }
    return EvalReport(config.label, scorer, scores, mean,
                      bootstrap_std(scores, boot_iters, 0 if seed is None else seed),
                      len(scores), seed, list(ds.names), snapshot)


def _sorted_files(directory: Path, pattern: str) -> list[Path]:
    return sorted(p for p in directory.glob(pattern) if p.is_file())


def load_dataset(path, modality: str, *, embeddings=None, lexica=None, anchors=None) -> Dataset:
    """Load a file or directory of samples.

    Directories hold ``*.raster`` (with optional ``<stem>.rle`` annotations),
    ``*.csv`` light curves, or for text a ``texts.tsv`` with optional
    ``embeddings.tsv``, ``lexicon.txt`` / ``lexicon.<lang>.txt`` and
    ``anchors.txt`` alongside. Keyword arguments override discovered files.
    """
    path = Path(path)
    if modality not in MODALITIES:
        raise ConfigurationError(f"unknown modality {modality!r}")
    if not path.exists():
        raise ParseError("no such file or directory", path)
    if modality == "image":
        files = _sorted_files(path, "*.raster") if path.is_dir() else [path]
        if not files:
            raise ParseError("no *.raster files", path)
        samples = [io.load_raster(f) for f in files]
        companions = [f.with_suffix(".rle") for f in files]
        present = [c.exists() for c in companions]
        annotations = None
        if any(present):
            if not all(present):
                missing = [str(c) for c, ok in zip(companions, present) if not ok]
                raise ParseError(f"annotations missing for {len(missing)} samples, e.g. {missing[0]}", path)
            annotations = [io.load_masks(c, s.d)[0] for c, s in zip(companions, samples)]
        return Dataset(samples, "image", annotations, [f.stem for f in files], source=str(path))
    if modality == "series":
        files = _sorted_files(path, "*.csv") if path.is_dir() else [path]
        if not files:
            raise ParseError("no *.csv files", path)
        return Dataset([io.load_series(f) for f in files], "series", None, [f.stem for f in files],
                       source=str(path))
    root = path if path.is_dir() else path.parent
    texts = root / "texts.tsv" if path.is_dir() else path
    samples = io.load_texts(texts)
    if embeddings is None and (root / "embeddings.tsv").exists():
        embeddings = root / "embeddings.tsv"
    if embeddings is not None and not isinstance(embeddings, EmbeddingTable):
        embeddings = io.load_embeddings(embeddings)
    if lexica is None:
        lexica = {}
        if (root / "lexicon.txt").exists():
            lexica["*"] = root / "lexicon.txt"
        for f in _sorted_files(root, "lexicon.*.txt"):
            lexica[f.name.split(".")[1]] = f
    lexica = {lang: lex if isinstance(lex, Lexicon) else io.load_lexicon(lex) for lang, lex in lexica.items()}
    if anchors is None and (root / "anchors.txt").exists():
        anchors = root / "anchors.txt"
    if anchors is not None and not isinstance(anchors, dict):
        anchors = io.load_word_lists(anchors)
    return Dataset(samples, "text", None, [f"{texts.stem}:{i + 1}" for i in range(len(samples))],
                   embeddings, lexica, anchors, source=str(path))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_report(reports: EvalReport | Sequence[EvalReport], path) -> Path:
    """Write the TSV table at ``path`` and full records to ``<path>.json``."""
    if isinstance(reports, EvalReport):
        reports = [reports]
    path = Path(path)
    lines = ["\t".join(REPORT_COLUMNS)]
    lines += ["\t".join(_fmt(r.row()[c]) for c in REPORT_COLUMNS) for r in reports]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(json.dumps([asdict(r) for r in reports], indent=2, sort_keys=True) + "\n",
                       encoding="utf-8")
    return sidecar


def load_report(path) -> list[EvalReport]:
    path = Path(path)
    sidecar = path if path.suffix == ".json" else path.with_name(path.name + ".json")
    try:
        records = json.loads(sidecar.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read report: {exc.strerror}", sidecar) from None
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, sidecar, exc.lineno) from None
    return [EvalReport(**r) for r in records]


def read_report_table(path) -> list[dict[str, str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split("\t")
    return [dict(zip(header, ln.split("\t"))) for ln in lines[1:] if ln]


def format_table(reports: Sequence[EvalReport]) -> str:
    """Aligned plain-text table, one row per report."""
    rows = [("extractor", "scorer", "mean", "boot_std", "n", "seed")]
    for r in reports:
        rows.append((r.extractor, r.scorer, f"{r.mean:.4f}", f"{r.boot_std:.4f}", str(r.n),
                     "" if r.seed is None else str(r.seed)))
    widths = [max(len(row[j]) for row in rows) for j in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows)
