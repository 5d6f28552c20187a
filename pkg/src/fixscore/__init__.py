"""Expert-alignment scoring for groups of low-level features."""
from .core import (AlignmentScorer, ExplicitScorer, GroupSet, as_mask, covering_groups,
                   explicit_expert_align, feature_align, fix_score, group_scores, iou)
from .errors import (ArgumentError, ConfigurationError, DegenerateAxisError, DegenerateFitError,
                     ExtractorConfigError, FixScoreError, IngestionError, ParseError)
from .extractors import ExtractorConfig, GroupMaximum, extract, parse_extractor
from .harness import Dataset, EvalReport, bootstrap_std, evaluate, load_dataset, write_report
from .massmaps import MassMap, MassMapScorer
from .supernova import ConsistencyParams, LightCurve, SupernovaScorer
from .text import EmbeddingTable, EmotionScorer, Lexicon, PolitenessScorer, TokenizedText

__version__ = "0.1.0"

__all__ = [
    "AlignmentScorer", "ExplicitScorer", "GroupSet", "as_mask", "covering_groups", "explicit_expert_align",
    "feature_align", "fix_score", "group_scores", "iou",
    "ArgumentError", "ConfigurationError", "DegenerateAxisError", "DegenerateFitError",
    "ExtractorConfigError", "FixScoreError", "IngestionError", "ParseError",
    "ExtractorConfig", "GroupMaximum", "extract", "parse_extractor",
    "Dataset", "EvalReport", "bootstrap_std", "evaluate", "load_dataset", "write_report",
    "MassMap", "MassMapScorer", "ConsistencyParams", "LightCurve", "SupernovaScorer",
    "EmbeddingTable", "EmotionScorer", "Lexicon", "PolitenessScorer", "TokenizedText",
]
