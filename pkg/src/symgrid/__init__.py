"""Deterministic grid-reasoning engine.

Four stages: grid perception (objects, cavities, background), unit
pattern detection over a 23-operation taxonomy, rule intersection across
train pairs, and a per-pixel voting solver with an optional remote
backend for samples and fallback.
"""

from .config import Config, load_config
from .errors import (
    BackendError,
    BoundsError,
    ConfigError,
    GridValidationError,
    MarkdownError,
    PatternApplicationError,
    PatternContractError,
    SymgridError,
    TaskFormatError,
)
from .grid import (
    Grid,
    Task,
    decode_markdown,
    encode_markdown,
    grids_equal,
    parse_task,
    pixel_distance,
    serialize_task,
)
from .induction import (
    ChangeTag,
    RuleSet,
    ScoredPattern,
    detect_unit_patterns,
    induce,
    intersect_patterns,
    match_objects,
    synthesize_hints,
)
from .patterns import (
    KIND_ORDER,
    Selector,
    UnitPattern,
    apply_pattern,
    format_pattern,
    make_pattern,
    parse_pattern,
)
from .perception import (
    GridObject,
    Perception,
    background_color,
    detect_cavities,
    segment,
)
from .search import FlaggedPattern, SearchProposer, enumerate_candidates
from .solver import (
    Candidate,
    EvalReport,
    Prediction,
    apply_ruleset,
    evaluate,
    solve_task,
    vote_pixels,
)

__all__ = [
    "BackendError",
    "BoundsError",
    "Candidate",
    "ChangeTag",
    "Config",
    "ConfigError",
    "EvalReport",
    "FlaggedPattern",
    "Grid",
    "GridObject",
    "GridValidationError",
    "KIND_ORDER",
    "MarkdownError",
    "PatternApplicationError",
    "PatternContractError",
    "Perception",
    "Prediction",
    "RuleSet",
    "ScoredPattern",
    "SearchProposer",
    "Selector",
    "SymgridError",
    "Task",
    "TaskFormatError",
    "UnitPattern",
    "apply_pattern",
    "apply_ruleset",
    "background_color",
    "decode_markdown",
    "detect_cavities",
    "detect_unit_patterns",
    "encode_markdown",
    "enumerate_candidates",
    "evaluate",
    "format_pattern",
    "grids_equal",
    "induce",
    "intersect_patterns",
    "load_config",
    "make_pattern",
    "match_objects",
    "parse_pattern",
    "parse_task",
    "pixel_distance",
    "segment",
    "serialize_task",
    "solve_task",
    "synthesize_hints",
    "vote_pixels",
]
