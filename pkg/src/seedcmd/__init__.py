"""seedcmd: natural-language command grounding via API seed commands."""

from .engine import GroundingEngine, bundled_engine
from .grounding import (
    GroundingConfig,
    GroundingResult,
    Matcher,
    enumerate_subexpressions,
    filter_subexpressions,
    get_candidate_ascs,
    ground,
    reduce_command,
    rename_for_match,
)
from .marking import load_spec, mark_utility_constraints
from .matching import EmbeddingTable, score_embedding, score_jaccard, score_vsm, rank
from .model import AppSpec, Asc, AscTemplate, PropertyDomain, VariableSlot, type_sequence
from .specfile import load_bundled_spec, parse_spec
from .tagging import (
    SynonymLexicon,
    TaggedCommand,
    Vocabulary,
    build_vocabulary,
    prepare_command,
    rephrase_command,
    tag_command,
)

__version__ = "0.1.0"

__all__ = [
    "AppSpec",
    "Asc",
    "AscTemplate",
    "EmbeddingTable",
    "GroundingConfig",
    "GroundingEngine",
    "GroundingResult",
    "Matcher",
    "PropertyDomain",
    "SynonymLexicon",
    "TaggedCommand",
    "VariableSlot",
    "Vocabulary",
    "build_vocabulary",
    "bundled_engine",
    "enumerate_subexpressions",
    "filter_subexpressions",
    "get_candidate_ascs",
    "ground",
    "load_bundled_spec",
    "load_spec",
    "mark_utility_constraints",
    "parse_spec",
    "prepare_command",
    "rank",
    "reduce_command",
    "rename_for_match",
    "rephrase_command",
    "score_embedding",
    "score_jaccard",
    "score_vsm",
    "tag_command",
    "type_sequence",
]
