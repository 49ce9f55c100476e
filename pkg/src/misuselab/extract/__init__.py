"""Java source extraction: usage models, projections, facts files."""

from .builder import ExtractionWarning, parse_method_models
from .factsfile import FactsFileError, load_facts_file, write_facts_file
from .javalex import ParseError
from .paths import normal_paths
from .projections import (
    CallPairFacts,
    CallSet,
    TemporalFact,
    TemporalKind,
    TypeUsage,
    UnknownObjectError,
    to_call_pairs,
    to_call_set,
    to_temporal_facts,
    to_type_usages,
)

__all__ = [
    "CallPairFacts",
    "CallSet",
    "ExtractionWarning",
    "FactsFileError",
    "ParseError",
    "TemporalFact",
    "TemporalKind",
    "TypeUsage",
    "UnknownObjectError",
    "load_facts_file",
    "normal_paths",
    "parse_method_models",
    "to_call_pairs",
    "to_call_set",
    "to_temporal_facts",
    "to_type_usages",
    "write_facts_file",
]
