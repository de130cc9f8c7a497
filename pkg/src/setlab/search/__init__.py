"""Exact maximum-family search over conflict structures."""

from setlab.search.conflicts import DEFAULT_VERTEX_CAP, ConflictStructure, build_conflicts
from setlab.search.report import SearchReport, max_family, resume_search
from setlab.search.solver import SearchConstraints, SearchInterrupted

__all__ = [
    "DEFAULT_VERTEX_CAP",
    "ConflictStructure",
    "SearchConstraints",
    "SearchInterrupted",
    "SearchReport",
    "build_conflicts",
    "max_family",
    "resume_search",
]
