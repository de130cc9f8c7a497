"""Construct, check, transform and exhaustively search conditionally intersecting set families."""

from setlab.errors import ArgumentError, CapabilityError, FormatError, SetlabError
from setlab.setfam import ElementSet, SetFamily, ShiftPair
from setlab.predicates import ConditionParams

__all__ = [
    "ArgumentError",
    "CapabilityError",
    "ConditionParams",
    "ElementSet",
    "FormatError",
    "SetFamily",
    "SetlabError",
    "ShiftPair",
]
