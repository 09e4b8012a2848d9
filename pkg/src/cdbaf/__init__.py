"""Subset repairs of inconsistent databases through argumentation frameworks."""

__version__ = "0.1.0"

from .errors import BudgetExceeded, FormatError
from .framework import (
    AuxArg,
    FactArg,
    Setaf,
    build_framework,
    preprocess,
)
from .model import DC, FD, ID, LTGD, ConstrainedDatabase, Database, Fact, Schema, classify
from .parser import SourceError, parse_document, parse_instance, serialize_instance
from .repairs import all_repairs, check_equivalence, repairs_via_argumentation
from .semantics import Semantics, extensions

__all__ = [
    "AuxArg", "BudgetExceeded", "ConstrainedDatabase", "DC", "Database", "FD", "Fact",
    "FactArg", "FormatError", "ID", "LTGD", "Schema", "Semantics", "Setaf", "SourceError",
    "all_repairs", "build_framework", "check_equivalence", "classify", "extensions",
    "parse_document", "parse_instance", "preprocess", "repairs_via_argumentation",
    "serialize_instance",
]
