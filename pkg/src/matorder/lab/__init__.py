"""Experiment layer: condition tables, ensembles, verification and search."""

from .claims import InequalityClaim
from .ensembles import EnsembleConfig
from .search import NotFound, Witness, find_counterexample, load_witnesses, save_witnesses
from .tables import ConditionRow, ConditionTable, condition_table, condition_tables
from .verify import (
    EqualityDiagnosis,
    Grid,
    LtkReport,
    TableReport,
    VerifyReport,
    equality_cases,
    ltk_verify,
    reproduce_table,
    verify_inequality,
)

__all__ = [
    "ConditionRow",
    "EqualityDiagnosis",
    "Grid",
    "LtkReport",
    "TableReport",
    "VerifyReport",
    "equality_cases",
    "ltk_verify",
    "reproduce_table",
    "verify_inequality",
    "ConditionTable",
    "EnsembleConfig",
    "InequalityClaim",
    "NotFound",
    "Witness",
    "condition_table",
    "condition_tables",
    "find_counterexample",
    "load_witnesses",
    "save_witnesses",
]
