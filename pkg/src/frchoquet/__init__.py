"""Fuzzy-rough Choquet distances for distance-based classification."""

from .choquet import choquet_integral, choquet_p_distance, distance_matrix
from .classifier import ChoquetKNNClassifier, evaluate_kfold, evaluate_loo
from .connectives import ConnectiveConfig, Implicator, TNorm
from .dataset import DecisionSystem, MinMaxNormalizer, load_decision_system, load_flu_example
from .exceptions import DataError, DomainError, MeasureError
from .measures import (
    AttributeMeasure,
    BaseDistanceFamily,
    additive_measure,
    audit_monotonicity,
    counting_measure,
    delta_distance,
    delta_positive,
    explicit_measure,
    gamma_distance,
    gamma_positive,
    monotonize_measure,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeMeasure",
    "BaseDistanceFamily",
    "ChoquetKNNClassifier",
    "ConnectiveConfig",
    "DataError",
    "DecisionSystem",
    "DomainError",
    "Implicator",
    "MeasureError",
    "MinMaxNormalizer",
    "TNorm",
    "additive_measure",
    "audit_monotonicity",
    "choquet_integral",
    "choquet_p_distance",
    "counting_measure",
    "delta_distance",
    "delta_positive",
    "distance_matrix",
    "evaluate_kfold",
    "evaluate_loo",
    "explicit_measure",
    "gamma_distance",
    "gamma_positive",
    "load_decision_system",
    "load_flu_example",
    "monotonize_measure",
]
