"""Dynamical S-boxes from two lag-time logistic-map series, and their analysis."""

__version__ = "0.1.0"

from .chaos import (
    DEFAULT_CONFIG,
    TABLE2_CONFIG,
    GeneratorConfig,
    GeneratorState,
    LagSpec,
    LogisticParams,
    bit_stream,
)
from .criteria import CriteriaReport, full_report
from .sbox import SBox, SBoxFamily, bundled_fixture, generate, generate_family, invert, load_fixture, save_fixture

__all__ = [
    "DEFAULT_CONFIG",
    "TABLE2_CONFIG",
    "CriteriaReport",
    "GeneratorConfig",
    "GeneratorState",
    "LagSpec",
    "LogisticParams",
    "SBox",
    "SBoxFamily",
    "bit_stream",
    "bundled_fixture",
    "full_report",
    "generate",
    "generate_family",
    "invert",
    "load_fixture",
    "save_fixture",
]
