"""Skyway delivery simulator and interference model toolkit."""

from ._skyway import (
    Error,
    InputError,
    charge_time,
    evaluate,
    predict_ir,
    relative_importance,
    select_degrees,
    simulate,
    synthesize,
)

__all__ = [
    "Error",
    "InputError",
    "charge_time",
    "evaluate",
    "predict_ir",
    "relative_importance",
    "select_degrees",
    "simulate",
    "synthesize",
]
