"""Rigidity-preserving coverage control."""

from ._core import (
    Error,
    closing_ranks,
    coverage_cost,
    henneberg_generate,
    laman_check,
    lloyd_step,
    lqr_gain,
    lyapunov_P,
    rigidity_matrix,
    rigidity_rank,
    simulate,
    validate_config,
)

__all__ = [
    "Error",
    "closing_ranks",
    "coverage_cost",
    "henneberg_generate",
    "laman_check",
    "lloyd_step",
    "lqr_gain",
    "lyapunov_P",
    "rigidity_matrix",
    "rigidity_rank",
    "simulate",
    "validate_config",
]
