"""Crosspoint-queued switch simulator."""

from ._core import (
    ConfigError,
    InvariantError,
    csv_columns,
    emit_curves,
    exponent_cq_lqf,
    exponent_oq,
    exponent_pcq,
    lambda_star,
    pool_simul_arrival_prob,
    simulate,
    solve_contention,
    variance_lb_distance,
    variance_time,
)

__all__ = [
    "ConfigError",
    "InvariantError",
    "csv_columns",
    "emit_curves",
    "exponent_cq_lqf",
    "exponent_oq",
    "exponent_pcq",
    "lambda_star",
    "pool_simul_arrival_prob",
    "simulate",
    "solve_contention",
    "variance_lb_distance",
    "variance_time",
]
