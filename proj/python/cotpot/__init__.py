"""Potential-curve analysis of chain-of-thought traces.

Thin wrappers over the native ``_core`` module. Fixtures and thresholds may be
passed as dicts or JSON strings.
"""

import json

from . import _core
from ._core import (
    DegradedBatchError,
    Error,
    UsageError,
    corrected_pass_at_k,
    count_tokens,
    estimate_budget,
    grade_text,
    pass_at_k,
)

__all__ = [
    "DegradedBatchError",
    "Error",
    "UsageError",
    "check_martingale",
    "classify",
    "corrected_pass_at_k",
    "count_tokens",
    "estimate_budget",
    "exact_potential",
    "grade_text",
    "pass_at_k",
    "potential_curve",
    "random_fixture",
    "run_cli",
]


def _as_json(value):
    return value if isinstance(value, str) else json.dumps(value)


def run_cli(*args):
    """Runs the command line in-process; returns (exit_code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])


def random_fixture(seed):
    return json.loads(_core.random_fixture(seed))


def classify(estimates, thresholds=None):
    return _core.classify(list(estimates), "" if thresholds is None else _as_json(thresholds))


def exact_potential(fixture, gold, prefix="", kind="integer"):
    return _core.exact_potential(_as_json(fixture), gold, prefix, kind)


def check_martingale(fixture, gold):
    return _core.check_martingale(_as_json(fixture), gold)


def potential_curve(fixture, gold, trace_text, n_chunks, n_samples=128, seed=0):
    """Monte-Carlo curve on the toy provider as (prefix_fraction, estimate) pairs."""
    return _core.potential_curve(_as_json(fixture), gold, trace_text, n_chunks, n_samples, seed)
