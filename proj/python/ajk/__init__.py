"""Affine semimartingales with jumps at fixed times.

Thin wrapper over the compiled core: catalog models, the backward measure
Riccati solver, admissibility checks, Monte Carlo verification and the
extended HJM bond machinery.
"""
import json as _json

from ._core import (  # noqa: F401
    AjkError,
    DomainViolationError,
    Ensemble,
    InvalidParameterError,
    Model,
    OutOfDomainError,
    Solution,
    TermStructure,
    catalog_names,
    char_fn,
    drift_residual,
    load_model_json,
    make_model,
    make_term_structure,
    semiflow_check,
    simulate,
    solve,
)
from . import _core as _c

__all__ = [
    "catalog_names", "make_model", "load_model_json", "solve", "char_fn",
    "semiflow_check", "check_admissible", "conservativeness_check", "simulate",
    "compare_charfn", "make_term_structure", "drift_residual",
    "verify_drift_condition", "martingale_test", "Model", "Solution",
    "Ensemble", "TermStructure",
]


def check_admissible(model):
    """Clause-by-clause admissibility report as a dict."""
    return _json.loads(_c.check_admissible(model))


def conservativeness_check(model, T):
    return _json.loads(_c.conservativeness_check(model, T))


def compare_charfn(model, x0, T, u_grid, n_paths, seed, threads=1):
    return _json.loads(_c.compare_charfn(model, x0, T, u_grid, n_paths, seed, threads))


def verify_drift_condition(model, pairs=100, seed=1):
    return _json.loads(_c.verify_drift_condition(model, pairs, seed))


def martingale_test(model, T, n_paths, seed, threads=1):
    return _json.loads(_c.martingale_test(model, T, n_paths, seed, threads))


def jump_log(solution):
    return _json.loads(solution.jump_log)
