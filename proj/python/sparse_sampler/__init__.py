"""Python bindings for the sparse_sampler C++ library."""

import csv
import io
import json

from ._core import (
    CapacityError,
    DomainError,
    Error,
    FormatError,
    MultiIndexSet,
    NumericalError,
    OrthoBasis,
    RegimeError,
    SamplingError,
    SamplingPlan,
    ShapeError,
    assemble_ls,
    constants,
    contains,
    cs_optimal_plan,
    default_lambda,
    draw,
    eval_matrix,
    fit_ls,
    grid,
    index_set,
    legendre_1d,
    ls_optimal_plan,
    lower_set_weights,
    monte_carlo_plan,
    orthonormalize,
    preconditioned_plan,
    signed_variant,
    sr_lasso,
)

__all__ = [name for name in dir() if not name.startswith("_")]


def run_experiment(config):
    """Run an experiment config (same keys as the CLI JSON).

    Returns (records, meta): records is a list of dicts parsed from the CSV,
    meta the metadata dict.
    """
    from ._core import _run_experiment

    text, meta = _run_experiment(json.dumps(config))
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        for key in ("m", "s", "trial"):
            row[key] = int(row[key])
        for key in ("rel_err", "alpha_hat", "seconds"):
            row[key] = float(row[key])
    return rows, json.loads(meta)
