"""Online multiclass boosting with bandit feedback."""

import json as _json

from ._core import (
    Booster,
    BudgetExceeded,
    ConfigError,
    DataError,
    Error,
    InvalidParameter,
    ada_objective,
    bbm_cost_matrix,
    estimate_cost_vector,
    estimate_loss,
    learning_curve,
    logistic_cost_matrix,
    parse_csv,
    potential_exact,
    potential_mc,
    reduce_cost_vector,
    sampling_distribution,
    verify,
)
from ._core import _run_config as _core_run


def run_config(path, seeds=None, rho=None, n_learners=None, algorithm=None, mode=None):
    """Run the experiment described by a config file and return the report dict."""
    return _json.loads(
        _core_run(str(path), seeds=seeds, rho=rho, n_learners=n_learners, algorithm=algorithm, mode=mode)
    )

