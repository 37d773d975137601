"""Learning orthogonal multi-index models with online spherical SGD and ridge regression."""

import json

from ._core import (
    LinkSpec,
    correlated_moment,
    default_config,
    flow,
    hermite_eval,
    init_network,
    make_directions,
    max_coordinate_frequency,
    poly_hitting_time,
    population_grad_v,
    population_loss,
    run_single as _run_single,
    scaling_study as _scaling_study,
    stage2_escape_time,
    stage2_rate_constant,
    train_stage1,
    verify_envelope,
)

__all__ = [
    "LinkSpec",
    "correlated_moment",
    "default_config",
    "flow",
    "hermite_eval",
    "init_network",
    "make_directions",
    "max_coordinate_frequency",
    "poly_hitting_time",
    "population_grad_v",
    "population_loss",
    "run_single",
    "scaling_study",
    "stage2_escape_time",
    "stage2_rate_constant",
    "train_stage1",
    "verify_envelope",
]


def _config_json(config):
    cfg = default_config()
    cfg.update(config or {})
    return json.dumps(cfg)


def run_single(config=None, d=32, seed=1):
    """Stage 1, ridge fit and test error for one (d, seed). `config` overrides the defaults."""
    return _run_single(_config_json(config), d, seed)


def scaling_study(config=None, threads=1):
    """Runs every (d, seed) pair of the config and returns the JSON report as a dict."""
    return _scaling_study(_config_json(config), threads)
