"""Fractional posteriors for sparse logistic regression."""

import json

from . import _core
from ._core import (
    ConfigError,
    NumericalError,
    __version__,
    bernoulli_hellinger2,
    bernoulli_kl,
    bernoulli_renyi,
    bernoulli_tv,
    compatibility_numbers,
    concentration_bound,
    default_tau,
    epsilon_n_spike_slab,
    epsilon_n_student,
    excess_risk_rate,
    expectation_bound,
    generate_theta0,
    h_alpha,
    kl_lemma_bound,
    log_likelihood,
    misspecified_bound,
)


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def generate_dataset(theta0, n, seed, design=None, generator=None):
    """Returns (X, y) with y in {-1, +1}."""
    return _core.generate_dataset(theta0, n, _dump(design or {"kind": "gaussian"}), seed,
                                  _dump(generator or {"link": "logistic"}))


def log_target(theta, X, y, alpha, prior):
    return _core.log_target(theta, X, y, alpha, _dump(prior))


def grad_log_target(theta, X, y, alpha, prior):
    return _core.grad_log_target(theta, X, y, alpha, _dump(prior))


def sample(X, y, alpha, prior, sampler=None):
    """Runs one Langevin chain; returns a dict with draws (one per row) and diagnostics."""
    return _core.sample(X, y, alpha, _dump(prior), _dump(sampler or {}))


def run_experiment(spec, out_dir=""):
    """Runs a rates/spike_slab/misspecified grid; returns one summary dict per grid point."""
    return _core.run_experiment(_dump(spec), str(out_dir))
