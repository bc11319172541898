"""Spectral quasi-Newton solver and condition-number certifier for
quasi-periodic hull functions of long-range particle chains."""

import json as _json

from ._core import (  # noqa: F401
    FourierSeries,
    QpkamError,
    certify_json,
    directional_derivative,
    k_weight,
    multiply,
    random_series,
    reciprocal,
    residual_json,
    shift,
    solve_json,
    __version__,
)


def _as_text(config):
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def solve(config, hull_path=""):
    """Run the solver; `config` is a dict or JSON text. Returns the report dict."""
    return _json.loads(solve_json(_as_text(config), hull_path))


def certify(config, hull_path=""):
    """Condition numbers and hypothesis checks for a saved or zero hull."""
    return _json.loads(certify_json(_as_text(config), hull_path))


def residual(config, hull_path=""):
    """Equilibrium residual norm of a hull under the configured model."""
    return _json.loads(residual_json(_as_text(config), hull_path))
