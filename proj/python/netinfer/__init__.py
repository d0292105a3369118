"""Transfer-entropy structure learning for networks of coupled dynamical systems."""

import json as _json

from . import _core
from ._core import (
    NumericError,
    ValidationError,
    __version__,
    chi2_quantile,
    compare,
    infer,
    score,
    transfer_entropy,
)


def simulate(config):
    """Simulate a network. `config` is a dict or a JSON string in the CLI config format."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _core.simulate(config)


__all__ = [
    "NumericError",
    "ValidationError",
    "__version__",
    "chi2_quantile",
    "compare",
    "infer",
    "score",
    "simulate",
    "transfer_entropy",
]
