"""Joint BS selection, user association and beamforming for networked ISAC."""

import csv
import io
import json

from . import _netisac
from ._netisac import CONFIG_VERSION, CSV_HEADER, ConfigError, bearing, steering_vector

__all__ = [
    "CONFIG_VERSION",
    "CSV_HEADER",
    "ConfigError",
    "bearing",
    "default_config",
    "solve",
    "steering_vector",
    "sweep",
    "validate",
]


def _text(config):
    if config is None:
        return _netisac.default_config()
    return config if isinstance(config, str) else json.dumps(config)


def default_config():
    return json.loads(_netisac.default_config())


def solve(seed=0, scheme="proposed", gamma_db=8.0, crlb_eps=1.0, config=None):
    """One instance; returns the JSON report as a dict."""
    return json.loads(_netisac.solve(_text(config), seed, scheme, gamma_db, crlb_eps))


def sweep(config):
    """Runs a sweep; returns (rows, summary) as lists of dicts."""
    text = _netisac.sweep_csv(_text(config))
    body = [l for l in text.splitlines() if l and not l.startswith("#")]
    summary = [l[1:].strip() for l in text.splitlines() if l.startswith("#") and not l.startswith("# summary:")]
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return rows, list(csv.DictReader(io.StringIO("\n".join(summary))))


def validate(seed=7):
    return _netisac.validate(seed)
