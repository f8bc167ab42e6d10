"""Spectral minimal partitions on grid domains."""

import json
import os

import numpy as np

from ._core import (
    NumericalError,
    SpecpartError,
    ValidationError,
    content_hash,
    example_names,
    halfstrip_ell_for,
    rectangle_eigs,
    set_threads,
    strip_room_energy,
    transcendental_root,
)
from . import _core

__all__ = [
    "NumericalError",
    "SpecpartError",
    "ValidationError",
    "content_hash",
    "eigenvalues",
    "example",
    "example_names",
    "halfstrip_ell_for",
    "read_field",
    "rectangle_eigs",
    "run",
    "set_threads",
    "strip_room_energy",
    "sweep",
    "transcendental_root",
]


def run(config, out=None):
    """Run a scenario config (dict) and return its report as a dict."""
    return json.loads(_core.run_json(json.dumps(config), os.fspath(out) if out else ""))


def example(name, out=None, seed=None, **params):
    config = {"mode": "example", "example": {"name": name, **params}}
    if seed is not None:
        config["seed"] = {"value": seed}
    return run(config, out)


def sweep(config, axis, values, out=None):
    vals = [float("inf") if v in ("inf", float("inf")) else float(v) for v in values]
    return json.loads(_core.sweep_json(json.dumps(config), axis, vals, os.fspath(out) if out else ""))


def eigenvalues(domain, potential=None, count=1, tol=1e-10):
    return _core.eigenvalues_json(json.dumps(domain), json.dumps(potential or {"type": "zero"}), count, tol)


def read_field(path):
    """Load a .spfd dump as an array shaped (count0, count1); 1-D dumps keep count1 == 1."""
    dim, count, values = _core.read_field(os.fspath(path))
    return np.asarray(values, dtype=np.float64).reshape(count)
