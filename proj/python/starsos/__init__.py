"""Inner/outer polynomial sublevel-set approximations and kernel polytopes."""

import json as _json

from . import _starsos
from ._starsos import (
    CertificateError,
    InputError,
    Polynomial,
    SemialgebraicSet,
    SolverIndeterminate,
    exampleE_scaling_lower_bound,
    hausdorff_scaled,
    max_norm_sublevel,
    scaling_lower_bound_estimate,
    sublevel_volume_polar,
    volume_grid,
    volume_polar,
)

__all__ = [
    "CertificateError",
    "InputError",
    "Polynomial",
    "SemialgebraicSet",
    "SolverIndeterminate",
    "approximate",
    "exampleE_scaling_lower_bound",
    "find_approx",
    "find_l1_outer",
    "find_support",
    "fixture",
    "hausdorff_scaled",
    "inner_kernel",
    "max_norm_sublevel",
    "outer_kernel",
    "scaling_lower_bound_estimate",
    "sublevel_volume_polar",
    "volume_grid",
    "volume_polar",
]


def fixture(name, **params):
    """Built-in set: disk, box, exampleA, exampleB or exampleE(c=, r=)."""
    return SemialgebraicSet.fixture(name, _json.dumps(params))


def _decoded(text):
    out = _json.loads(text)
    if isinstance(out.get("f"), dict):
        out["f"] = Polynomial.from_json(_json.dumps(out["f"]))
    return out


def approximate(X, degree=4, eps=1e-3, s_tol=1e-3, mult_degree=None):
    return _decoded(_starsos.approximate(X, degree, eps, s_tol, mult_degree))


def find_approx(X, s, degree=4, eps=1e-3):
    return _decoded(_starsos.find_approx(X, s, degree, eps))


def find_l1_outer(X, half_width, degree=4):
    return _decoded(_starsos.find_l1_outer(X, half_width, degree))


def find_support(X, c, mult_degree=6):
    return _json.loads(_starsos.find_support(X, list(c), mult_degree))


def outer_kernel(X, n_samples=2000, seed=0, forced_points=()):
    return _json.loads(_starsos.outer_kernel(X, n_samples, seed, [list(p) for p in forced_points]))


def inner_kernel(X, n_directions=64, mult_degree=6):
    return _json.loads(_starsos.inner_kernel(X, n_directions, mult_degree))
