"""Trees with edge lengths, leaf-length erasure, GW laws and CSBP numerics."""

import json

from ._core import (
    CsbpError,
    CsbpKernel,
    EdgeTree,
    GwLaw,
    LawError,
    OffspringLaw,
    SamplerError,
    TreeError,
    canonicalize,
    compose_alphas,
    covering_number,
    erased_profile,
    gh_bounds,
    height_cdf,
    iso_equal,
    leaf_erase,
    reduce,
    replica_seed,
    right_profile,
    sample_forest,
    suite_names,
)
from ._core import run_suite as _run_suite

__version__ = "0.1.0"


def run_suite(name, seed=0, workers=1):
    """Run a verification suite; returns the reports as dicts."""
    return [json.loads(r) for r in _run_suite(name, seed, workers)]


__all__ = [
    "CsbpError",
    "CsbpKernel",
    "EdgeTree",
    "GwLaw",
    "LawError",
    "OffspringLaw",
    "SamplerError",
    "TreeError",
    "canonicalize",
    "compose_alphas",
    "covering_number",
    "erased_profile",
    "gh_bounds",
    "height_cdf",
    "iso_equal",
    "leaf_erase",
    "reduce",
    "replica_seed",
    "right_profile",
    "run_suite",
    "sample_forest",
    "suite_names",
]
