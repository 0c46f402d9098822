"""Sparse PSD/DNN cutting planes for box-constrained QCQPs."""

from ._core import (
    Instance,
    SparsecutError,
    cut_loop,
    generate,
    grid_search,
    mccormick_bound,
    sdp_bound,
    sdp_data,
    solve_global,
)

__all__ = [
    "Instance",
    "SparsecutError",
    "cut_loop",
    "generate",
    "grid_search",
    "mccormick_bound",
    "sdp_bound",
    "sdp_data",
    "solve_global",
]
