"""Free convexity and quantum information numerics (C++ core)."""

from ._core import (
    FreeconvexError,
    birkhoff_decompose,
    classical_value,
    eigvalsh,
    jointly_measurable,
    min_eigenvalue,
    mpdo_moment,
    naimark_dilate,
    noise_threshold,
    npa_upper_bound,
    operator_schmidt,
    partial_transpose,
    psd_distance_bounds,
    run_cli,
    separability_oracle,
    separable_rank2,
    solve_sdp,
)

__all__ = [
    "FreeconvexError",
    "birkhoff_decompose",
    "classical_value",
    "eigvalsh",
    "jointly_measurable",
    "min_eigenvalue",
    "mpdo_moment",
    "naimark_dilate",
    "noise_threshold",
    "npa_upper_bound",
    "operator_schmidt",
    "partial_transpose",
    "psd_distance_bounds",
    "run_cli",
    "separability_oracle",
    "separable_rank2",
    "solve_sdp",
]
