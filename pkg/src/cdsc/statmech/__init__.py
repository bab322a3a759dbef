"""Statistical-mechanics side: the disordered eight-vertex model, infinite-bias
constraint percolation and cluster estimates of self-dual thresholds."""

from .cluster import (
    Cluster,
    cluster_geometry,
    cluster_threshold,
    self_dual_gap,
    xy_code_channel,
)
from .percolation import (
    ClusterStats,
    PercolationSummary,
    cluster_stats,
    fit_fisher_tau,
    fit_power_law,
    percolation_scan,
    percolation_stats,
)
from .rbim import (
    ConstraintGraph,
    RBIMInstance,
    build_rbim,
    infinite_bias_constraints,
    nishimori_couplings,
)

__all__ = [
    "Cluster",
    "ClusterStats",
    "ConstraintGraph",
    "PercolationSummary",
    "RBIMInstance",
    "build_rbim",
    "cluster_geometry",
    "cluster_stats",
    "cluster_threshold",
    "fit_fisher_tau",
    "fit_power_law",
    "infinite_bias_constraints",
    "nishimori_couplings",
    "percolation_scan",
    "percolation_stats",
    "self_dual_gap",
    "xy_code_channel",
]
