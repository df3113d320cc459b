"""Correlation clustering through the cluster LP: preclustering, a
multiplicative-weights covering-LP solver, rounding, oracles and baselines."""

from ._accel import backend_name
from .cover import (CrossDegrees, FractionalClusterSolution, compute_d_cross,
                    convert_cover_to_cluster, cover, cover2, solution_cost)
from .estimators import Estimate, approx_D, estimate_cost, estimate_d_cross
from .family import PartialFamily, VertexDistribution, family_to_point, find_family, r_grid
from .graph import (Clustering, QueryCounter, SignedGraph, cluster_cost2, disagreements,
                    generate, pos_degree)
from .mwu import SolverParams, preset, solve_cluster_lp, solve_cover_lp
from .oracles import brute_force_opt, evaluate, pivot_baseline
from .precluster import (PreclusteredInstance, SimilarityReport, build_preclustering,
                         candidate_set, verify_large, verify_similar)
from .ratio_cluster import (RatioClusterParams, RootContext, est_marg, generate_cluster,
                            generate_cluster_by_sampling, marginal)
from .rounding import (MIX_P, cluster_rounding, cluster_rounding_clocks, pivot_rounding,
                       round_mixed)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
