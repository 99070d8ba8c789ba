"""Supercritical bond-percolation on random split trees and d-ary trees.

A simulation library for the cluster structure left by removing each tree
edge independently in the 1 - c/ln(n) (split trees) or 1 - c/h (complete
d-ary trees) regime: generation of the random trees, one-pass cluster
extraction, the closed-form limit laws the ranked cluster sizes converge
to, exact brute-force oracles on tiny trees, and a seeded experiment
harness that measures everything at desk scale.
"""

from .rng import derive_seed, make_generator, splitmix64
from .split_vector import (SplitVectorSpec, MuEstimate, entropy_mu,
                           lattice_span, sample, sample_block,
                           uniform_binary, deterministic_uniform,
                           fixed_multiset)
from .split_tree import (SplitTree, SplitTreeParams, generate,
                         subtree_ball_counts, m_statistic, path_product,
                         bst_params, uniform_trie_params,
                         multiset_trie_params, validate,
                         VertexBudgetError, RecordingDisabledError)
from .percolation import (PercolationParams, EdgeMask, ClusterReport,
                          percolate, clusters, counting_process,
                          mask_from_removed_vertices, ShapeMismatchError)
from .regular_tree import (RegularParams, RegularClusterReport,
                           percolate_regular, tau_survival_exact,
                           total_vertices, BudgetExceededError)
from .limit_laws import (ContinuousX2, LatticeXi, LatticeLambda,
                         exponential_rate, sample_top_atoms, ks_statistic,
                         ks_test, kolmogorov_pvalue, poisson_increment_test)
from .oracle import (ExactDistribution, RegularExactLaw,
                     exact_root_cluster_law, exact_ranked_law,
                     exact_regular_law, complete_regular_tree, fixture_tree,
                     dump_mask_table, EnumerationTooLargeError)
from .harness import (ExperimentConfig, ExperimentReport, run_experiment,
                      run_theorem1, run_theorem2, run_theorem3, run_theorem4,
                      run_prop_m, run_process_n, simulate_split_replication,
                      simulate_regular_replication, clear_caches, ConfigError)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
