"""Exact-arithmetic toolkit for the randomized query complexity of the
recursive 3-majority function: evaluation algorithms with query counting,
exact cost recurrences, and the stable-configuration program behind the
lower-bound constants."""

__version__ = "0.1.0"

from .formula import (                                        # noqa: F401
    HardInput, Input, TreeAddr, EncodingRandomness, HeightLimitError,
    encode, enumerate_hard, eval_input, hard_count, is_hard, make_rng,
    minority_path, q_positions, sample_hard, sensitive_bits,
)
from .algorithms import (                                     # noqa: F401
    AlgorithmId, McResult, QueryOracle, RunResult,
    exact_expected_queries, monte_carlo, naive_hard_expectation, run,
)
from .recurrence import (                                     # noqa: F401
    Ansatz, BoundInterval, ComplexityTable, DEFAULT_ANSATZ, GROWTH_ALPHA,
    binomial_bound, growth_ratio, kth_root_interval, lower_bound, solve,
    verify_ansatz,
)
from .alphadp import (                                        # noqa: F401
    AlphaResult, CanonicalClass, Configuration, DPEntry, DpResult,
    alpha, dp_optimize, enumerate_stable, reference_max_rho, resolve,
    stable_count,
)
from .oracles import (                                        # noqa: F401
    ExplicitTree, QueryNode, STOP, build_c_prime, build_c_zero,
    check_one_level_ratio, enumerate_trees_k1, format_tree,
    max_rho_over_trees_k1, parse_tree, rho_exhaustive, tree_queries,
)
