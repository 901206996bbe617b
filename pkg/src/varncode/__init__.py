"""Prefix-free coding with unequal letter costs.

Build near-optimal prefix-free codes over alphabets whose letters have
different (possibly infinitely many) positive costs, evaluate entropy-based
redundancy bounds, and cross-check small instances against an exact oracle.
"""

__version__ = "0.1.0"

from .analysis import (
    BOUND_APPROX_PREFIX,
    BOUND_BETA,
    BOUND_MAX_COST,
    BOUND_MULTIPLICITY,
    BOUND_REFERENCE,
    BOUND_SIZE,
    AnalysisReport,
    ApproxBound,
    BoundValue,
    approx_bound,
    beta_bound,
    entropy,
    max_cost_bound,
    multiplicity_bound,
    reference_bound,
    report,
    size_bound,
)
from .coder import (
    CodeTree,
    ProbInput,
    SplitTrace,
    build_code,
    codeword_cost,
    prepare,
    verify_prefix_free,
)
from .costs import (
    CharRoot,
    CostSpec,
    balanced_words,
    beta_of,
    char_root,
    custom_profile,
    d_profile_of,
    fibonacci,
    finite_list,
    linear,
    parse_cost_spec,
    repeat,
    tail_sum_g,
    telegraph,
    word_count_profile,
)
from .errors import (
    BetaInfiniteError,
    BinUnderflowError,
    CapTooSmallError,
    CostSpecError,
    DivergentSpecError,
    DivergentTailError,
    InfiniteAlphabetError,
    NoRootError,
    OracleTooLargeError,
    ProbInputError,
    UnboundedProfileError,
    VarncodeError,
)
from .oracle import OracleResult, exact_opt, huffman_equal_cost

__all__ = [name for name in dir() if not name.startswith("_")]
