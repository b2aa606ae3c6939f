"""Metrics matched to finite discrete channels.

The pipeline turns a channel into a score ``f(x, y) = Pr(x|y)``, builds the
strict preference digraph on unordered pairs, checks it for cycles, extends it
to a total order and maps the ranks into a band metric.
"""
from .channel import (
    ChannelMatrix,
    LogSum,
    PartialScore,
    ProductChannelSpec,
    Space,
    StochasticAxis,
    SymbolChannel,
    cyclic_sum,
    expand_product,
    make_channel,
    score_from_channel,
    three_word_counterexample,
)
from .compare import ComparisonPolicy
from .errors import *  # noqa: F401,F403
from .kernels import BACKEND
from .metric import (
    MatchedMetric,
    Semimetric,
    band_metric,
    semimetric_from_extension,
    synthesize,
    triangle_violations,
)
from .order import (
    CycleWitness,
    LinearExtension,
    PairPreferenceGraph,
    UnorderedPair,
    build_graph,
    find_violation_cycle,
    linear_extension,
    premise_bruteforce,
)
from .verify import (
    MatchReport,
    MatchStatus,
    WeakOrdering,
    strong_exists_bruteforce,
    verify_compatibility,
    verify_matched,
    weak_orderings,
)

__version__ = "0.1.0"
