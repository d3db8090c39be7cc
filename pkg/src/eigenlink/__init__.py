"""Similarity-based link prediction with a shrunken leading spectral component."""

from .errors import (
    ConvergenceError,
    DataError,
    DegenerateError,
    DivergenceError,
    EigenlinkError,
    NumericalError,
    ResourceError,
    UsageError,
)
from .evaluation import (
    EdgeSplit,
    auc_exact,
    auc_sampled,
    aupr,
    mann_whitney_u,
    split_edges,
    winning_rate,
)
from .experiments import EvalReport, evaluate, sweep
from .graph import Graph, StatsRecord, network_stats, parse_edge_list, read_edge_list, rewire_degree_preserving
from .similarity import (
    IndexConfig,
    IndexId,
    ScoreTable,
    cle_scores,
    cle_star_scores,
    katz_scores,
    lo_scores,
    lp_scores,
    scf_enhance,
    score,
    score_local,
    tilde_scores,
    tilde_star_scores,
)
from .spectral import SpectralSummary, component_entry, pearson_cn_vs_component, top_eigenpairs

__version__ = "0.1.0"
