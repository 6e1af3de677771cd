"""Centrality, communication counting and preferential attachment on
weighted graphs and hypergraphs."""

__version__ = "0.1.0"

from .centrality import (
    CentralityResult,
    GraphCentralityParams,
    HyperCentralityParams,
    NonCommunicativeWarning,
    balance_report,
    eigencentrality_graph,
    eigencentrality_hyper,
    expected_communication_length,
    general_centrality_graph,
    general_centrality_hyper,
    neumann_partial_sums,
    rescale_to_average,
)
from .errors import (
    ConfigError,
    HypercenError,
    HypergraphParseError,
    MembershipError,
    PoleError,
    SeriesDivergence,
    ZeroSpectrumError,
)
from .hypercore import DirectedHypergraph, Graph, Hypergraph, load, project, save
from .netgen import GenConfig, analyze, grow
from .propagation import PropagationConfig, simulate_graph, simulate_hyper
from .spectral import is_pole, lambda_max, perron_vector

__all__ = [
    "__version__",
    "CentralityResult",
    "GraphCentralityParams",
    "HyperCentralityParams",
    "NonCommunicativeWarning",
    "balance_report",
    "eigencentrality_graph",
    "eigencentrality_hyper",
    "expected_communication_length",
    "general_centrality_graph",
    "general_centrality_hyper",
    "neumann_partial_sums",
    "rescale_to_average",
    "ConfigError",
    "HypercenError",
    "HypergraphParseError",
    "MembershipError",
    "PoleError",
    "SeriesDivergence",
    "ZeroSpectrumError",
    "DirectedHypergraph",
    "Graph",
    "Hypergraph",
    "load",
    "project",
    "save",
    "GenConfig",
    "analyze",
    "grow",
    "PropagationConfig",
    "simulate_graph",
    "simulate_hyper",
    "is_pole",
    "lambda_max",
    "perron_vector",
]
