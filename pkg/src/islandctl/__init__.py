"""Controlled islanding of AC/DC power grids via constrained spectral partitioning.

Splits an operating network into k self-contained islands, keeping coherent
generator groups together and VSC-HVDC terminal pairs apart, minimizing the
composite power-flow disruption of the cut.
"""

from .clustering import ClusterResult, KMeansConfig, kmeans, lloyd_backend, wgss
from .errors import (
    CannotLinkViolationError,
    DegenerateDistanceError,
    DisconnectedGraphError,
    EigensolverError,
    InfeasibleError,
    InputError,
    IslandConnectivityError,
    IslandctlError,
    MustLinkViolationError,
    NumericalError,
    ParseError,
    SingularMatrixError,
    UsageError,
    ValidationError,
    ZeroDegreeError,
)
from .gridio import (
    parse_constraints,
    parse_network,
    parse_scheme,
    parse_snapshot,
    serialize_network,
    serialize_scheme,
)
from .impedance import (
    ImpedanceMatrix,
    build_ybus,
    build_zbus,
    distance_matrix,
    electrical_distance,
)
from .islanding import (
    CutLine,
    IslandingScheme,
    IslandStats,
    SolveConfig,
    ValidationReport,
    check_limits,
    composite_disruption,
    extract_cut,
    island_imbalance,
    repair_connectivity,
    solve_islanding,
    validate_coherence,
    validate_vsc,
)
from .model import Branch, Bus, BusIndex, Generator, Network, PqCircle, Snapshot, VscLink
from .spectral import (
    Partition,
    SpectralEmbedding,
    cut_value,
    ncut_value,
    normalized_laplacian,
    spectral_embedding,
    total_cut,
)
from .weights import (
    ConstraintSet,
    DegreeMatrix,
    Edge,
    WeightedGraph,
    apply_coherence_constraints,
    apply_vsc_constraints,
    build_weighted_graph,
    degree_matrix,
    edge_disruption,
)

__version__ = "0.1.0"
