"""Transport-based distances between graph partitions.

Builds a metric on partitions of a graph by matching components with a
linear assignment problem whose costs are transport distances between
the components' mass distributions, plus the unbalanced extension,
Hamming/L1 baselines, ensemble generation, and MDS embeddings.
"""

__version__ = "0.1.0"

from .assignment import CostMatrix, Matching, hungarian, lifted_distance
from .baselines import hamming_component_cost, l1_component_cost, lifted_baseline
from .embedding import EmbeddingCoords, classical_mds, mds
from .ensemble import (
    DistanceMatrix,
    EnsembleSpec,
    boundary_length,
    enumerate_grid_partitions,
    flip_chain,
    pairwise_matrix,
)
from .errors import (
    DisconnectedGraphError,
    InvalidArgumentError,
    InvalidPartitionError,
    PartDistError,
    UnbalancedInputError,
)
from .graph import Graph, diameter, grid_graph, load_graph, save_graph, shortest_path_matrix
from .partition import (
    MassDistribution,
    Partition,
    component_distribution,
    from_labels,
    load_ensemble,
    load_partition_csv,
    same_partition,
    save_ensemble,
    save_partition_csv,
)
from .transport import (
    FlowSolution,
    TransportPlan,
    divergence,
    kantorovich_oracle,
    plan_to_flow,
    sink_augmented_oracle,
    unbalanced_cost,
    w1_beckmann,
)

__all__ = [
    "__version__",
    "Graph", "grid_graph", "shortest_path_matrix", "diameter", "load_graph", "save_graph",
    "MassDistribution", "Partition", "from_labels", "component_distribution",
    "same_partition", "load_partition_csv", "save_partition_csv", "load_ensemble",
    "save_ensemble",
    "FlowSolution", "TransportPlan", "w1_beckmann", "kantorovich_oracle",
    "unbalanced_cost", "sink_augmented_oracle", "plan_to_flow", "divergence",
    "CostMatrix", "Matching", "hungarian", "lifted_distance",
    "hamming_component_cost", "l1_component_cost", "lifted_baseline",
    "EnsembleSpec", "DistanceMatrix", "enumerate_grid_partitions", "flip_chain",
    "pairwise_matrix", "boundary_length",
    "EmbeddingCoords", "mds", "classical_mds",
    "PartDistError", "InvalidArgumentError", "InvalidPartitionError",
    "UnbalancedInputError", "DisconnectedGraphError",
]
