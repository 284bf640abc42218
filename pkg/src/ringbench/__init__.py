"""ringbench: degree-constrained low-diameter ring overlays.

Builds and benchmarks overlay topologies for P2P membership networks:
heuristic and protocol baselines (random/nearest-neighbor K-rings, Chord,
Perigee), a Q-learning ring builder with graph embeddings, gossip-driven
self-adaptive ring selection, partitioned parallel construction, and a
genetic-algorithm search baseline, over synthetic or file-based latency
matrices.
"""

from ._backend import backend_name, set_backend
from .graphs import (
    DegreeBound,
    LatencyMatrix,
    Ring,
    Topology,
    apply_ring,
    check_degree,
)
from .latency import (
    MatrixFormatError,
    SiteModel,
    gen_gaussian,
    gen_site_composite,
    gen_uniform,
    load_matrix,
    save_matrix,
)
from .overlays import (
    OverlaySpec,
    RingKind,
    chord_topology,
    k_ring_mix,
    nearest_neighbor_ring,
    perigee_topology,
    random_ring,
    rapid_k_ring,
)
from .paths import DiameterResult, all_pairs_shortest, diameter, diameter_detail

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "set_backend",
    "DegreeBound",
    "LatencyMatrix",
    "Ring",
    "Topology",
    "apply_ring",
    "check_degree",
    "MatrixFormatError",
    "SiteModel",
    "gen_gaussian",
    "gen_site_composite",
    "gen_uniform",
    "load_matrix",
    "save_matrix",
    "OverlaySpec",
    "RingKind",
    "chord_topology",
    "k_ring_mix",
    "nearest_neighbor_ring",
    "perigee_topology",
    "random_ring",
    "rapid_k_ring",
    "DiameterResult",
    "all_pairs_shortest",
    "diameter",
    "diameter_detail",
    "__version__",
]
