"""Constructive machinery for squares of Hamilton cycles in sparse graphs.

Submodules:
    graphcore: graphs, random generation, counting statistics, goodness checks.
    gadgets: square-path / pseudo-path / backbone templates and embeddings.
    matching: Hall, star, and set-system matching engines with witnesses.
    connector: projection-graph growth and pair-to-pair connection search.
    absorber: per-vertex absorbing structures, chaining, verification.
    hamiltonian: the end-to-end pipeline, brute-force oracle, certificates.
    adversary: triangle-removal attacks, retention profiling, experiments.
    cli: the ``artifact`` command-line front end.
"""

__version__ = "0.1.0"

from .absorber import (
    Absorber,
    AbsorberConfig,
    AbsorberUnit,
    StarRecord,
    absorb,
    build_single_absorbers,
    chain_absorbers,
    complete_absorbers,
    verify_absorber,
)
from .adversary import (
    AttackResult,
    ExperimentChecks,
    RetentionProfile,
    k3_attack,
    max_triangle_packing,
    prune_triangle_poor_edges,
    resilience_experiment,
    triangle_retention_profile,
)
from .connector import (
    ConnectionRequest,
    ConnectResult,
    build_projection_graph,
    connect_all,
    connect_one,
    extract_pseudo_path,
)
from .gadgets import (
    Embedding,
    Gadget,
    build_gadget,
    is_square_cycle,
    is_square_path,
    validate_embedding,
)
from .graphcore import (
    FamilyParams,
    Graph,
    InputError,
    check_family_membership,
    check_good_set,
    complete_graph,
    gnp_generate,
    read_graph,
    rng_for,
    write_graph,
)
from .hamiltonian import (
    Certificate,
    FailureReport,
    PipelineConfig,
    brute_force_square_ham,
    find_square_ham,
    verify_certificate,
)
from .matching import (
    BipartiteInstance,
    SetSystemInstance,
    hall_saturating_matching,
    haxell_matching,
    star_matching,
)

__all__ = [
    "__version__",
    "Absorber",
    "AbsorberConfig",
    "AbsorberUnit",
    "AttackResult",
    "BipartiteInstance",
    "Certificate",
    "ConnectResult",
    "ConnectionRequest",
    "Embedding",
    "ExperimentChecks",
    "FailureReport",
    "FamilyParams",
    "Gadget",
    "Graph",
    "InputError",
    "PipelineConfig",
    "RetentionProfile",
    "SetSystemInstance",
    "StarRecord",
    "absorb",
    "brute_force_square_ham",
    "build_gadget",
    "build_projection_graph",
    "build_single_absorbers",
    "chain_absorbers",
    "check_family_membership",
    "check_good_set",
    "complete_absorbers",
    "complete_graph",
    "connect_all",
    "connect_one",
    "extract_pseudo_path",
    "find_square_ham",
    "gnp_generate",
    "hall_saturating_matching",
    "haxell_matching",
    "is_square_cycle",
    "is_square_path",
    "k3_attack",
    "max_triangle_packing",
    "prune_triangle_poor_edges",
    "read_graph",
    "resilience_experiment",
    "rng_for",
    "star_matching",
    "triangle_retention_profile",
    "validate_embedding",
    "verify_absorber",
    "verify_certificate",
    "write_graph",
]
