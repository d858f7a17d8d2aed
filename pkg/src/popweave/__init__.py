"""popweave: synthetic populations and typed social networks.

Attribute-rich agents are sampled from a discrete Bayesian network, tied
together through constraint ("matching") networks and transitive rules,
and the result is measured for generation errors and graph statistics.
"""

__version__ = "0.1.0"

from .bn import (
    Assignment,
    BayesianNetwork,
    Evidence,
    ValidationReport,
    Variable,
    enumerate_joint,
    joint_posterior,
    joint_probability,
    posterior_marginal,
    probability_of_evidence,
    sample_assignment,
    topological_order,
    validate_network,
)
from .bn_io import (
    HopSpec,
    LinkTypeSpec,
    ScenarioConfig,
    TransitiveRule,
    load_bn,
    load_scenario,
    parse_bn,
    parse_scenario,
    serialize_bn,
)
from .errors import (
    BNFormatError,
    CapacityError,
    CycleError,
    EvidenceError,
    ImpossibleEvidenceError,
    IntegrityError,
    PopweaveError,
    ScenarioError,
    StateSpaceError,
    UnsatisfiableLinkTypeError,
)
from .linker import (
    CandidateSets,
    MatchingReport,
    TypeReport,
    create_links_for_type,
    derive_candidate_sets,
    run_all_matching,
    sample_peer_prototype,
)
from .netmetrics import (
    GraphStats,
    InteractionNetwork,
    SweepRow,
    derive_interaction_network,
    distribution_error,
    graph_stats,
    matching_error,
    sweep,
)
from .pipeline import PipelineResult, run_pipeline
from .population import (
    Agent,
    Population,
    empirical_conditionals,
    generate_population,
)
from .socialgraph import SocialGraph, TypedLink
from .transitive import apply_all_rules, apply_transitive_rule

__all__ = [name for name in dir() if not name.startswith("_")]
