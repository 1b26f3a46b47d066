"""Bipartite ensembles, LOCC measurement protocols, and the
information-entanglement bounds they obey, plus distillation-yield bounds
for distinguishing-based protocols."""

from .linalg import (
    DensityOperator,
    HermitianSpectrum,
    hermitian_eig,
    partial_trace,
    partial_transpose,
    pure_state_density,
    validate_density,
)
from .entropy import (
    BipartiteEnsemble,
    MEASURE_AUTO,
    MEASURE_EOF,
    MEASURE_PURE,
    concurrence,
    entanglement,
    entropy_summary,
    holevo_chi,
    is_ppt,
    purity,
    resolve_measure,
    shannon_entropy,
    von_neumann_entropy,
)
from .protocol import (
    BoundReport,
    KrausInstrument,
    ProtocolNode,
    ProtocolTranscript,
    RoundAudit,
    audit_rounds,
    average_input_entanglement,
    average_output_entanglement,
    bound_suite,
    chain_mutual_information,
    measure_branch,
    run_protocol,
)
from .distillation import (
    BellDiagonalSpec,
    DistillationReport,
    SpectralEnsemble,
    bell_basis,
    bell_diagonal,
    bell_hashing_bound,
    bell_partial_bound,
    distillation_report,
    full_distinguish_bound,
    mean_local_entropy,
    partial_distinguish_bound,
    spectral_ensemble,
)
from .scenario import (
    Scenario,
    ScenarioError,
    bundled_scenario_path,
    dump_scenario,
    load_scenario,
    materialize_random,
    parse_scenario,
    random_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "BellDiagonalSpec",
    "BipartiteEnsemble",
    "BoundReport",
    "DensityOperator",
    "DistillationReport",
    "HermitianSpectrum",
    "KrausInstrument",
    "MEASURE_AUTO",
    "MEASURE_EOF",
    "MEASURE_PURE",
    "ProtocolNode",
    "ProtocolTranscript",
    "RoundAudit",
    "Scenario",
    "ScenarioError",
    "SpectralEnsemble",
    "audit_rounds",
    "average_input_entanglement",
    "average_output_entanglement",
    "bell_basis",
    "bell_diagonal",
    "bell_hashing_bound",
    "bell_partial_bound",
    "bound_suite",
    "bundled_scenario_path",
    "chain_mutual_information",
    "concurrence",
    "distillation_report",
    "dump_scenario",
    "entanglement",
    "entropy_summary",
    "full_distinguish_bound",
    "hermitian_eig",
    "holevo_chi",
    "is_ppt",
    "load_scenario",
    "materialize_random",
    "mean_local_entropy",
    "measure_branch",
    "parse_scenario",
    "partial_distinguish_bound",
    "partial_trace",
    "partial_transpose",
    "pure_state_density",
    "purity",
    "random_scenario",
    "resolve_measure",
    "run_protocol",
    "shannon_entropy",
    "spectral_ensemble",
    "validate_density",
    "von_neumann_entropy",
]
