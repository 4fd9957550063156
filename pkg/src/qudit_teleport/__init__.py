"""Controlled teleportation of multi-qudit states over d-dimensional GHZ channels."""

from .decoy import (
    DecoyBatch,
    DecoyRecord,
    EveModel,
    check_decoys,
    detection_probability_analytic,
    generate_decoys,
    run_decoy_check,
    transmit,
)
from .errors import *  # noqa: F401,F403
from .gates import (
    Basis,
    GeneralizedPauli,
    basis_matrix,
    basis_vector,
    bell_matrix,
    bell_state,
    generalized_pauli,
    ghz_state,
    x_basis_vector,
    z_basis_vector,
)
from .measurement import (
    BellMeasurement,
    BellOutcome,
    Branch,
    SingleMeasurement,
    SingleOutcome,
    enumerate_branches,
    measure_bell,
    measure_single,
    project_onto,
)
from .protocol import (
    ProtocolConfig,
    RunReport,
    Transcript,
    alice_measure,
    build_channel,
    charlie_correct,
    compute_correction,
    controllers_measure,
    eta_q,
    run_sampled,
    verify_all_branches,
)
from .register import (
    ParticleLabel,
    ParticleRegistry,
    StateVector,
    apply_single_qudit_unitary,
    basis_state,
    fidelity,
    from_amplitudes,
    inner_product,
    load_state,
    random_state,
    save_state,
    tensor,
)

__version__ = "0.1.0"
