"""Single-photon interferometry with projective collapse, done honestly.

A particle split between a far-flying branch and an interferometer branch
lets one observer (the sender) flip a phase shifter while another (the
receiver) watches the far branch.  This package evolves that state with
exactly unitary optics, collapses it with exact projectors, and verifies
numerically that nothing the sender does moves the receiver's statistics:
local interference contrast, global invariance.

Layers:

* :mod:`nosignal.modes` -- amplitudes over labelled discrete modes
* :mod:`nosignal.optics` -- transfer matrices, circuits, isometry checks
* :mod:`nosignal.wavepacket` -- Gaussian packets, interference profiles,
  detector windows, geometry calibration
* :mod:`nosignal.measurement` -- projectors, Born rule, collapse, sampling
* :mod:`nosignal.audit` -- the end-to-end no-signalling audit
* :mod:`nosignal.cli` -- ``nosignal audit|density|validate|calibrate``
"""

from .modes import (
    DuplicateModeError,
    ModeState,
    inner,
    make_state,
    norm,
    superpose,
)
from .optics import (
    Circuit,
    Element,
    NonPhysicalCircuitError,
    PHASE_OFF,
    PHASE_ON,
    TransferMatrix,
    ValidationReport,
    WiringError,
    apply,
    beam_splitter,
    canceller_circuit,
    circuit_from_json,
    circuit_matrix,
    circuit_to_json,
    custom_element,
    deflector,
    hypothetical_canceller,
    interferometer_output,
    is_isometry,
    load_bundled_circuit,
    mach_zehnder_circuit,
    matrix_of,
    mirror,
    mz_output,
    phase_shifter,
    splitter_circuit,
    validate_circuit,
)
from .wavepacket import (
    CalibrationError,
    CalibrationResult,
    ConditioningError,
    DetectorWindow,
    Grid,
    PacketPair,
    TruncationError,
    WaveFunction,
    WindowDomainError,
    calibrate,
    combine,
    default_calibration,
    default_grid,
    gaussian,
    orthogonal_pair,
    quadrature_inner,
    quadrature_norm,
    recombine,
    symmetric_window,
    window_probability,
)
from .measurement import (
    IncompleteProjectorSetError,
    OutcomeRecord,
    Projector,
    ProjectorSet,
    ZeroNormReductionError,
    measure,
    mode_projector,
    outcome_records,
    pair_partition,
    probability,
    reduce,
    sample_outcomes,
    three_counter_partition,
    window_projector,
)
from .audit import (
    AuditReport,
    AuditRow,
    CompositeState,
    ScenarioConfig,
    build_initial,
    default_phase_sweep,
    evolve_sender,
    no_signalling_audit,
    receiver_probability,
    receiver_probability_after_sender_measurement,
    sender_projectors,
)

__version__ = "0.1.0"
