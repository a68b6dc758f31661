"""Geometric and entropic quantum discord, concurrence and CHSH for two qubits."""

__version__ = "0.1.0"

from .qstate import (  # noqa: E402
    BellDiagonalSpec,
    BlochForm,
    DensityMatrix,
    InvalidStateError,
    bell_diagonal,
    bell_state,
    bloch_compose,
    bloch_decompose,
    is_ppt,
    make_state,
    mems,
    mnms,
    partial_transpose_B,
    reduce,
    schmidt_pure,
    werner,
)
from .measures import (  # noqa: E402
    MeasureRecord,
    MeasurementAxis,
    chsh_max,
    classical_correlations,
    concurrence,
    conditional_entropy,
    correlation_rank,
    geometric_discord,
    measure_record,
    participation_ratio,
    qmi,
    quantum_discord,
    vn_entropy,
    zero_discord_witness,
)
