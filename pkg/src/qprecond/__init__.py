"""Preconditioner quantum channels built from trigonometric transform unitaries."""

from .channel_reps import (
    HolevoChannel,
    KrausChannel,
    PreconditionerChannel,
    choi_matrix,
    compose,
    holevo_compose,
    holevo_from_preconditioner,
    kraus_from_choi,
    kraus_from_preconditioner,
    permutation_channel,
    preconditioner,
    stinespring_isometry,
    to_kraus,
    verify_channel_axioms,
)
from .holevo_semigroup import (
    is_idempotent_holevo,
    is_idempotent_operational,
    modified_product,
    stochastic_of,
)
from .info_metrics import (
    capacity_witness,
    code_error_probability,
    eb_classification,
    entanglement_fidelity,
    tensor_power_channel,
)
from .matrix_core import hermitian_eig
from .transform_unitaries import transform_unitary

__all__ = [
    "HolevoChannel",
    "KrausChannel",
    "PreconditionerChannel",
    "capacity_witness",
    "choi_matrix",
    "code_error_probability",
    "compose",
    "eb_classification",
    "entanglement_fidelity",
    "hermitian_eig",
    "holevo_compose",
    "holevo_from_preconditioner",
    "is_idempotent_holevo",
    "is_idempotent_operational",
    "kraus_from_choi",
    "kraus_from_preconditioner",
    "modified_product",
    "permutation_channel",
    "preconditioner",
    "stinespring_isometry",
    "stochastic_of",
    "tensor_power_channel",
    "to_kraus",
    "transform_unitary",
    "verify_channel_axioms",
]
