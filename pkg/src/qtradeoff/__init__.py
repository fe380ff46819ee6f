"""Information gain versus disturbance for quantum measurements on qubits.

Measures of how much a measurement learns about an unknown pure state
(Shannon gain ``H``, estimation fidelity ``G``) and how much it disturbs
it (operation fidelity ``F``, Bures-Uhlmann fidelity ``B``), the optimal
trade-off curves between them, and randomized checks of the bounds.
"""

from .channels import (
    KrausOperation,
    Povm,
    efficient_from_povm,
    from_json,
    hermitianize,
    identity_operation,
    induced_povm,
    kraus_from_matrices,
    random_operation,
    random_povm,
    saturating_operation,
    to_json,
)
from .errors import TradeoffError
from .measures import (
    MeasureValue,
    Method,
    bures_fidelity,
    estimation_fidelity,
    operation_fidelity,
    phi_fidelity,
    shannon_gain,
)
from .states import PureState, haar_sample, qubit_quadrature_grid
from .tradeoff import (
    Pairing,
    b_closed,
    bound_at,
    check_all_bounds,
    check_bound,
    composite_curve,
    concave_envelope,
    f_closed,
    g_closed,
    h_closed,
)

__version__ = "0.1.0"

__all__ = [
    "KrausOperation",
    "MeasureValue",
    "Method",
    "Pairing",
    "Povm",
    "PureState",
    "TradeoffError",
    "b_closed",
    "bound_at",
    "bures_fidelity",
    "check_all_bounds",
    "check_bound",
    "composite_curve",
    "concave_envelope",
    "efficient_from_povm",
    "estimation_fidelity",
    "f_closed",
    "from_json",
    "g_closed",
    "h_closed",
    "haar_sample",
    "hermitianize",
    "identity_operation",
    "induced_povm",
    "kraus_from_matrices",
    "operation_fidelity",
    "phi_fidelity",
    "qubit_quadrature_grid",
    "random_operation",
    "random_povm",
    "saturating_operation",
    "shannon_gain",
    "to_json",
]
