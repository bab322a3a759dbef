"""Maximum-likelihood decoders for deformed rotated surface codes.

Three backends share one interface ``decoder(code, field, syndrome)``:

``exact_ml_decode``
    sums over the whole stabilizer group (``n <= 13``);
``transfer_ml_decode``
    exact row transfer matrices (``L <= 11``);
``tn_ml_decode``
    boundary-MPS contraction with bond dimension ``chi`` (any ``L``).
"""

from .core import (
    CosetProbabilities,
    DecodeOutcome,
    Decoder,
    class_operators,
    decode_failure,
    pure_error,
    standard_pure_error,
)
from .exact import (
    exact_coset_logs,
    exact_failure_probability,
    exact_ml_decode,
    syndrome_class_table,
)
from .tn import DEFAULT_CHI, tn_coset_logs, tn_ml_decode
from .transfer import transfer_coset_logs, transfer_ml_decode

__all__ = [
    "CosetProbabilities",
    "DEFAULT_CHI",
    "DecodeOutcome",
    "Decoder",
    "class_operators",
    "decode_failure",
    "exact_coset_logs",
    "exact_failure_probability",
    "exact_ml_decode",
    "pure_error",
    "standard_pure_error",
    "syndrome_class_table",
    "tn_coset_logs",
    "tn_ml_decode",
    "transfer_coset_logs",
    "transfer_ml_decode",
]
