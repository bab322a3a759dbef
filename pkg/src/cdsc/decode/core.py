"""Shared decoder types: coset probabilities, outcomes, pure errors, failures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from ..code import DeformedCode, LogicalClass, logical_class
from ..noise import NoiseField
from ..pauli import PauliOp


TIE_RTOL = 1e-9


def choose_classes(logs) -> np.ndarray:
    """Most likely class along the last axis, ties resolved as ``I < X < Z < Y``.

    Cosets whose log weight is within ``TIE_RTOL`` of the best count as tied,
    so equal cosets computed along different floating-point paths still
    resolve the same way.
    """
    logs = np.asarray(logs, dtype=float)
    top = logs.max(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore"):
        near = logs >= top - TIE_RTOL * np.maximum(1.0, np.abs(top))
    near |= ~np.isfinite(top)  # nothing possible: fall back to I
    return np.argmax(near, axis=-1)


@dataclass(frozen=True)
class CosetProbabilities:
    """Normalised probabilities of the four logical cosets given a syndrome.

    ``probs`` is indexed by :class:`LogicalClass` value, i.e. ``(I, X, Z, Y)``.
    ``log_total`` is the log of the unnormalised sum, the syndrome probability.
    """

    probs: np.ndarray
    log_total: float

    @classmethod
    def from_logs(cls, logs) -> "CosetProbabilities":
        logs = np.asarray(logs, dtype=float)
        total = float(logsumexp(logs)) if np.isfinite(logs).any() else -np.inf
        if not np.isfinite(total):
            return cls(np.full(4, 0.25), total)
        return cls(np.exp(logs - total), total)

    def __getitem__(self, cls: LogicalClass) -> float:
        return float(self.probs[int(cls)])

    @property
    def i(self) -> float:
        return float(self.probs[0])

    @property
    def x(self) -> float:
        return float(self.probs[1])

    @property
    def z(self) -> float:
        return float(self.probs[2])

    @property
    def y(self) -> float:
        return float(self.probs[3])

    def best(self) -> LogicalClass:
        with np.errstate(divide="ignore"):
            return LogicalClass(int(choose_classes(np.log(self.probs))))


@dataclass(frozen=True)
class DecodeOutcome:
    chosen_class: LogicalClass
    correction: PauliOp
    coset_probs: CosetProbabilities
    converged: bool | None = None


Decoder = Callable[[DeformedCode, NoiseField, np.ndarray], DecodeOutcome]


def _check_syndrome(code: DeformedCode, s) -> np.ndarray:
    s = np.asarray(s, dtype=np.uint8).ravel()
    if len(s) != code.layout.num_generators:
        raise ValueError(
            f"syndrome has {len(s)} bits, code has {code.layout.num_generators} generators"
        )
    return s


def standard_pure_error(code: DeformedCode, s) -> PauliOp:
    """Pure error in the undeformed frame."""
    s = _check_syndrome(code, s)
    x = z = 0
    table = code.layout.pure_error_table
    for i in np.flatnonzero(s):
        x ^= table[i].x
        z ^= table[i].z
    return PauliOp(code.n, x, z)


def pure_error(code: DeformedCode, s) -> PauliOp:
    """Deterministic operator with syndrome ``s`` built from fixed boundary strings."""
    return code.from_standard(standard_pure_error(code, s))


def class_operators(code: DeformedCode, s) -> list[PauliOp]:
    """Undeformed-frame representatives ``E_pure * L_c`` for the four classes."""
    e = standard_pure_error(code, s)
    lx, lz = code.layout.logical_x, code.layout.logical_z
    out = []
    for c in LogicalClass:
        op = e
        if c & 1:
            op = op * lx
        if c & 2:
            op = op * lz
        out.append(op)
    return out


def finish(code: DeformedCode, s, logs, converged: bool | None = None) -> DecodeOutcome:
    """Build an outcome from unnormalised log coset weights."""
    cp = CosetProbabilities.from_logs(logs)
    cls = cp.best()
    correction = code.from_standard(class_operators(code, s)[int(cls)])
    return DecodeOutcome(cls, correction, cp, converged)


def decode_failure(code: DeformedCode, field: NoiseField, e: PauliOp, decoder: Decoder) -> bool:
    """True when the decoder's correction times ``e`` is a nontrivial logical."""
    from ..code import syndrome

    out = decoder(code, field, syndrome(code, e))
    residual = logical_class(code, out.correction * e)
    if residual is None:
        raise RuntimeError("correction does not reproduce the syndrome")
    return residual != LogicalClass.I
