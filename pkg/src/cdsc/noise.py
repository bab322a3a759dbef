"""Biased IID Pauli noise, per-qubit channel permutation and the hashing bound.

Channels are stored as ``(p_I, p_X, p_Y, p_Z)``.  A :class:`NoiseField` is
the list of per-qubit channels seen by the *undeformed* code: deforming the
code by ``sigma`` is equivalent to keeping the standard stabilizers and
replacing the channel on qubit ``q`` by ``P -> base(sigma_q(P))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import Deformation, DeformationPattern, PauliOp

# (I, X, Y, Z) positions after each deformation
_PERM = {
    Deformation.ID: (0, 1, 2, 3),
    Deformation.SWAP_XZ: (0, 3, 2, 1),
    Deformation.SWAP_YZ: (0, 1, 3, 2),
}
# channel order (I, X, Y, Z) -> bit index x | z << 1 = (I, X, Z, Y)
_TO_BITS = (0, 1, 3, 2)


def parse_eta(value) -> float:
    """Accept numbers or the literal ``inf``."""
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("inf", "infinity", "+inf"):
            return math.inf
        return float(v)
    return float(value)


def format_eta(eta: float) -> str:
    return "inf" if math.isinf(eta) else repr(float(eta))


@dataclass(frozen=True)
class BiasedNoiseParams:
    """Total error rate ``p`` and Z bias ``eta`` (``math.inf`` for pure dephasing)."""

    p: float
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "eta", parse_eta(self.eta))
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"p must lie in [0, 1), got {self.p}")
        if not self.eta >= 0.5:
            raise ValueError(f"eta must be >= 0.5, got {self.eta}")

    @property
    def infinite_bias(self) -> bool:
        return math.isinf(self.eta)


@dataclass(frozen=True)
class QubitChannel:
    p_i: float
    p_x: float
    p_y: float
    p_z: float

    def __post_init__(self):
        probs = self.as_array()
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"invalid channel {tuple(probs)}")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_i, self.p_x, self.p_y, self.p_z], dtype=float)

    def permuted(self, kind: Deformation) -> "QubitChannel":
        a = self.as_array()
        return QubitChannel(*a[list(_PERM[Deformation(kind)])])


def rates_from(params: BiasedNoiseParams) -> QubitChannel:
    p, eta = params.p, params.eta
    if math.isinf(eta):
        return QubitChannel(1.0 - p, 0.0, 0.0, p)
    px = p / (2.0 * (1.0 + eta))
    pz = p * eta / (1.0 + eta)
    return QubitChannel(1.0 - p, px, px, pz)


class NoiseField:
    """Per-qubit channels, as an ``(n, 4)`` array in ``(I, X, Y, Z)`` order."""

    def __init__(self, probs):
        probs = np.array(probs, dtype=float)
        if probs.ndim != 2 or probs.shape[1] != 4:
            raise ValueError("noise field must have shape (n, 4)")
        if (probs < 0).any() or np.abs(probs.sum(axis=1) - 1.0).max(initial=0.0) > 1e-12:
            raise ValueError("every qubit channel must be a probability vector")
        probs.setflags(write=False)
        self.probs = probs

    @classmethod
    def uniform(cls, channel: QubitChannel, n: int) -> "NoiseField":
        return cls(np.tile(channel.as_array(), (n, 1)))

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, q: int) -> QubitChannel:
        return QubitChannel(*self.probs[q])

    @property
    def bit_table(self) -> np.ndarray:
        """``(n, 4)`` probabilities indexed by ``x | (z << 1)``."""
        return self.probs[:, _TO_BITS]

    @property
    def log_bit_table(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.bit_table)


def permute_field(base: QubitChannel, pattern: DeformationPattern) -> NoiseField:
    """Channel seen by each undeformed qubit once ``pattern`` is pushed into the noise."""
    a = base.as_array()
    table = np.stack([a[list(_PERM[k])] for k in Deformation])
    return NoiseField(table[pattern.as_array()])


def field_for(params: BiasedNoiseParams, pattern: DeformationPattern) -> NoiseField:
    return permute_field(rates_from(params), pattern)


def sample_error_bits(field: NoiseField, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """IID draw returning ``(x, z)`` bit arrays; one uniform per qubit."""
    u = rng.random(field.n)
    cum = np.cumsum(field.probs, axis=1)
    letter = (u[:, None] >= cum[:, :3]).sum(axis=1)  # 0..3 in (I, X, Y, Z) order
    x = ((letter == 1) | (letter == 2)).astype(np.uint8)
    z = ((letter == 2) | (letter == 3)).astype(np.uint8)
    return x, z


def sample_error(field: NoiseField, rng: np.random.Generator) -> PauliOp:
    """One IID draw from ``field``.

    Fields built by :func:`permute_field` describe the undeformed frame, so the
    result is too; ``DeformedCode.from_standard`` gives the physical error.
    """
    x, z = sample_error_bits(field, rng)
    return PauliOp.from_arrays(x, z)


def log_prob_bits(field: NoiseField, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Log-probability of operators given as bit arrays of shape ``(..., n)``."""
    idx = x.astype(np.int64) | (z.astype(np.int64) << 1)
    return np.take_along_axis(
        np.broadcast_to(field.log_bit_table, idx.shape[:-1] + (field.n, 4)),
        idx[..., None],
        axis=-1,
    )[..., 0].sum(axis=-1)


def log_prob(field: NoiseField, e: PauliOp) -> float:
    """Sum of per-qubit log rates; ``-inf`` if any letter has zero rate."""
    if e.n != field.n:
        raise ValueError(f"length mismatch: {e.n} vs {field.n}")
    idx = e.x_bits.astype(np.int64) | (e.z_bits.astype(np.int64) << 1)
    return float(field.log_bit_table[np.arange(field.n), idx].sum())


def entropy_bits(probs) -> float:
    probs = np.asarray(probs, dtype=float)
    nz = probs[probs > 0]
    return float(-(nz * np.log2(nz)).sum())


def hashing_bound(eta, tol: float = 1e-12) -> float:
    """Error rate at which the single-qubit channel entropy equals one bit."""
    eta = parse_eta(eta)
    if not eta >= 0.5:
        raise ValueError(f"eta must be >= 0.5, got {eta}")

    def gap(p: float) -> float:
        return entropy_bits(rates_from(BiasedNoiseParams(p, eta)).as_array()) - 1.0

    lo, hi = 0.0, 0.5
    if math.isinf(eta):
        return 0.5
    # entropy is increasing on [0, 1/2] for every eta >= 1/2 and exceeds 1 bit at p = 1/2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
