"""Exact maximum-likelihood decoding by enumerating the stabilizer group (small codes)."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from ..code import ENUMERATION_MAX_QUBITS, DeformedCode, SurfaceCodeLayout, build_layout
from ..noise import NoiseField, log_prob_bits
from .core import DecodeOutcome, _check_syndrome, class_operators, finish


@lru_cache(maxsize=None)
def stabilizer_group_bits(L: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``2**(n-1)`` undeformed stabilizers as ``(x, z)`` bit arrays."""
    lay = build_layout(L)
    m = lay.support_matrix.astype(np.int64)
    k = len(lay.faces)
    if k > 24:
        raise ValueError("stabilizer group too large to enumerate")
    coeff = ((np.arange(2**k)[:, None] >> np.arange(k)) & 1).astype(np.int64)
    x = (coeff[:, lay.is_xtype] @ m[lay.is_xtype]) & 1
    z = (coeff[:, ~lay.is_xtype] @ m[~lay.is_xtype]) & 1
    return x.astype(np.uint8), z.astype(np.uint8)


def exact_coset_logs(code: DeformedCode, field: NoiseField, s) -> np.ndarray:
    if code.n > ENUMERATION_MAX_QUBITS:
        raise ValueError(
            f"exact enumeration limited to n <= {ENUMERATION_MAX_QUBITS}, got n={code.n}"
        )
    sx, sz = stabilizer_group_bits(code.L)
    logs = np.empty(4)
    for c, op in enumerate(class_operators(code, s)):
        lp = log_prob_bits(field, sx ^ op.x_bits, sz ^ op.z_bits)
        logs[c] = logsumexp(lp) if np.isfinite(lp).any() else -np.inf
    return logs


def exact_ml_decode(code: DeformedCode, field: NoiseField, s) -> DecodeOutcome:
    """Coset probabilities summed over the full stabilizer group; argmax class."""
    s = _check_syndrome(code, s)
    return finish(code, s, exact_coset_logs(code, field, s))


# ---------------------------------------------------------------------------
# whole-code tables: every Pauli at once, for exhaustive failure rates


@lru_cache(maxsize=None)
def _letter_keys(L: int) -> np.ndarray:
    """``syndrome_index * 4 + class`` for every Pauli in base-4 letter order.

    Pauli ``j = sum_q letter_q * 4**q`` with ``letter = x | (z << 1)``, which
    is the order produced by ``np.kron(t_{n-1}, ..., t_0)``.
    """
    lay = build_layout(L)
    n = lay.n
    j = np.arange(4**n, dtype=np.int64)
    letters = (j[:, None] >> (2 * np.arange(n))) & 3
    x = (letters & 1).astype(np.uint8)
    z = (letters >> 1).astype(np.uint8)
    synd = lay.css_syndrome_bits(x, z).astype(np.int64)
    sidx = synd @ (1 << np.arange(synd.shape[1], dtype=np.int64))
    # class of E relative to the pure error of its syndrome
    table = lay.pure_error_table
    px = np.array([t.x_bits for t in table], dtype=np.int64)
    pz = np.array([t.z_bits for t in table], dtype=np.int64)
    ex = (x + (synd @ px)) & 1
    ez = (z + (synd @ pz)) & 1
    cls = lay.css_class_bits(ex.astype(np.uint8), ez.astype(np.uint8)).astype(np.int64)
    return sidx * 4 + cls


def all_error_probs(field: NoiseField) -> np.ndarray:
    """Probability of each of the ``4**n`` Paulis, in base-4 letter order."""
    tab = field.bit_table
    out = np.ones(1)
    for q in range(field.n - 1, -1, -1):
        out = np.kron(out, tab[q])
    return out


def syndrome_class_table(layout: SurfaceCodeLayout, field: NoiseField) -> np.ndarray:
    """``P(s, c)``: shape ``(2**(n-1), 4)``, undeformed frame, exhaustive."""
    if layout.n > ENUMERATION_MAX_QUBITS:
        raise ValueError("exhaustive tables limited to n <= 13")
    keys = _letter_keys(layout.L)
    w = np.bincount(keys, weights=all_error_probs(field), minlength=4 * 2 ** layout.num_generators)
    return w.reshape(-1, 4)


def exact_failure_probability(layout: SurfaceCodeLayout, field: NoiseField) -> float:
    """Failure probability of the exact ML decoder, summed over all errors."""
    t = syndrome_class_table(layout, field)
    return float(1.0 - t.max(axis=1).sum())
