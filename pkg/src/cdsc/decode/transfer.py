"""Exact row-by-row transfer-matrix contraction of the coset sum.

The stabilizer coefficients are grouped by lattice "gaps": gap ``g`` holds the
faces with row index ``g`` (``g = -1`` is the top boundary, ``g = L-1`` the
bottom one).  Qubit row ``r`` only touches gaps ``r-1`` and ``r``, so the sum
over all stabilizers is a product of ``2**|gap|``-sized transfer matrices.
Exact, but the state space is ``2**L`` so it is meant for ``L <= 11``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from ..code import DeformedCode, SurfaceCodeLayout, build_layout
from ..noise import NoiseField
from .core import DecodeOutcome, _check_syndrome, class_operators, finish

TRANSFER_MAX_L = 11
_NEG = -1e250  # finite stand-in for log(0) so that matmuls never see inf * 0


@dataclass(frozen=True)
class RowGeometry:
    """Letter flips induced on each qubit of a row by the two adjacent gap states.

    ``alpha[k, a]`` is the ``x | z << 1`` flip on qubit ``(r, k)`` produced by
    state ``a`` of gap ``r-1``; ``beta[k, b]`` likewise for gap ``r``.
    """

    alpha: np.ndarray
    beta: np.ndarray
    onehot_a: np.ndarray  # (A, 4L)
    onehot_b: np.ndarray  # (B, 4L)


@lru_cache(maxsize=None)
def gap_faces(L: int) -> tuple[tuple[int, ...], ...]:
    """Global face indices in each gap, ordered by column; entry ``g+1`` is gap ``g``."""
    lay = build_layout(L)
    return tuple(
        tuple(sorted((i for i, f in enumerate(lay.faces) if f.row == g), key=lambda i: lay.faces[i].col))
        for g in range(-1, L)
    )


def _flips(lay: SurfaceCodeLayout, faces: tuple[int, ...], q: int) -> np.ndarray:
    states = np.arange(2 ** len(faces))
    out = np.zeros(len(states), dtype=np.int64)
    for bit, fi in enumerate(faces):
        f = lay.faces[fi]
        if q in f.qubits:
            out ^= ((states >> bit) & 1) * (1 if f.kind == "X" else 2)
    return out


def _onehot(flips: np.ndarray) -> np.ndarray:
    # flips: (L, S) -> (S, 4L) with column 4k + v set when flips[k, s] == v
    L, S = flips.shape
    out = np.zeros((S, 4 * L))
    for k in range(L):
        out[np.arange(S), 4 * k + flips[k]] = 1.0
    return out


@lru_cache(maxsize=None)
def row_geometry(L: int) -> tuple[RowGeometry, ...]:
    lay = build_layout(L)
    gaps = gap_faces(L)
    rows = []
    for r in range(L):
        qs = [lay.qubit(r, c) for c in range(L)]
        alpha = np.stack([_flips(lay, gaps[r], q) for q in qs])
        beta = np.stack([_flips(lay, gaps[r + 1], q) for q in qs])
        rows.append(RowGeometry(alpha, beta, _onehot(alpha), _onehot(beta)))
    return tuple(rows)


def row_log_matrix(L: int, r: int, log_table: np.ndarray, ex: np.ndarray, ez: np.ndarray) -> np.ndarray:
    """``M[a, b]``: log-probability of row ``r`` given the adjacent gap states.

    ``log_table`` is the ``(n, 4)`` log table indexed by ``x | z << 1`` and
    ``ex, ez`` the reference operator bits (undeformed frame).
    """
    geo = row_geometry(L)[r]
    lay = build_layout(L)
    block = np.zeros((4 * L, 4 * L))
    v = np.arange(4)
    for k in range(L):
        q = lay.qubit(r, k)
        e = int(ex[q]) | (int(ez[q]) << 1)
        lt = np.maximum(log_table[q], _NEG)
        block[4 * k:4 * k + 4, 4 * k:4 * k + 4] = lt[e ^ v[:, None] ^ v[None, :]]
    m = geo.onehot_a @ block @ geo.onehot_b.T
    m[m < 0.5 * _NEG] = -np.inf
    return m


def transfer_log_weight(L: int, log_table: np.ndarray, ex, ez, mode: str = "sum") -> float:
    """Log of the sum (or max) over all stabilizers of the operator probability."""
    if mode not in ("sum", "max"):
        raise ValueError("mode must be 'sum' or 'max'")
    vec = np.zeros(1)
    for r in range(L):
        m = row_log_matrix(L, r, log_table, ex, ez)
        t = vec[:, None] + m
        if mode == "sum":
            with np.errstate(invalid="ignore"):
                vec = logsumexp(t, axis=0)
        else:
            vec = t.max(axis=0)
    # the bottom gap is still free
    if mode == "sum":
        return float(logsumexp(vec)) if np.isfinite(vec).any() else -np.inf
    return float(vec.max())


def transfer_coset_logs(code: DeformedCode, field: NoiseField, s, mode: str = "sum") -> np.ndarray:
    if code.L > TRANSFER_MAX_L:
        raise ValueError(f"transfer-matrix contraction limited to L <= {TRANSFER_MAX_L}")
    lt = field.log_bit_table
    return np.array(
        [transfer_log_weight(code.L, lt, op.x_bits, op.z_bits, mode) for op in class_operators(code, s)]
    )


def transfer_ml_decode(code: DeformedCode, field: NoiseField, s) -> DecodeOutcome:
    """Exact coset probabilities by transfer matrices (any odd ``L <= 11``)."""
    s = _check_syndrome(code, s)
    return finish(code, s, transfer_coset_logs(code, field, s))
