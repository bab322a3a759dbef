"""Random-bond eight-vertex model attached to a deformed surface code.

Each stabilizer generator carries an Ising spin; ``s^X`` spins sit on X-type
faces and ``s^Z`` spins on Z-type faces of the undeformed layout.  Every
qubit contributes three terms, labelled here by the undeformed-frame Pauli
whose commutation pattern they encode:

* the ``X`` term couples the qubit's two ``s^Z`` spins,
* the ``Z`` term couples its two ``s^X`` spins,
* the ``Y`` term couples all four.

On a deformed qubit the coupling strengths are permuted the same way as the
channel, so the term labelled ``T`` carries ``J_{sigma(T)}``.  Spins that would
sit on a missing boundary face are fixed to ``+1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..code import DeformedCode, build_layout
from ..noise import BiasedNoiseParams, parse_eta, rates_from
from ..pauli import Deformation, DeformationPattern, PauliOp, permute_bits

# undeformed-frame term order used throughout: (X, Y, Z)
TERMS = ("X", "Y", "Z")
# deformed Pauli seen by each undeformed-frame term, per deformation; index into (J_X, J_Y, J_Z)
_TERM_SOURCE = {
    Deformation.ID: (0, 1, 2),
    Deformation.SWAP_XZ: (2, 1, 0),
    Deformation.SWAP_YZ: (0, 2, 1),
}


def nishimori_couplings(p: float, eta, beta: float = 1.0) -> tuple[float, float, float]:
    """``(J_X, J_Y, J_Z)`` on the Nishimori line.

    ``J_P = log(p_P**2 (1 - p) / (p_X p_Y p_Z)) / (4 beta)``.  At infinite
    bias ``J_Z`` is ``math.inf`` and ``J_X = J_Y`` take their finite limit.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not beta > 0:
        raise ValueError("beta must be positive")
    eta = parse_eta(eta)
    ch = rates_from(BiasedNoiseParams(p, eta))
    if math.isinf(eta):
        jxy = math.log((1.0 - p) / p) / (4.0 * beta)
        return jxy, jxy, math.inf
    lx, ly, lz = math.log(ch.p_x), math.log(ch.p_y), math.log(ch.p_z)
    rest = math.log1p(-p) - lx - ly - lz
    return tuple((2.0 * v + rest) / (4.0 * beta) for v in (lx, ly, lz))  # type: ignore[return-value]


@dataclass(frozen=True)
class RBIMInstance:
    """Couplings of the disordered model for one error configuration.

    ``strengths`` and ``signs`` have shape ``(n, 3)`` in term order ``(X, Y, Z)``.
    ``x_pairs`` / ``z_pairs`` hold the two spin indices touched by each qubit
    on the respective sublattice; index ``-1`` stands for a fixed boundary spin.
    """

    L: int
    strengths: np.ndarray
    signs: np.ndarray
    x_pairs: np.ndarray
    z_pairs: np.ndarray
    num_x_spins: int
    num_z_spins: int
    beta: float

    def _bonds(self, sx: np.ndarray, sz: np.ndarray) -> np.ndarray:
        sx = np.append(np.asarray(sx, dtype=float), 1.0)  # index -1 -> fixed +1
        sz = np.append(np.asarray(sz, dtype=float), 1.0)
        bx = sx[self.x_pairs[:, 0]] * sx[self.x_pairs[:, 1]]
        bz = sz[self.z_pairs[:, 0]] * sz[self.z_pairs[:, 1]]
        return np.stack([bz, bx * bz, bx], axis=1)

    def energy(self, sx, sz) -> float:
        """``H = -sum_q sum_T tau_T J_T (spin product of term T)``."""
        terms = self.strengths * self.signs * self._bonds(sx, sz)
        return float(-np.sum(terms))

    def incident_qubits(self, sublattice: str, k: int) -> np.ndarray:
        """Qubits whose terms involve spin ``k`` of the given sublattice."""
        pairs = self.x_pairs if sublattice == "X" else self.z_pairs
        return np.flatnonzero((pairs == k).any(axis=1))


def _spin_pairs(L: int, kind: str) -> tuple[np.ndarray, int]:
    lay = build_layout(L)
    edges = lay.x_edges if kind == "X" else lay.z_edges
    nk = int(edges.max()) - 1
    out = edges.copy()
    out[out >= nk] = -1
    return out, nk


def build_rbim(code: DeformedCode, e: PauliOp, p: float, eta, beta: float = 1.0) -> RBIMInstance:
    """Disordered couplings for error ``e`` (deformed frame) at ``(p, eta)``.

    ``tau_T(q) = +1`` exactly when the undeformed-frame letter of ``e`` at ``q``
    commutes with ``T``.
    """
    if e.n != code.n:
        raise ValueError(f"error has {e.n} qubits, code has {code.n}")
    j = np.array(nishimori_couplings(p, eta, beta))
    kinds = code.kinds
    src = np.array([_TERM_SOURCE[Deformation(k)] for k in kinds])
    strengths = j[src]
    x, z = permute_bits(kinds, e.x_bits, e.z_bits)
    x = x.astype(int)
    z = z.astype(int)
    # term X anticommutes with z-part, Z with x-part, Y with x xor z
    signs = 1 - 2 * np.stack([z, x ^ z, x], axis=1)
    xp, nx = _spin_pairs(code.L, "X")
    zp, nz = _spin_pairs(code.L, "Z")
    return RBIMInstance(code.L, strengths, signs.astype(float), xp, zp, nx, nz, beta)


@dataclass(frozen=True)
class ConstraintGraph:
    """Infinite-coupling constraints at ``eta = inf``.

    ``kinds[q]`` is ``"J_Z"`` (the qubit's two ``s^X`` spins must agree),
    ``"J_X"`` (its two ``s^Z`` spins) or ``"J_Y"`` (the product of all four).
    Pairs use the virtual-node convention of the layout's face graphs.
    """

    L: int
    kinds: tuple[str, ...]
    x_edges: np.ndarray
    z_edges: np.ndarray

    @property
    def counts(self) -> dict[str, int]:
        return {k: self.kinds.count(k) for k in ("J_X", "J_Y", "J_Z")}

    def sublattice_edges(self, kind: str) -> np.ndarray:
        """Two-spin constraints on one sublattice (``"X"`` or ``"Z"``)."""
        mask = np.array([k == ("J_Z" if kind == "X" else "J_X") for k in self.kinds])
        return (self.x_edges if kind == "X" else self.z_edges)[mask]

    def four_spin(self) -> np.ndarray:
        """Qubit indices carrying ``J_Y`` constraints."""
        return np.array([q for q, k in enumerate(self.kinds) if k == "J_Y"], dtype=int)


_CONSTRAINT = {Deformation.ID: "J_Z", Deformation.SWAP_XZ: "J_X", Deformation.SWAP_YZ: "J_Y"}


def infinite_bias_constraints(pattern: DeformationPattern, L: int) -> ConstraintGraph:
    if pattern.n != L * L:
        raise ValueError(f"pattern has {pattern.n} qubits, expected {L * L}")
    lay = build_layout(L)
    return ConstraintGraph(L, tuple(_CONSTRAINT[k] for k in pattern.kinds), lay.x_edges, lay.z_edges)
