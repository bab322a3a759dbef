"""Self-duality cluster estimates of the optimal threshold of the XY code.

On the Nishimori line the local Boltzmann factor of a qubit equals, up to a
constant ``A`` common to all qubits, the channel probability of the error
multiplied by the flip selected by its spins.  With the letter encoding
``x | z << 1``, flipping the ``s^X`` pair multiplies by X, the ``s^Z`` pair by Z::

    LBF(u; E) = A * q(E ^ u)

Its binary Fourier transform is::

    DBF(w; E) = (A / 2) * (-1)**popcount(E & w) * qhat(w),
    qhat(w)   = sum_v (-1)**popcount(v & w) * q(v).

Equating the disorder-averaged log partition sums over a cluster of ``k``
qubits with ``m`` summed spins, the constants cancel and the condition reads::

    < log sum_u prod_q q(E_q ^ u_q) > = < log |sum_w prod_q chi(E_q, w_q) qhat(w_q)| > - k log 2

The ``c = 0`` cluster (one crossing, nothing summed) reduces to the hashing
bound.  Cluster geometries used here:

* ``c = 1``: the four qubits around one face, that face's spin summed;
* ``c = 2``: a 3 x 3 block of qubits with its four interior face spins summed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..noise import BiasedNoiseParams, QubitChannel, parse_eta, rates_from
from ..pauli import Deformation

EXACT_MAX_SIGN_VARIABLES = 20
DEFAULT_MC_SAMPLES = 200_000
_BITS = (0, 1, 3, 2)  # (I, X, Y, Z) -> x | z << 1


@dataclass(frozen=True)
class Cluster:
    """Qubits in the cluster and the letter flip each summed-spin state induces.

    ``flips[u, q]`` is the ``x | z << 1`` flip on qubit ``q`` for spin state ``u``.
    """

    level: int
    flips: np.ndarray

    @property
    def num_qubits(self) -> int:
        return self.flips.shape[1]

    @property
    def num_sign_variables(self) -> int:
        return 2 * self.num_qubits


def _block_cluster(rows: int, cols: int, summed: list[tuple[int, int]], level: int) -> Cluster:
    qubits = [(r, c) for r in range(rows) for c in range(cols)]
    m = len(summed)
    flips = np.zeros((2**m, len(qubits)), dtype=np.int64)
    for u in range(2**m):
        for j, (fr, fc) in enumerate(summed):
            if not (u >> j) & 1:
                continue
            letter = 1 if (fr + fc) % 2 == 0 else 2  # X-type face -> X flip
            for k, (r, c) in enumerate(qubits):
                if fr in (r - 1, r) and fc in (c - 1, c):
                    flips[u, k] ^= letter
    return Cluster(level, flips)


@lru_cache(maxsize=None)
def cluster_geometry(level: int) -> Cluster:
    if level == 0:
        return Cluster(0, np.zeros((1, 1), dtype=np.int64))
    if level == 1:
        # qubits (0,0) (0,1) (1,0) (1,1) surround face (0,0)
        return _block_cluster(2, 2, [(0, 0)], 1)
    if level == 2:
        return _block_cluster(3, 3, [(0, 0), (0, 1), (1, 0), (1, 1)], 2)
    raise ValueError(f"cluster level must be 0, 1 or 2, got {level}")


def xy_code_channel(p: float, eta) -> QubitChannel:
    """Undeformed-frame channel of an XY-code qubit (every qubit is H_YZ-deformed)."""
    return rates_from(BiasedNoiseParams(p, eta)).permuted(Deformation.SWAP_YZ)


def _fourier(q: np.ndarray) -> np.ndarray:
    v = np.arange(4)
    sign = np.array([[(-1) ** bin(a & b).count("1") for b in v] for a in v])
    return sign @ q


def _kron_all(vectors: list[np.ndarray]) -> np.ndarray:
    out = np.ones(1)
    for vec in reversed(vectors):
        out = np.kron(out, vec)
    return out


def self_dual_gap(channel: QubitChannel, level: int, mc_samples: int = DEFAULT_MC_SAMPLES, rng=None) -> float:
    """``<log Z_cluster> - <log Z*_cluster>`` (natural log); zero at the estimate.

    Raises ``ValueError`` unless the channel has ``P(X) = P(Z)``, the condition
    for the disorder-free model to be self-dual.
    """
    a = channel.as_array()
    if not math.isclose(a[1], a[3], rel_tol=1e-12, abs_tol=1e-15):
        raise ValueError("cluster method needs a self-dual channel with P(X) = P(Z)")
    q = a[list(_BITS)]
    qhat = _fourier(q)
    cl = cluster_geometry(level)
    k = cl.num_qubits
    chi = np.array([[(-1) ** bin(e & w).count("1") for e in range(4)] for w in range(4)], dtype=float)
    if cl.num_sign_variables <= EXACT_MAX_SIGN_VARIABLES:
        weights = _kron_all([q] * k)
        lhs = np.zeros_like(weights)
        rhs = np.zeros_like(weights)
        for flips in cl.flips:
            lhs += _kron_all([q[np.arange(4) ^ f] for f in flips])
            rhs += _kron_all([chi[f] * qhat[f] for f in flips])
        ok = weights > 0
        with np.errstate(divide="ignore"):
            vals = np.log(lhs[ok]) - np.log(np.abs(rhs[ok]))
        return float(np.dot(weights[ok], vals) + k * math.log(2.0))
    if rng is None:
        raise ValueError("Monte Carlo averaging needs an rng")
    errs = rng.choice(4, size=(mc_samples, k), p=q)
    lhs = np.zeros(mc_samples)
    rhs = np.zeros(mc_samples)
    for flips in cl.flips:
        lhs += np.prod(q[errs ^ flips[None, :]], axis=1)
        rhs += np.prod(chi[flips[None, :], errs] * qhat[flips][None, :], axis=1)
    return float(np.mean(np.log(lhs) - np.log(np.abs(rhs))) + k * math.log(2.0))


def cluster_threshold(
    eta,
    c: int,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    rng=None,
    tol: float = 1e-10,
) -> float:
    """Threshold estimate of the XY code from the level-``c`` cluster, by bisection in ``p``."""
    eta = parse_eta(eta)
    if not eta >= 0.5:
        raise ValueError(f"eta must be >= 0.5, got {eta}")
    if math.isinf(eta):
        raise ValueError("the cluster method is applied at finite bias")
    cl = cluster_geometry(c)
    # common random numbers: every bisection step averages over the same disorder draws
    seed = None
    if cl.num_sign_variables > EXACT_MAX_SIGN_VARIABLES:
        if rng is None:
            raise ValueError("Monte Carlo averaging needs an rng")
        seed = int(rng.integers(2**63))

    def gap(p: float) -> float:
        local = None if seed is None else np.random.default_rng(seed)
        return self_dual_gap(xy_code_channel(p, eta), c, mc_samples, local)

    lo, hi = 1e-4, 0.5
    g_lo, g_hi = gap(lo), gap(hi)
    if not (g_lo > 0 > g_hi):
        raise RuntimeError(f"self-duality condition not bracketed: gap({lo})={g_lo}, gap({hi})={g_hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
