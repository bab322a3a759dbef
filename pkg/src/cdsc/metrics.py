"""Effective distance ``d'``, half-distance ``t'`` and the increment of ``d'`` with size.

``d'`` measures the most likely nontrivial logical operator on the log scale
of a single Z error::

    p_log = (1 - p)**n * exp(N * d'),   N = log(p_Z / (1 - p)).

``t'`` is defined the same way from the most likely error that the exact
maximum-likelihood decoder fails to correct.

The search for ``p_log`` runs a max-product pass of the row transfer matrices
from :mod:`cdsc.decode.transfer`, which is exact, followed by a forward pass
that rebuilds the lexicographically smallest maximiser.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .code import DeformedCode, FamilyParams, sample_pattern
from .decode.core import Decoder, choose_classes, class_operators
from .decode.exact import _letter_keys, all_error_probs
from .decode.transfer import row_geometry, row_log_matrix
from .noise import BiasedNoiseParams, NoiseField, field_for, parse_eta
from .pauli import PauliOp

P_LOG_MAX_L = 5
P_COR_L = 3
TIE_TOL = 1e-9

# standard-frame letter (x | z << 1) -> letter seen in the deformed frame, per deformation
_TO_DEFORMED = np.array([[0, 1, 2, 3], [0, 2, 1, 3], [0, 1, 3, 2]])
# rank of a letter in ASCII order I < X < Y < Z, indexed by x | z << 1
_ASCII_RANK = np.array([0, 1, 3, 2])
_FROM_RANK = np.array([0, 1, 3, 2])  # inverse of _ASCII_RANK (it is an involution)


def normalizer_N(p: float, eta: float) -> float:
    """``log(p eta / ((1 + eta)(1 - p)))``, the log-odds of a Z error."""
    eta = parse_eta(eta)
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if math.isinf(eta):
        raise ValueError("effective distances are undefined at infinite bias")
    return math.log(p * eta / ((1.0 + eta) * (1.0 - p)))


@dataclass(frozen=True)
class EffectiveDistanceReport:
    d_prime: float
    t_prime: float | None
    p_log: float
    log_p_log: float
    p_cor: float | None
    normalizer: float
    witnesses: dict = dc_field(default_factory=dict)


def _resolve_field(code: DeformedCode, noise) -> NoiseField:
    if isinstance(noise, BiasedNoiseParams):
        return field_for(noise, code.pattern)
    if isinstance(noise, NoiseField):
        if noise.n != code.n:
            raise ValueError(f"field has {noise.n} qubits, code has {code.n}")
        return noise
    raise TypeError("noise must be a NoiseField or BiasedNoiseParams")


def _base_rates(field: NoiseField) -> tuple[float, float]:
    """Recover ``(p, p_Z)`` from a permuted uniform field."""
    rows = np.sort(field.probs[:, 1:], axis=1)
    if not (np.allclose(rows, rows[0], rtol=0, atol=1e-15) and np.allclose(field.probs[:, 0], field.probs[0, 0])):
        raise ValueError("field is not a permutation of one biased channel")
    return 1.0 - float(field.probs[0, 0]), float(rows[0, 2])


def _row_keys(code: DeformedCode, r: int, ex, ez) -> np.ndarray:
    """Integer key of the row's deformed-frame text for every gap-state pair."""
    L = code.L
    geo = row_geometry(L)[r]
    key = np.zeros((geo.alpha.shape[1], geo.beta.shape[1]), dtype=np.int64)
    for k in range(L):
        q = r * L + k
        e = int(ex[q]) | (int(ez[q]) << 1)
        std = e ^ geo.alpha[k][:, None] ^ geo.beta[k][None, :]
        key = key * 4 + _ASCII_RANK[_TO_DEFORMED[code.kinds[q]][std]]
    return key


def _key_to_bits(code: DeformedCode, r: int, key: int) -> tuple[list[int], list[int]]:
    L = code.L
    xs, zs = [], []
    for k in range(L - 1, -1, -1):
        dl = _FROM_RANK[key & 3]
        key >>= 2
        std = _TO_DEFORMED[code.kinds[r * L + k]][dl]  # the maps are involutions
        xs.append(int(std & 1))
        zs.append(int(std >> 1))
    return xs[::-1], zs[::-1]


def _max_weight_search(code: DeformedCode, field: NoiseField, classes, witness: bool = True):
    """Most likely operator over the given cosets (sharing the zero syndrome)."""
    L = code.L
    lt = field.log_bit_table
    zero = np.zeros(code.layout.num_generators, dtype=np.uint8)
    ops = class_operators(code, zero)
    mats, backs = {}, {}
    best = -math.inf
    for c in classes:
        ex, ez = ops[c].x_bits, ops[c].z_bits
        ms = [row_log_matrix(L, r, lt, ex, ez) for r in range(L)]
        b = [None] * (L + 1)
        b[L] = np.zeros(ms[-1].shape[1])
        for r in range(L - 1, -1, -1):
            b[r] = (ms[r] + b[r + 1][None, :]).max(axis=1)
        mats[c], backs[c] = ms, b
        best = max(best, float(b[0].max()))
    if not witness or not np.isfinite(best):
        return best, None
    cut = best - TIE_TOL
    front = {c: np.zeros_like(backs[c][0]) for c in classes}
    x_all, z_all = [], []
    for r in range(L):
        cand = {}
        for c in classes:
            f = front.get(c)
            if f is None:
                continue
            part = f[:, None] + mats[c][r]
            ok = part + backs[c][r + 1][None, :] >= cut
            if ok.any():
                op = ops[c]
                cand[c] = (part, ok, _row_keys(code, r, op.x_bits, op.z_bits))
        kmin = min(int(keys[ok].min()) for _, ok, keys in cand.values())
        new_front = {}
        for c, (part, ok, keys) in cand.items():
            sel = ok & (keys == kmin)
            if sel.any():
                new_front[c] = np.where(sel, part, -np.inf).max(axis=0)
        front = new_front
        xs, zs = _key_to_bits(code, r, kmin)
        x_all += xs
        z_all += zs
    std_op = PauliOp.from_arrays(x_all, z_all)
    return best, code.from_standard(std_op)


def most_likely_logical(code: DeformedCode, noise) -> tuple[PauliOp, float]:
    """Most likely Pauli implementing a nontrivial logical, and its log-probability.

    Ties are broken by the smallest row-major text (``I < X < Y < Z``).
    """
    if code.L > P_LOG_MAX_L:
        raise ValueError(f"p_log search limited to L <= {P_LOG_MAX_L}, got L={code.L}")
    field = _resolve_field(code, noise)
    val, op = _max_weight_search(code, field, (1, 2, 3))
    if op is None:
        raise ValueError("no nontrivial logical has nonzero probability")
    return op, val


def _best_nontrivial_log(code: DeformedCode, field: NoiseField) -> float:
    return _max_weight_search(code, field, (1, 2, 3), witness=False)[0]


def most_likely_noncorrectable(code: DeformedCode, noise, decoder: Decoder | None = None) -> tuple[PauliOp, float]:
    """Most likely error on which ML decoding fails (``L = 3`` only).

    Without a ``decoder`` the exact ML choice is read from the full
    syndrome/class table, ties resolved as ``I < X < Z < Y``.
    """
    if code.L != P_COR_L:
        raise ValueError(f"p_cor search is only available at L = {P_COR_L}")
    field = _resolve_field(code, noise)
    lay = code.layout
    keys = _letter_keys(code.L)
    probs = all_error_probs(field)
    ns = 2 ** lay.num_generators
    if decoder is None:
        table = np.bincount(keys, weights=probs, minlength=4 * ns).reshape(ns, 4)
        with np.errstate(divide="ignore"):
            chosen = choose_classes(np.log(table))
    else:
        bits = (np.arange(ns)[:, None] >> np.arange(lay.num_generators)) & 1
        # deformed-frame syndromes coincide with the standard-frame ones
        chosen = np.array([int(decoder(code, field, s.astype(np.uint8)).chosen_class) for s in bits])
    fail = (keys & 3) != chosen[keys >> 2]
    with np.errstate(divide="ignore"):
        logp = np.log(probs)
    logp = np.where(fail, logp, -np.inf)
    best = float(logp.max())
    if not np.isfinite(best):
        raise ValueError("every error is corrected")
    tied = np.flatnonzero(logp >= best - TIE_TOL)
    n = code.n
    ops = []
    for j in tied:
        letters = (int(j) >> (2 * np.arange(n))) & 3
        ops.append(code.from_standard(PauliOp.from_arrays(letters & 1, letters >> 1)))
    return min(ops, key=str), best


def effective_distance(code: DeformedCode, noise, with_t_prime: bool | None = None) -> EffectiveDistanceReport:
    """Compute ``d'`` (and ``t'`` at ``L = 3``) for a code under biased noise."""
    field = _resolve_field(code, noise)
    p, pz = _base_rates(field)
    if not 0.0 < p < 1.0:
        raise ValueError("effective distances need 0 < p < 1")
    if pz >= p:
        raise ValueError("effective distances are undefined at infinite bias")
    n_log = math.log(pz / (1.0 - p))
    n = code.n
    op, lp = most_likely_logical(code, field)
    base = n * math.log1p(-p)
    d_prime = (lp - base) / n_log
    witnesses = {"logical": op}
    t_prime = p_cor = None
    if with_t_prime is None:
        with_t_prime = code.L == P_COR_L
    if with_t_prime:
        cor_op, lc = most_likely_noncorrectable(code, field)
        t_prime = (lc - base) / n_log
        p_cor = math.exp(lc)
        witnesses["noncorrectable"] = cor_op
    return EffectiveDistanceReport(d_prime, t_prime, math.exp(lp), lp, p_cor, n_log, witnesses)


def dprime_only(code: DeformedCode, params: BiasedNoiseParams) -> float:
    """``d'`` without witnesses; the fast path used for family averages."""
    field = field_for(params, code.pattern)
    n_log = normalizer_N(params.p, params.eta)
    lp = _best_nontrivial_log(code, field)
    return (lp - code.n * math.log1p(-params.p)) / n_log


def delta_dprime(
    params: FamilyParams,
    p: float,
    eta: float,
    samples: int,
    seed: int,
    L: int = 3,
) -> tuple[float, float]:
    """Mean and standard error of ``d'(L+2) - d'(L)`` over random patterns.

    Realisation ``i`` draws independent patterns for both sizes from
    ``SeedSequence(seed, spawn_key=(i,))``.
    """
    from .code import make_code

    if samples < 1:
        raise ValueError("samples must be positive")
    noise = BiasedNoiseParams(p, eta)
    normalizer_N(p, noise.eta)  # validates finite bias
    vals = np.empty(samples)
    for i in range(samples):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i,))))
        small = make_code(L, sample_pattern(params, L * L, rng))
        big = make_code(L + 2, sample_pattern(params, (L + 2) ** 2, rng))
        vals[i] = dprime_only(big, noise) - dprime_only(small, noise)
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return float(vals.mean()), se


__all__ = [
    "EffectiveDistanceReport",
    "delta_dprime",
    "dprime_only",
    "effective_distance",
    "most_likely_logical",
    "most_likely_noncorrectable",
    "normalizer_N",
]
