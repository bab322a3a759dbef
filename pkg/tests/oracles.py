"""Brute-force references used by the tests.

Everything here works from the stabilizer generators and logical operators of a
code directly, in the deformed frame, without touching the decoder modules.
"""

from __future__ import annotations

import itertools

import numpy as np

from cdsc.decode import pure_error
from cdsc.pauli import PauliOp

_LETTER_OF_BITS = np.array([0, 1, 3, 2])  # x | z << 1 -> (I, X, Y, Z) channel index


def all_syndromes(code):
    m = code.layout.num_generators
    return [np.array([(k >> i) & 1 for i in range(m)], dtype=np.uint8) for k in range(2**m)]


def all_paulis(n):
    j = np.arange(4**n)
    letters = (j[:, None] >> (2 * np.arange(n))) & 3
    return (letters & 1).astype(np.int64), (letters >> 1).astype(np.int64)


def syndrome_class_arrays(code):
    """Syndrome index and class (I, X, Z, Y) = 0..3 for every Pauli, deformed frame."""
    gens = [g for _, g in code.stabilizers]
    gx = np.array([g.x_bits for g in gens], dtype=np.int64)
    gz = np.array([g.z_bits for g in gens], dtype=np.int64)
    x, z = all_paulis(code.n)
    synd = (x @ gz.T + z @ gx.T) & 1
    sidx = synd @ (1 << np.arange(len(gens)))
    pe = [pure_error(code, s) for s in all_syndromes(code)]
    rx = (x + np.array([p.x_bits for p in pe], dtype=np.int64)[sidx]) & 1
    rz = (z + np.array([p.z_bits for p in pe], dtype=np.int64)[sidx]) & 1
    lx, lz = code.logical_x, code.logical_z
    anti_z = (rx @ lz.z_bits.astype(np.int64) + rz @ lz.x_bits.astype(np.int64)) & 1
    anti_x = (rx @ lx.z_bits.astype(np.int64) + rz @ lx.x_bits.astype(np.int64)) & 1
    return x, z, sidx, anti_z | (anti_x << 1)


def pauli_probs(x, z, channel):
    """Probability of each Pauli under one IID channel ``(p_I, p_X, p_Y, p_Z)`` in the deformed frame."""
    ch = np.asarray(channel, dtype=float)
    return np.prod(ch[_LETTER_OF_BITS[x | (z << 1)]], axis=1)


def coset_table(code, channel):
    x, z, sidx, cls = syndrome_class_arrays(code)
    table = np.zeros((2**code.layout.num_generators, 4))
    np.add.at(table, (sidx, cls), pauli_probs(x, z, channel))
    return table


def stabilizer_group(code):
    gens = [g for _, g in code.stabilizers]
    out = []
    for bits in itertools.product((0, 1), repeat=len(gens)):
        op = PauliOp.identity(code.n)
        for b, g in zip(bits, gens):
            if b:
                op = op * g
        out.append(op)
    return out


def max_logical_log_prob(code, channel):
    """Largest log-probability over all nontrivial logical operators, by group enumeration."""
    ch = np.asarray(channel, dtype=float)
    group = stabilizer_group(code)
    reps = [code.logical_x, code.logical_z, code.logical_x * code.logical_z]
    best = -np.inf
    with np.errstate(divide="ignore"):
        logs = np.log(ch)
    for rep in reps:
        for s in group:
            op = rep * s
            idx = _LETTER_OF_BITS[op.x_bits.astype(int) | (op.z_bits.astype(int) << 1)]
            best = max(best, float(logs[idx].sum()))
    return best
