"""Approximate maximum-likelihood decoding by boundary-MPS tensor-network contraction.

Each qubit ``(r, c)`` carries one tensor with up to four legs.  A leg carries
the binary coefficients of the stabilizer faces it is assigned to:

* the vertical leg between ``(r, c)`` and ``(r+1, c)`` carries face ``(r, c)``,
  plus the left-boundary face ``(r, -1)`` in column 0;
* the horizontal leg between ``(r, c)`` and ``(r, c+1)`` carries faces
  ``(r-1, c)`` and ``(r, c)``.

Only faces that exist are carried, so leg dimensions are 1, 2 or 4.  A tensor
is nonzero only where legs sharing a face agree on its coefficient, and there
it equals the channel probability of the reference error times the product
of the selected stabilizers.  Contracting the grid therefore sums the error
probability over one stabilizer coset.

The grid is contracted from the top, one row at a time, keeping the boundary
as a matrix product state truncated to bond dimension ``chi``.  Norms are
accumulated in log space.  Many syndromes can be contracted together; the
bond dimensions depend only on the lattice, so a batch moves in lockstep
through stacked QR and SVD calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..code import DeformedCode, build_layout
from ..noise import NoiseField
from .core import DecodeOutcome, choose_classes, _check_syndrome, class_operators, finish

DEFAULT_CHI = 20
CONVERGENCE_STEP = 8


@dataclass(frozen=True)
class _SiteGeometry:
    shape: tuple[int, int, int, int]  # (up, left, right, down)
    flat: np.ndarray  # flat indices of consistent leg assignments
    flip: np.ndarray  # letter flip (x | z << 1) at each of those indices


def _leg_faces(L: int, r: int, c: int) -> tuple[list, list, list, list]:
    lay = build_layout(L)
    fi = lay.face_index

    def keep(cands):
        return [fi[f] for f in cands if f in fi]

    def vertical(rr, cc):  # between (rr, cc) and (rr+1, cc)
        if not 0 <= rr <= L - 2:
            return []
        return keep([(rr, cc)] + ([(rr, -1)] if cc == 0 else []))

    def horizontal(rr, cc):  # between (rr, cc) and (rr, cc+1)
        if not 0 <= cc <= L - 2:
            return []
        return keep([(rr - 1, cc), (rr, cc)])

    return vertical(r - 1, c), horizontal(r, c - 1), horizontal(r, c), vertical(r, c)


@lru_cache(maxsize=None)
def _geometry(L: int) -> tuple[tuple[_SiteGeometry, ...], ...]:
    lay = build_layout(L)
    grid = []
    for r in range(L):
        row = []
        for c in range(L):
            q = lay.qubit(r, c)
            legs = _leg_faces(L, r, c)
            shape = tuple(2 ** len(leg) for leg in legs)
            touching = sorted({f for leg in legs for f in leg})
            for f in touching:
                assert q in lay.faces[f].qubits
            flat, flips = [], []
            for idx in np.ndindex(*shape):
                val: dict[int, int] = {}
                ok = True
                for leg, v in zip(legs, idx):
                    for bit, f in enumerate(leg):
                        b = (v >> bit) & 1
                        if val.setdefault(f, b) != b:
                            ok = False
                if not ok:
                    continue
                fl = 0
                for f, b in val.items():
                    if b:
                        fl ^= 1 if lay.faces[f].kind == "X" else 2
                flat.append(np.ravel_multi_index(idx, shape))
                flips.append(fl)
            row.append(_SiteGeometry(shape, np.array(flat), np.array(flips)))
        grid.append(tuple(row))
    return tuple(grid)


def _row_tensors(L: int, r: int, tables: np.ndarray, letters: np.ndarray) -> list[np.ndarray]:
    """Site tensors of row ``r`` for a batch: ``tables`` is ``(B, n, 4)``, ``letters`` ``(B, n)``."""
    geo = _geometry(L)[r]
    nb = tables.shape[0]
    rows = np.arange(nb)[:, None]
    out = []
    for c in range(L):
        g = geo[c]
        q = r * L + c
        t = np.zeros((nb, int(np.prod(g.shape))))
        t[:, g.flat] = tables[rows, q, letters[:, q, None] ^ g.flip[None, :]]
        out.append(t.reshape((nb,) + g.shape))
    return out


class _Boundary:
    """Batch of boundary MPSs with tensors ``(batch, left, down, right)`` and log scales."""

    def __init__(self, sites: list[np.ndarray]):
        self.sites = sites
        self.log_scale = np.zeros(sites[0].shape[0])

    @classmethod
    def from_top_row(cls, tensors: list[np.ndarray]) -> "_Boundary":
        return cls([t[:, 0].transpose(0, 1, 3, 2) for t in tensors])

    def absorb(self, tensors: list[np.ndarray]) -> None:
        out = []
        for m, t in zip(self.sites, tensors):
            nb, a, _, b = m.shape
            _, _, l, rr, d = t.shape
            out.append(np.einsum("naub,nulrd->naldbr", m, t).reshape(nb, a * l, d, b * rr))
        self.sites = out

    def _rescale(self, k: int) -> None:
        m = self.sites[k]
        nrm = np.sqrt(np.einsum("nadb,nadb->n", m, m))
        bad = ~(nrm > 0) | ~np.isfinite(nrm)
        # a vanishing network stays at zero; its log scale records -inf
        safe = np.where(bad, 1.0, nrm)
        self.log_scale = np.where(bad, -np.inf, self.log_scale + np.log(safe))
        self.sites[k] = np.where(bad[:, None, None, None], 0.0, m / safe[:, None, None, None])

    def compress(self, chi: int) -> None:
        s = self.sites
        n = len(s)
        if max(m.shape[3] for m in s) <= chi:
            # nothing to truncate; only keep the numbers in range
            for k in range(n):
                self._rescale(k)
            return
        for k in range(n - 1):
            nb, a, d, b = s[k].shape
            q, r = np.linalg.qr(s[k].reshape(nb, a * d, b))
            s[k] = q.reshape(nb, a, d, -1)
            nxt = s[k + 1]
            _, na, nd, nc = nxt.shape
            s[k + 1] = (r @ nxt.reshape(nb, na, nd * nc)).reshape(nb, r.shape[1], nd, nc)
        self._rescale(n - 1)
        for k in range(n - 1, 0, -1):
            nb, a, d, b = s[k].shape
            u, sv, vh = np.linalg.svd(s[k].reshape(nb, a, d * b), full_matrices=False)
            keep = min(chi, sv.shape[1])
            s[k] = vh[:, :keep].reshape(nb, keep, d, b)
            prev = s[k - 1]
            _, pa, pd, pb = prev.shape
            w = u[:, :, :keep] * sv[:, None, :keep]
            s[k - 1] = (prev.reshape(nb, pa * pd, pb) @ w).reshape(nb, pa, pd, keep)
        self._rescale(0)

    def close(self, tensors: list[np.ndarray]) -> np.ndarray:
        """Contract with the last row; returns the total log value per batch entry."""
        log_val = self.log_scale.copy()
        nb = log_val.shape[0]
        vec = np.ones((nb, 1, 1))  # (batch, mps bond, left leg of the row)
        for m, t in zip(self.sites, tensors):
            vec = np.einsum("nal,naub,nulr->nbr", vec, m, t[..., 0])
            nrm = np.abs(vec).reshape(nb, -1).max(axis=1)
            dead = ~(nrm > 0)
            nrm = np.where(dead, 1.0, nrm)
            vec = vec / nrm[:, None, None]
            log_val = np.where(dead, -np.inf, log_val + np.log(nrm))
        val = vec.reshape(nb, -1).sum(axis=1)
        ok = val > 0
        return np.where(ok, log_val + np.log(np.where(ok, val, 1.0)), -np.inf)


def _letters(ops) -> np.ndarray:
    return np.asarray(ops.x_bits, dtype=np.int64) | (np.asarray(ops.z_bits, dtype=np.int64) << 1)


def tn_coset_logs_batch(code: DeformedCode, fields, syndromes, chi: int = DEFAULT_CHI) -> np.ndarray:
    """Log coset weights ``(B, 4)`` in class order ``(I, X, Z, Y)`` for a batch.

    ``fields`` is one :class:`NoiseField` shared by all syndromes or a sequence
    with one field per syndrome (each on ``code``'s qubits).  Bond dimensions
    depend only on the lattice, so the batch is contracted in lockstep.
    """
    if chi < 1:
        raise ValueError("chi must be positive")
    syndromes = [_check_syndrome(code, s) for s in syndromes]
    nb = len(syndromes)
    if nb == 0:
        return np.zeros((0, 4))
    if isinstance(fields, NoiseField):
        fields = [fields] * nb
    if len(fields) != nb:
        raise ValueError(f"got {len(fields)} fields for {nb} syndromes")
    L = code.L
    tables = np.stack([f.bit_table for f in fields])
    ops = [class_operators(code, s) for s in syndromes]
    logs = np.full((nb, 4), -np.inf)
    # I/X and Z/Y differ only in the bottom row, so they share the sweep
    for base_cls in (0, 2):
        letters = np.stack([_letters(o[base_cls]) for o in ops])
        bnd = _Boundary.from_top_row(_row_tensors(L, 0, tables, letters))
        bnd.compress(chi)
        for r in range(1, L - 1):
            bnd.absorb(_row_tensors(L, r, tables, letters))
            bnd.compress(chi)
        for cls in (base_cls, base_cls + 1):
            last = np.stack([_letters(o[cls]) for o in ops])
            logs[:, cls] = bnd.close(_row_tensors(L, L - 1, tables, last))
    return logs


def tn_coset_logs(code: DeformedCode, field: NoiseField, s, chi: int = DEFAULT_CHI) -> np.ndarray:
    """Log coset weights ``(I, X, Z, Y)`` from a boundary-MPS contraction."""
    return tn_coset_logs_batch(code, field, [s], chi)[0]


def tn_decode_batch(
    code: DeformedCode,
    fields,
    syndromes,
    chi: int = DEFAULT_CHI,
    check_convergence: bool = True,
) -> list[DecodeOutcome]:
    """Decode many syndromes at once; same results as repeated :func:`tn_ml_decode`."""
    syndromes = [_check_syndrome(code, s) for s in syndromes]
    logs = tn_coset_logs_batch(code, fields, syndromes, chi)
    coarse = None
    if check_convergence and chi > CONVERGENCE_STEP:
        coarse = tn_coset_logs_batch(code, fields, syndromes, chi - CONVERGENCE_STEP)
    out = []
    for i, s in enumerate(syndromes):
        if not np.isfinite(logs[i]).any():
            out.append(finish(code, s, logs[i], converged=False))
            continue
        conv = None if coarse is None else bool(choose_classes(coarse[i]) == choose_classes(logs[i]))
        out.append(finish(code, s, logs[i], conv))
    return out


def tn_ml_decode(
    code: DeformedCode,
    field: NoiseField,
    s,
    chi: int = DEFAULT_CHI,
    check_convergence: bool = True,
) -> DecodeOutcome:
    """Tensor-network ML decoder.

    With ``check_convergence`` the contraction is repeated at ``chi - 8`` and
    ``converged`` reports whether both runs pick the same class.  A network
    that evaluates to zero for every class is reported as not converged.
    """
    return tn_decode_batch(code, field, [s], chi, check_convergence)[0]
