"""Percolation of infinite-bias constraints for random deformation families.

At ``eta = inf`` an identity qubit forces its two ``s^X`` spins to agree, an
H qubit its two ``s^Z`` spins, and an H_YZ qubit the product of all four.
Treating each constraint as a bond (the four-spin ones as a hyperedge joining
both pairs) gives a correlated percolation problem on the two face lattices.

Face ``(r, c)`` with ``-1 <= r, c <= L-1`` gets node ``(r+1)*(L+1) + (c+1)``
whether or not it exists; missing faces on the top/bottom rows (X lattice)
and left/right columns (Z lattice) are folded into four virtual nodes.  The
construction is fully vectorised so large lattices never build the dense
stabilizer matrix.

A sublattice spans when its constraints connect its two virtual boundaries:
top to bottom for ``s^X`` and left to right for ``s^Z``.  On an H_YZ-free
pattern a spanning path of length ``l`` is exactly a pure-Z logical of
weight ``l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from ..code import FamilyParams, sample_pattern_array
from ..pauli import Deformation


@dataclass(frozen=True)
class _Grid:
    L: int
    xa: np.ndarray  # per-qubit s^X endpoints (node ids, virtual ones >= num_faces)
    xb: np.ndarray
    za: np.ndarray
    zb: np.ndarray

    @property
    def num_faces(self) -> int:
        return (self.L + 1) ** 2

    @property
    def top(self) -> int:
        return self.num_faces

    @property
    def bottom(self) -> int:
        return self.num_faces + 1

    @property
    def left(self) -> int:
        return self.num_faces + 2

    @property
    def right(self) -> int:
        return self.num_faces + 3


def _face_grid(L: int) -> _Grid:
    r, c = np.divmod(np.arange(L * L), L)
    even = (r + c) % 2 == 0
    # X-type corners: (r-1, c-1) & (r, c) when r+c is even, else (r-1, c) & (r, c-1)
    xr1, xc1 = r - 1, np.where(even, c - 1, c)
    xr2, xc2 = r, np.where(even, c, c - 1)
    zr1, zc1 = r - 1, np.where(even, c, c - 1)
    zr2, zc2 = r, np.where(even, c - 1, c)
    W = L + 1
    nf = W * W

    def node(fr, fc, kind):
        node_id = (fr + 1) * W + (fc + 1)
        if kind == "X":
            missing = (fr == -1) | (fr == L - 1)
            virt = np.where(fr == -1, nf, nf + 1)
        else:
            missing = (fc == -1) | (fc == L - 1)
            virt = np.where(fc == -1, nf + 2, nf + 3)
        return np.where(missing, virt, node_id)

    return _Grid(L, node(xr1, xc1, "X"), node(xr2, xc2, "X"), node(zr1, zc1, "Z"), node(zr2, zc2, "Z"))


@dataclass(frozen=True)
class ClusterStats:
    """Cluster statistics of one pattern realisation.

    ``sizes_x`` / ``sizes_z`` list, for every constraint cluster, how many
    spins of each sublattice it contains (zeros dropped).  Mixed clusters
    formed through four-spin constraints appear in both lists.
    """

    L: int
    sizes_x: np.ndarray
    sizes_z: np.ndarray
    largest: int
    spanning_x: bool
    spanning_z: bool
    path_x: float
    path_z: float

    @property
    def spanning(self) -> bool:
        return self.spanning_x or self.spanning_z

    @property
    def min_path(self) -> float:
        """Length of the shortest boundary-to-boundary constraint path (``inf`` if none)."""
        return min(self.path_x, self.path_z)

    def histogram(self, sublattice: str = "both") -> dict[int, int]:
        sizes = {"X": self.sizes_x, "Z": self.sizes_z, "both": np.r_[self.sizes_x, self.sizes_z]}[sublattice]
        vals, counts = np.unique(sizes, return_counts=True)
        return dict(zip(vals.tolist(), counts.tolist()))


def _path_length(n_nodes: int, a: np.ndarray, b: np.ndarray, src: int, dst: int) -> float:
    if len(a) == 0:
        return math.inf
    g = coo_matrix((np.ones(len(a)), (a, b)), shape=(n_nodes, n_nodes)).tocsr()
    d = shortest_path(g, method="D", directed=False, unweighted=True, indices=src)
    return float(d[dst])


def cluster_stats(kinds: np.ndarray, L: int) -> ClusterStats:
    """Cluster statistics for an explicit pattern given as deformation codes."""
    kinds = np.asarray(kinds).ravel()
    if kinds.size != L * L:
        raise ValueError(f"pattern has {kinds.size} qubits, expected {L * L}")
    g = _face_grid(L)
    nf = g.num_faces
    n_nodes = nf + 4
    use_x = kinds != Deformation.SWAP_XZ  # J_Z or J_Y: s^X pair constrained
    use_z = kinds != Deformation.ID  # J_X or J_Y: s^Z pair constrained
    mixed = kinds == Deformation.SWAP_YZ

    # clusters: real spins only, virtual endpoints merely mark constraints
    ea = [g.xa[use_x], g.za[use_z], g.xa[mixed]]
    eb = [g.xb[use_x], g.zb[use_z], g.za[mixed]]
    a, b = np.concatenate(ea), np.concatenate(eb)
    constrained = np.zeros(n_nodes, dtype=bool)
    constrained[a] = constrained[b] = True
    real = (a < nf) & (b < nf)
    graph = coo_matrix((np.ones(real.sum()), (a[real], b[real])), shape=(nf, nf))
    _, labels = connected_components(graph, directed=False)
    idx = np.arange(nf)
    fr, fc = np.divmod(idx, L + 1)
    is_x = (fr + fc) % 2 == 0  # (r+1)+(c+1) has the parity of r+c
    keep = constrained[:nf]
    nlab = labels.max() + 1
    cx = np.bincount(labels[keep & is_x], minlength=nlab)
    cz = np.bincount(labels[keep & ~is_x], minlength=nlab)
    total = cx + cz
    largest = int(total.max()) if total.size else 0

    px = _path_length(n_nodes, g.xa[use_x], g.xb[use_x], g.top, g.bottom)
    pz = _path_length(n_nodes, g.za[use_z], g.zb[use_z], g.left, g.right)
    return ClusterStats(L, cx[cx > 0], cz[cz > 0], largest, math.isfinite(px), math.isfinite(pz), px, pz)


def percolation_stats(params: FamilyParams, L: int, rng: np.random.Generator) -> ClusterStats:
    """Draw one pattern from the IID family and analyse its constraint clusters."""
    return cluster_stats(sample_pattern_array(params, L * L, rng), L)


# ---------------------------------------------------------------------------
# fits


def fit_fisher_tau(sizes, L: int, realizations: int, s_min: float = 8.0, s_max: float | None = None) -> float:
    """Slope of the log-binned cluster-number density ``n_s ~ s**-tau``.

    The default upper cutoff ``L**(91/48) / 16`` keeps the fit clear of the
    finite-size cutoff of critical clusters.  On an open lattice clusters cut
    by the boundary flatten the tail, so this estimate runs a few hundredths
    low; :func:`percolation_scan` reports it only as a cross-check.
    """
    sizes = np.asarray(sizes, dtype=float)
    if s_max is None:
        s_max = L ** (91.0 / 48.0) / 16.0
    if s_max <= 2 * s_min:
        raise ValueError("fit window is empty; use a larger lattice")
    edges = 2.0 ** np.arange(0, math.ceil(math.log2(sizes.max() + 1)) + 2)
    counts, _ = np.histogram(sizes, bins=edges)
    widths = np.diff(edges)
    centers = np.sqrt(edges[:-1] * edges[1:])
    density = counts / (widths * realizations * L * L)
    sel = (edges[:-1] >= s_min) & (edges[1:] <= s_max) & (counts > 0)
    if sel.sum() < 3:
        raise ValueError("too few populated bins to fit tau")
    slope, _ = np.polyfit(np.log(centers[sel]), np.log(density[sel]), 1, w=np.sqrt(counts[sel]))
    return float(-slope)


def fit_power_law(xs, ys) -> tuple[float, float]:
    """Least-squares ``y = A x**k`` on log scales; returns ``(k, A)``."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    ok = np.isfinite(ys) & (ys > 0)
    if ok.sum() < 2:
        raise ValueError("need at least two positive points")
    k, c = np.polyfit(np.log(xs[ok]), np.log(ys[ok]), 1)
    return float(k), float(math.exp(c))


@dataclass(frozen=True)
class PercolationSummary:
    params: FamilyParams
    Ls: tuple[int, ...]
    realizations: int
    spanning_prob: tuple[float, ...]
    mean_largest: tuple[float, ...]
    mean_path: tuple[float, ...]
    largest_exponent: float
    tau_fit: float
    tau_hist: float
    path_exponent: float


def percolation_scan(params: FamilyParams, Ls, realizations: int, seed: int) -> PercolationSummary:
    """Spanning probability, largest cluster and path scaling over lattice sizes.

    Realisation ``i`` at size index ``k`` uses
    ``SeedSequence(seed, spawn_key=(k, i))``.

    ``tau_fit`` comes from the growth of the largest cluster, ``L**a`` with
    ``a = 2 / (tau - 1)``, which is insensitive to boundary truncation.
    ``tau_hist`` is the direct histogram slope on the largest lattice.
    """
    Ls = tuple(int(L) for L in Ls)
    span, largest, paths = [], [], []
    pooled = []
    for k, L in enumerate(Ls):
        hits, big, lens = 0, [], []
        for i in range(realizations):
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k, i))))
            st = percolation_stats(params, L, rng)
            hits += st.spanning
            big.append(st.largest)
            if st.spanning:
                lens.append(st.min_path)
            if L == max(Ls):
                pooled.append(np.r_[st.sizes_x, st.sizes_z])
        span.append(hits / realizations)
        largest.append(float(np.mean(big)))
        paths.append(float(np.mean(lens)) if lens else math.nan)
    try:
        tau_hist = fit_fisher_tau(np.concatenate(pooled), max(Ls), realizations)
    except ValueError:
        tau_hist = math.nan
    a = x = math.nan
    if len(Ls) >= 2:
        a, _ = fit_power_law(Ls, largest)
        try:
            x, _ = fit_power_law(Ls, paths)
        except ValueError:
            pass
    tau = 1.0 + 2.0 / a if a > 0 else math.nan
    return PercolationSummary(
        params, Ls, realizations, tuple(span), tuple(largest), tuple(paths), a, tau, tau_hist, x
    )
