from __future__ import annotations

import math

import numpy as np
import pytest

from cdsc.code import FamilyParams, make_code, min_pure_z_weight, preset, sample_pattern
from cdsc.noise import BiasedNoiseParams, field_for, hashing_bound, rates_from, sample_error
from cdsc.pauli import Deformation, DeformationPattern, PauliOp, commutes
from cdsc.statmech import (
    build_rbim,
    cluster_stats,
    cluster_threshold,
    fit_power_law,
    infinite_bias_constraints,
    nishimori_couplings,
    percolation_scan,
    percolation_stats,
    self_dual_gap,
    xy_code_channel,
)


def _formula(p, eta, beta):
    px = p / (2 * (1 + eta))
    pz = p * eta / (1 + eta)
    rates = {"X": px, "Y": px, "Z": pz}
    prod = px * px * pz
    return tuple(math.log(rates[k] ** 2 * (1 - p) / prod) / (4 * beta) for k in "XYZ")


def test_nishimori_couplings():
    jx, jy, jz = nishimori_couplings(0.1, 0.5)
    assert jx == pytest.approx(jy) and jy == pytest.approx(jz)
    for eta in (2, 40, 1e6):
        got = nishimori_couplings(0.13, eta, beta=0.7)
        assert got == pytest.approx(_formula(0.13, eta, 0.7), rel=1e-12)
        assert got[0] == got[1]
    jx, jy, jz = nishimori_couplings(0.2, "inf")
    assert math.isfinite(jx) and jx == jy and jz == math.inf
    with pytest.raises(ValueError):
        nishimori_couplings(0.0, 3)


def test_rbim_signs():
    code = make_code(3, "XZZX")
    inst = build_rbim(code, PauliOp.identity(9), 0.1, 10)
    assert (inst.signs == 1).all()
    css = make_code(3)
    inst = build_rbim(css, PauliOp.single(9, 4, "Z"), 0.1, 10)
    assert inst.signs[4].tolist() == [-1, -1, 1]
    assert (np.delete(inst.signs, 4, axis=0) == 1).all()


def test_rbim_signs_follow_commutation():
    # undeformed-frame term T is positive exactly when the permuted letter commutes with T
    for d in Deformation:
        for letter in "IXYZ":
            seen = d.apply(letter)
            for t, term in enumerate("XYZ"):
                expect = 1 if commutes(PauliOp.from_string(seen), PauliOp.from_string(term)) else -1
                pat = DeformationPattern((d,) + (Deformation.ID,) * 8)
                inst = build_rbim(make_code(3, pat), PauliOp.from_string(letter + "I" * 8), 0.1, 3)
                assert inst.signs[0, t] == expect


def test_rbim_strengths_permuted():
    j = np.array(nishimori_couplings(0.1, 30))
    inst = build_rbim(make_code(3, "HYIIIIIII"), PauliOp.identity(9), 0.1, 30)
    assert inst.strengths[0].tolist() == j[[2, 1, 0]].tolist()
    assert inst.strengths[1].tolist() == j[[0, 2, 1]].tolist()
    assert inst.strengths[2].tolist() == j.tolist()


def test_rbim_local_energy_and_gauge():
    rng = np.random.default_rng(0)
    code = make_code(5, sample_pattern(FamilyParams(0.3, 0.3), 25, rng))
    field = field_for(BiasedNoiseParams(0.15, 5), code.pattern)
    e = code.from_standard(sample_error(field, rng))
    inst = build_rbim(code, e, 0.15, 5)
    sx = rng.choice([-1, 1], inst.num_x_spins)
    sz = rng.choice([-1, 1], inst.num_z_spins)
    e0 = inst.energy(sx, sz)
    for k in range(inst.num_x_spins):
        flipped = sx.copy()
        flipped[k] *= -1
        terms = inst.strengths * inst.signs * inst._bonds(sx, sz)
        local = terms[inst.incident_qubits("X", k)][:, 1:].sum()  # Y and Z terms touch s^X
        assert inst.energy(flipped, sz) - e0 == pytest.approx(2 * local, abs=1e-9)
    # multiplying the error by a stabilizer is undone by flipping the matching spin
    lay = code.layout
    x_faces = [i for i, f in enumerate(lay.faces) if f.kind == "X"]
    _, gen = code.stabilizers[x_faces[2]]
    inst2 = build_rbim(code, e * gen, 0.15, 5)
    configs = [(rng.choice([-1, 1], inst.num_x_spins), rng.choice([-1, 1], inst.num_z_spins)) for _ in range(8)]
    matches = []
    for k in range(inst.num_x_spins):
        ok = True
        for cx, cz in configs:
            flipped = cx.copy()
            flipped[k] *= -1
            ok &= abs(inst2.energy(flipped, cz) - inst.energy(cx, cz)) < 1e-9
        matches.append(ok)
    assert sum(matches) == 1


def test_infinite_bias_errors_satisfy_constraints():
    rng = np.random.default_rng(1)
    for spec in ("CSS", "XZZX", "XY"):
        code = make_code(5, spec)
        field = field_for(BiasedNoiseParams(0.3, "inf"), code.pattern)
        for _ in range(20):
            inst = build_rbim(code, code.from_standard(sample_error(field, rng)), 0.3, "inf")
            hard = np.isinf(inst.strengths)
            assert hard.sum() == 25
            assert (inst.signs[hard] == 1).all()


def test_constraint_graph_examples():
    L = 5
    css = infinite_bias_constraints(preset("CSS", L), L)
    assert css.counts == {"J_X": 0, "J_Y": 0, "J_Z": 25}
    assert len(css.sublattice_edges("X")) == 25 and len(css.sublattice_edges("Z")) == 0
    xzzx = infinite_bias_constraints(preset("XZZX", L), L)
    grid = np.array(xzzx.kinds).reshape(L, L)
    for r in range(L):
        for c in range(L):
            assert grid[r, c] == ("J_X" if (r + c) % 2 == 0 else "J_Z")
    xy = infinite_bias_constraints(preset("XY", L), L)
    assert xy.counts["J_Y"] == 25 and len(xy.four_spin()) == 25
    with pytest.raises(ValueError):
        infinite_bias_constraints(preset("XY", 3), 5)


def test_percolation_trivial_family():
    rng = np.random.default_rng(2)
    for L in (5, 16, 33):
        st = percolation_stats(FamilyParams(0, 0), L, rng)
        assert st.spanning_x and not st.spanning_z
        assert st.min_path == L
    st = percolation_stats(FamilyParams(1, 0), 9, rng)
    assert st.spanning_z and st.path_z == 9


def test_cluster_sizes_account_for_constrained_spins():
    rng = np.random.default_rng(3)
    for params in (FamilyParams(0.5, 0), FamilyParams(0.3, 0.3)):
        for L in (4, 7, 12):
            kinds = sample_pattern(params, L * L, rng).as_array()
            st = cluster_stats(kinds, L)
            assert st.largest >= 1
            if not (kinds == Deformation.SWAP_YZ).any():
                # without four-spin constraints each cluster sits on one sublattice
                total = st.sizes_x.sum() + st.sizes_z.sum()
                assert st.largest <= total
    with pytest.raises(ValueError):
        cluster_stats(np.zeros(10, dtype=int), 3)


@pytest.mark.parametrize("L", [3, 5, 9, 15, 25])
def test_min_path_equals_pure_z_weight(L):
    rng = np.random.default_rng(L)
    for _ in range(6):
        pat = sample_pattern(FamilyParams(rng.uniform(0.3, 0.7), 0), L * L, rng)
        st = cluster_stats(pat.as_array(), L)
        assert st.min_path == min_pure_z_weight(make_code(L, pat))


def test_percolation_scan_reproducible():
    a = percolation_scan(FamilyParams(0.5, 0), (8, 16), realizations=5, seed=4)
    b = percolation_scan(FamilyParams(0.5, 0), (8, 16), realizations=5, seed=4)
    assert a == b
    assert all(0 <= s <= 1 for s in a.spanning_prob)


def test_fit_power_law_exact():
    xs = np.array([2.0, 4, 8, 16])
    k, a = fit_power_law(xs, 3 * xs**1.7)
    assert k == pytest.approx(1.7) and a == pytest.approx(3.0)
    with pytest.raises(ValueError):
        fit_power_law([1, 2], [1, math.nan])


def test_xy_channel_is_self_dual():
    ch = xy_code_channel(0.2, 10)
    assert ch.p_x == pytest.approx(ch.p_z) and ch.p_y > ch.p_x
    with pytest.raises(ValueError):
        self_dual_gap(rates_from(BiasedNoiseParams(0.2, 10)), 1)


@pytest.mark.parametrize("eta", [0.5, 3, 10, 100])
def test_cluster_zero_is_hashing_bound(eta):
    assert abs(cluster_threshold(eta, 0) - hashing_bound(eta)) < 1e-6


def test_cluster_one_small_nonzero_shift():
    shift = cluster_threshold(0.5, 1) - hashing_bound(0.5)
    assert 1e-6 < abs(shift) < 0.02


def test_cluster_thresholds_monotone_in_eta():
    etas = (0.5, 3, 10, 30, 100)
    for c in (0, 1):
        vals = [cluster_threshold(eta, c, tol=1e-8) for eta in etas]
        assert all(b > a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        cluster_threshold(10, 3)
    with pytest.raises(ValueError):
        cluster_threshold("inf", 1)
