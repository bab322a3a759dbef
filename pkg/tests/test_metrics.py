from __future__ import annotations

import math

import numpy as np
import pytest

from cdsc.code import FamilyParams, LogicalClass, code_distance, logical_class, make_code, sample_pattern, syndrome
from cdsc.decode import exact_ml_decode
from cdsc.metrics import (
    delta_dprime,
    dprime_only,
    effective_distance,
    most_likely_logical,
    most_likely_noncorrectable,
    normalizer_N,
)
from cdsc.noise import BiasedNoiseParams, field_for, log_prob, rates_from
from cdsc.pauli import DeformationPattern, weight_decomposition
from oracles import coset_table, max_logical_log_prob, pauli_probs, syndrome_class_arrays


def test_normalizer_examples():
    p = 0.01
    assert normalizer_N(p, 0.5) == pytest.approx(math.log((p / 3) / 0.99), rel=1e-14)
    assert normalizer_N(p, 500) < 0
    ch = rates_from(BiasedNoiseParams(0.07, 12))
    assert normalizer_N(0.07, 12) == pytest.approx(math.log(ch.p_z) - math.log(ch.p_i), rel=1e-13)
    with pytest.raises(ValueError):
        normalizer_N(0.1, "inf")
    with pytest.raises(ValueError):
        normalizer_N(0.0, 3)


@pytest.mark.parametrize("spec", ["CSS", "XZZX", "random"])
def test_p_log_depolarizing_l3(spec):
    pat = sample_pattern(FamilyParams(0.3, 0.3), 9, np.random.default_rng(1)) if spec == "random" else spec
    code = make_code(3, pat)
    p = 0.05
    params = BiasedNoiseParams(p, 0.5)
    op, lp = most_likely_logical(code, params)
    assert lp == pytest.approx(3 * math.log(p / 3) + 6 * math.log(1 - p), rel=1e-12)
    assert op.weight == 3
    assert logical_class(code, op) not in (None, LogicalClass.I)
    assert log_prob(field_for(params, code.pattern), op) == pytest.approx(lp, rel=1e-12)


@pytest.mark.parametrize("spec,eta", [("XZZX", 10), ("XY", 100), ("random", 30), ("random", 1000)])
def test_p_log_matches_group_enumeration(spec, eta):
    pat = sample_pattern(FamilyParams(0.25, 0.5), 9, np.random.default_rng(eta)) if spec == "random" else spec
    code = make_code(3, pat)
    params = BiasedNoiseParams(0.02, eta)
    _, lp = most_likely_logical(code, params)
    assert lp == pytest.approx(max_logical_log_prob(code, rates_from(params).as_array()), rel=1e-12)


def test_xy_closed_form():
    p, eta = 0.01, 500
    code = make_code(3, "XY")
    rep = effective_distance(code, BiasedNoiseParams(p, eta))
    n_log = normalizer_N(p, eta)
    assert abs(rep.d_prime - (3 - math.log(2 * eta) / n_log)) < 1e-9
    assert rep.d_prime == pytest.approx(4.50, abs=0.01)
    nx, ny, nz = weight_decomposition(rep.witnesses["logical"])
    assert nz == 2 and nx + ny == 1


def test_infinite_bias_css_logical():
    p = 0.2
    code = make_code(3)
    op, lp = most_likely_logical(code, BiasedNoiseParams(p, "inf"))
    assert lp == pytest.approx(3 * math.log(p) + 6 * math.log(1 - p), rel=1e-12)
    assert weight_decomposition(op) == (0, 0, 3)
    with pytest.raises(ValueError):
        effective_distance(code, BiasedNoiseParams(p, "inf"))


def test_report_exponentiates_back():
    code = make_code(5, sample_pattern(FamilyParams(0.25, 0.5), 25, np.random.default_rng(2)))
    p, eta = 0.02, 100
    rep = effective_distance(code, BiasedNoiseParams(p, eta))
    assert rep.t_prime is None
    assert rep.p_log == pytest.approx((1 - p) ** 25 * math.exp(rep.normalizer * rep.d_prime), rel=1e-10)
    assert dprime_only(code, BiasedNoiseParams(p, eta)) == pytest.approx(rep.d_prime, rel=1e-12)
    assert logical_class(code, rep.witnesses["logical"]) not in (None, LogicalClass.I)


def test_dprime_rotation_invariance():
    # a half turn maps the rotated layout onto itself
    rng = np.random.default_rng(3)
    params = BiasedNoiseParams(0.02, 100)
    for L in (3, 5):
        for _ in range(3):
            pat = sample_pattern(FamilyParams(0.25, 0.5), L * L, rng)
            turned = DeformationPattern(tuple(reversed(pat.kinds)))
            a = dprime_only(make_code(L, pat), params)
            b = dprime_only(make_code(L, turned), params)
            assert a == pytest.approx(b, rel=1e-12)


def _brute_p_cor(code, channel):
    x, z, sidx, cls = syndrome_class_arrays(code)
    probs = pauli_probs(x, z, channel)
    table = coset_table(code, channel)
    top = table.max(axis=1, keepdims=True)
    chosen = np.argmax(table >= top * (1 - 1e-9), axis=1)
    fail = cls != chosen[sidx]
    return float(np.log(probs[fail].max()))


@pytest.mark.parametrize("eta", [0.5, 10, 1000])
def test_p_cor_matches_brute_force(eta):
    rng = np.random.default_rng(int(eta * 2))
    params = BiasedNoiseParams(0.01, eta)
    for spec in ("CSS", "XY", sample_pattern(FamilyParams(0.25, 0.5), 9, rng)):
        code = make_code(3, spec)
        op, lc = most_likely_noncorrectable(code, params)
        assert lc == pytest.approx(_brute_p_cor(code, rates_from(params).as_array()), rel=1e-12)
        out = exact_ml_decode(code, field_for(params, code.pattern), syndrome(code, op))
        assert logical_class(code, out.correction * op) != LogicalClass.I


def test_p_cor_with_decoder_argument():
    code = make_code(3, "XZZX")
    params = BiasedNoiseParams(0.03, 10)
    a = most_likely_noncorrectable(code, params)
    b = most_likely_noncorrectable(code, params, decoder=exact_ml_decode)
    assert a[1] == pytest.approx(b[1], rel=1e-12) and a[0] == b[0]
    with pytest.raises(ValueError):
        most_likely_noncorrectable(make_code(5), params)


def test_depolarizing_distances_l3():
    rng = np.random.default_rng(4)
    p = 0.01
    for _ in range(10):
        pat = DeformationPattern.from_array(rng.integers(0, 3, 9))
        code = make_code(3, pat)
        rep = effective_distance(code, BiasedNoiseParams(p, 0.5))
        assert rep.d_prime == pytest.approx(code_distance(code), abs=1e-9)
        # every single-qubit error is corrected, so the cheapest failure has weight two
        assert rep.t_prime == pytest.approx(2.0, abs=1e-9)
        assert rep.t_prime >= rep.d_prime / 2


def test_t_prime_at_least_half_d_prime():
    rng = np.random.default_rng(5)
    for eta in (10, 100, 1e4):
        for _ in range(4):
            code = make_code(3, sample_pattern(FamilyParams(0.25, 0.5), 9, rng))
            rep = effective_distance(code, BiasedNoiseParams(0.01, eta))
            assert rep.t_prime >= rep.d_prime / 2 - 1e-9


def test_delta_dprime_css_and_determinism():
    mean, se = delta_dprime(FamilyParams(0, 0), 0.01, 0.5, samples=3, seed=0)
    assert mean == pytest.approx(2.0, abs=1e-9) and se == pytest.approx(0.0, abs=1e-9)
    a = delta_dprime(FamilyParams(0.25, 0.5), 0.02, 100, samples=4, seed=9)
    b = delta_dprime(FamilyParams(0.25, 0.5), 0.02, 100, samples=4, seed=9)
    assert a == b
    with pytest.raises(ValueError):
        delta_dprime(FamilyParams(0, 0), 0.01, 0.5, samples=0, seed=0)


def test_xy_delta_dprime_grows_at_large_bias():
    # flat at 2 while a boundary string is cheapest at L=3, rising once that size saturates
    assert delta_dprime(FamilyParams(0, 1), 0.02, 1e8, samples=1, seed=0)[0] == pytest.approx(2.0, abs=1e-9)
    vals = [delta_dprime(FamilyParams(0, 1), 0.02, eta, samples=1, seed=0)[0] for eta in (1e10, 1e12, 1e14, 1e16)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    fam, se = delta_dprime(FamilyParams(0.25, 0.5), 0.02, 1e20, samples=20, seed=1)
    xy = delta_dprime(FamilyParams(0, 1), 0.02, 1e20, samples=1, seed=0)[0]
    assert xy > fam + 2 * se


def test_search_limits():
    with pytest.raises(ValueError):
        most_likely_logical(make_code(7), BiasedNoiseParams(0.01, 3))
