from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from cdsc.noise import (
    BiasedNoiseParams,
    NoiseField,
    QubitChannel,
    field_for,
    hashing_bound,
    log_prob,
    log_prob_bits,
    parse_eta,
    permute_field,
    rates_from,
    sample_error,
    sample_error_bits,
)
from cdsc.pauli import Deformation, DeformationPattern, PauliOp, permute_pauli


def test_rates_from_examples():
    ch = rates_from(BiasedNoiseParams(0.01, 0.5))
    assert np.allclose(ch.as_array(), [0.99, 1 / 300, 1 / 300, 1 / 300], rtol=0, atol=1e-15)
    ch = rates_from(BiasedNoiseParams(0.01, 500))
    assert ch.p_z == pytest.approx(0.01 * 500 / 501, rel=1e-14)
    assert ch.p_x == pytest.approx(0.01 / 1002, rel=1e-14) and ch.p_y == ch.p_x
    assert rates_from(BiasedNoiseParams(0.3, "inf")).as_array().tolist() == [0.7, 0.0, 0.0, 0.3]


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.99), st.one_of(st.floats(0.5, 1e9), st.just(math.inf)))
def test_rates_invariants(p, eta):
    ch = rates_from(BiasedNoiseParams(p, eta))
    a = ch.as_array()
    assert abs(a.sum() - 1) < 1e-12
    assert a[1] + a[2] + a[3] == pytest.approx(p, abs=1e-15)
    if not math.isinf(eta):
        assert a[3] == pytest.approx(2 * eta * a[1], rel=1e-9, abs=1e-300)


def test_invalid_params():
    with pytest.raises(ValueError):
        BiasedNoiseParams(0.1, 0.4)
    with pytest.raises(ValueError):
        BiasedNoiseParams(1.0, 1)
    with pytest.raises(ValueError):
        QubitChannel(0.5, 0.5, 0.5, 0.0)
    assert math.isinf(parse_eta(" INF "))


def test_permute_field_examples():
    base = rates_from(BiasedNoiseParams(0.1, 10))
    a = base.as_array()
    uni = permute_field(base, DeformationPattern.from_string("III"))
    assert np.array_equal(uni.probs, NoiseField.uniform(base, 3).probs)
    f = permute_field(base, DeformationPattern.from_string("HYI"))
    assert f.probs[0].tolist() == [a[0], a[3], a[2], a[1]]  # (pZ, pY, pX)
    assert f.probs[1].tolist() == [a[0], a[1], a[3], a[2]]  # (pX, pZ, pY)
    assert f.probs[2].tolist() == a.tolist()


def test_sampling_limits():
    rng = np.random.default_rng(0)
    zero = field_for(BiasedNoiseParams(0.0, 3), DeformationPattern.from_string("IHY" * 3))
    for _ in range(50):
        assert sample_error(zero, rng).is_identity()
    pure_z = field_for(BiasedNoiseParams(0.4, "inf"), DeformationPattern.from_string("I" * 25))
    for _ in range(50):
        e = sample_error(pure_z, rng)
        assert not e.x_bits.any()


def test_sampling_frequencies():
    n = 100_000
    ch = rates_from(BiasedNoiseParams(0.1, 0.5))
    field = NoiseField.uniform(ch, n)
    x, z = sample_error_bits(field, np.random.default_rng(42))
    counts = {
        "X": np.sum((x == 1) & (z == 0)),
        "Y": np.sum((x == 1) & (z == 1)),
        "Z": np.sum((x == 0) & (z == 1)),
    }
    for letter, prob in zip("XYZ", ch.as_array()[1:]):
        sigma = math.sqrt(n * prob * (1 - prob))
        assert abs(counts[letter] - n * prob) < 3 * sigma


def test_sampling_deterministic():
    field = field_for(BiasedNoiseParams(0.2, 10), DeformationPattern.from_string("IHY" * 5))
    a = sample_error(field, np.random.default_rng(9))
    b = sample_error(field, np.random.default_rng(9))
    assert a == b


def test_log_prob_examples():
    p, L = 0.1, 3
    params = BiasedNoiseParams(p, 10)
    ch = rates_from(params)
    n = L * L
    ident = field_for(params, DeformationPattern.from_string("I" * n))
    assert log_prob(ident, PauliOp.identity(n)) == pytest.approx(n * math.log(1 - p), rel=1e-14)
    # two X letters and one Z; an H on one X site and an H_YZ on the other
    e = PauliOp.from_string("XXZIIIIII")
    pat = DeformationPattern.from_string("HYIIIIIII")
    expect = math.log(ch.p_x * ch.p_z**2 * (1 - p) ** (n - 3))
    assert log_prob(field_for(params, pat), e) == pytest.approx(expect, rel=1e-13)
    assert log_prob(ident, e) == pytest.approx(math.log(ch.p_x**2 * ch.p_z * (1 - p) ** (n - 3)), rel=1e-13)
    pure_z = field_for(BiasedNoiseParams(p, "inf"), DeformationPattern.from_string("I"))
    assert log_prob(pure_z, PauliOp.from_string("Y")) == -math.inf
    with pytest.raises(ValueError):
        log_prob(ident, PauliOp.identity(4))


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.sampled_from(list(Deformation)), min_size=6, max_size=6),
    st.integers(0, 63),
    st.integers(0, 63),
    st.floats(0.01, 0.5),
    st.floats(0.5, 1e4),
)
def test_two_pictures_agree(kinds, x, z, p, eta):
    pat = DeformationPattern(tuple(kinds))
    params = BiasedNoiseParams(p, eta)
    e = PauliOp(6, x, z)
    uniform = NoiseField.uniform(rates_from(params), 6)
    assert log_prob(field_for(params, pat), e) == pytest.approx(log_prob(uniform, permute_pauli(pat, e)), rel=1e-12)
    bits = log_prob_bits(field_for(params, pat), e.x_bits[None], e.z_bits[None])
    assert bits[0] == pytest.approx(log_prob(field_for(params, pat), e), rel=1e-12)


def _entropy_gap(p, eta):
    # independent closed form: H(1-p, p/(2(1+eta)) x2, p eta/(1+eta)) - 1
    px = p / (2 * (1 + eta))
    pz = p * eta / (1 + eta)
    terms = [1 - p, px, px, pz]
    return -sum(t * math.log2(t) for t in terms if t > 0) - 1


def test_hashing_bound_examples():
    assert hashing_bound("inf") == 0.5
    assert hashing_bound(0.5) == pytest.approx(0.1893, abs=5e-5)
    for eta in (0.5, 3, 10, 100, 1e4):
        assert hashing_bound(eta) == pytest.approx(brentq(_entropy_gap, 1e-6, 0.5, args=(eta,), xtol=1e-14), abs=1e-9)
    assert hashing_bound(100) > hashing_bound(10) > hashing_bound(0.5)
    with pytest.raises(ValueError):
        hashing_bound(0.1)


def test_hashing_bound_monotone():
    etas = np.geomspace(0.5, 1e8, 40)
    vals = [hashing_bound(e) for e in etas] + [hashing_bound(math.inf)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
