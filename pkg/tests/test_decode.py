from __future__ import annotations

import numpy as np
import pytest

from cdsc.code import FamilyParams, LogicalClass, logical_class, make_code, sample_pattern, syndrome
from cdsc.decode import (
    CosetProbabilities,
    exact_coset_logs,
    exact_failure_probability,
    exact_ml_decode,
    pure_error,
    syndrome_class_table,
    tn_coset_logs,
    tn_ml_decode,
    transfer_coset_logs,
    transfer_ml_decode,
)
from cdsc.decode.core import choose_classes, decode_failure
from cdsc.decode.tn import tn_coset_logs_batch, tn_decode_batch
from cdsc.noise import BiasedNoiseParams, field_for, rates_from, sample_error
from cdsc.pauli import DeformationPattern
from oracles import all_syndromes as _all_syndromes, coset_table


def _random_pattern(L, seed):
    return sample_pattern(FamilyParams(0.25, 0.5), L * L, np.random.default_rng(seed))


def test_choose_classes_ties():
    assert choose_classes([0.0, 0.0, 0.0, 0.0]) == LogicalClass.I
    assert choose_classes([-1.0, 0.0, 0.0, 0.0]) == LogicalClass.X
    assert choose_classes([-1.0, -1.0, 0.0, 0.0]) == LogicalClass.Z
    assert choose_classes([-1.0, -1.0, -1.0, 0.0]) == LogicalClass.Y
    assert choose_classes([-5.0, -5.0 + 1e-12, -9.0, -9.0]) == LogicalClass.I
    assert choose_classes([-np.inf] * 4) == LogicalClass.I
    batch = choose_classes(np.array([[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 2.0]]))
    assert batch.tolist() == [1, 3]


def test_coset_probabilities_normalised():
    cp = CosetProbabilities.from_logs([-700.0, -701.0, -750.0, -np.inf])
    assert abs(cp.probs.sum() - 1) < 1e-10 and (cp.probs >= 0).all()
    assert cp.best() == LogicalClass.I
    assert cp.y == 0.0


def test_pure_error_properties():
    code = make_code(3, _random_pattern(3, 1))
    m = code.layout.num_generators
    assert pure_error(code, np.zeros(m)).is_identity()
    for s in _all_syndromes(code):
        e = pure_error(code, s)
        assert np.array_equal(syndrome(code, e), s)
        assert pure_error(code, s) == e
    with pytest.raises(ValueError):
        pure_error(code, np.zeros(m + 1))


def test_syndrome_of_error_gives_equivalent_pure_error():
    code = make_code(5, _random_pattern(5, 2))
    field = field_for(BiasedNoiseParams(0.2, 3), code.pattern)
    rng = np.random.default_rng(0)
    for _ in range(20):
        e = code.from_standard(sample_error(field, rng))
        assert logical_class(code, e * pure_error(code, syndrome(code, e))) is not None


def test_exact_small_p_prefers_identity():
    code = make_code(3, "XZZX")
    field = field_for(BiasedNoiseParams(1e-6, 10), code.pattern)
    out = exact_ml_decode(code, field, np.zeros(8, dtype=np.uint8))
    assert out.chosen_class == LogicalClass.I
    assert out.coset_probs.i > 0.999


@pytest.mark.parametrize("pattern", ["CSS", "XZZX", "pattern:random"])
def test_exact_decoder_is_optimal_l3(pattern):
    pat = _random_pattern(3, 4) if pattern == "pattern:random" else pattern
    code = make_code(3, pat)
    params = BiasedNoiseParams(0.1, 0.5)
    field = field_for(params, code.pattern)
    oracle = coset_table(code, rates_from(params).as_array())
    optimum = 1.0 - oracle.max(axis=1).sum()
    chosen = [exact_ml_decode(code, field, s).chosen_class for s in _all_syndromes(code)]
    achieved = 1.0 - sum(oracle[k, int(c)] for k, c in enumerate(chosen))
    assert achieved == pytest.approx(optimum, abs=1e-12)
    assert exact_failure_probability(code.layout, field) == pytest.approx(optimum, abs=1e-12)
    assert abs(oracle.sum() - 1) < 1e-12


def test_depolarizing_covariance_l3():
    params = BiasedNoiseParams(0.12, 0.5)
    ref = exact_failure_probability(make_code(3).layout, field_for(params, make_code(3).pattern))
    rng = np.random.default_rng(3)
    for _ in range(5):
        pat = DeformationPattern.from_array(rng.integers(0, 3, 9))
        code = make_code(3, pat)
        assert exact_failure_probability(code.layout, field_for(params, pat)) == pytest.approx(ref, rel=1e-12)


def test_syndrome_class_table_sums_to_one():
    code = make_code(3, _random_pattern(3, 5))
    t = syndrome_class_table(code.layout, field_for(BiasedNoiseParams(0.2, 30), code.pattern))
    assert t.shape == (256, 4) and abs(t.sum() - 1) < 1e-12


@pytest.mark.parametrize("spec", ["CSS", "XY", "random"])
def test_tn_matches_exact_all_syndromes_l3(spec):
    code = make_code(3, _random_pattern(3, 6) if spec == "random" else spec)
    field = field_for(BiasedNoiseParams(0.15, 10), code.pattern)
    syns = _all_syndromes(code)
    tn = tn_coset_logs_batch(code, field, syns, chi=64)
    worst = 0.0
    for k, s in enumerate(syns):
        ex = CosetProbabilities.from_logs(exact_coset_logs(code, field, s)).probs
        worst = max(worst, np.abs(CosetProbabilities.from_logs(tn[k]).probs - ex).max())
        tr = CosetProbabilities.from_logs(transfer_coset_logs(code, field, s)).probs
        assert np.abs(tr - ex).max() < 1e-10
    assert worst <= 1e-8


def test_tn_trivial_noise():
    code = make_code(5, _random_pattern(5, 7))
    field = field_for(BiasedNoiseParams(0.0, 10), code.pattern)
    out = tn_ml_decode(code, field, np.zeros(24, dtype=np.uint8), chi=8)
    assert out.coset_probs.i == 1.0
    assert out.chosen_class == LogicalClass.I
    with pytest.raises(ValueError):
        tn_ml_decode(code, field, np.zeros(24, dtype=np.uint8), chi=0)


def test_tn_batch_equals_single():
    code = make_code(5)
    rng = np.random.default_rng(8)
    pats = [_random_pattern(5, 10 + k) for k in range(4)]
    fields = [field_for(BiasedNoiseParams(0.2, 100), p) for p in pats]
    errors = [sample_error(f, rng) for f in fields]
    syns = [code.layout.css_syndrome_bits(e.x_bits, e.z_bits) for e in errors]
    batch = tn_coset_logs_batch(code, fields, syns, chi=6)
    for k in range(4):
        single = tn_coset_logs(make_code(5, pats[k]), fields[k], syns[k], chi=6)
        np.testing.assert_allclose(batch[k], single, rtol=1e-12)
    outs = tn_decode_batch(code, fields, syns, chi=12)
    for k in range(4):
        one = tn_ml_decode(code, fields[k], syns[k], chi=12)
        assert outs[k].chosen_class == one.chosen_class and outs[k].converged == one.converged


def test_tn_chi_convergence_monotone_l5():
    code = make_code(5, _random_pattern(5, 11))
    field = field_for(BiasedNoiseParams(0.2, 100), code.pattern)
    rng = np.random.default_rng(12)
    syns = []
    for _ in range(60):
        e = code.from_standard(sample_error(field, rng))
        syns.append(syndrome(code, e))
    exact = np.array([CosetProbabilities.from_logs(transfer_coset_logs(code, field, s)).probs for s in syns])
    errs = []
    for chi in (1, 2, 4, 8, 32):
        logs = tn_coset_logs_batch(code, field, syns, chi=chi)
        approx = np.array([CosetProbabilities.from_logs(v).probs for v in logs])
        errs.append(np.abs(approx - exact).max(axis=1).mean())
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-10


def test_tn_chi_56_vs_48_l9():
    code = make_code(9)
    params = BiasedNoiseParams(0.2, 100)
    rng = np.random.default_rng(13)
    fields, syns = [], []
    for _ in range(200):
        pat = sample_pattern(FamilyParams(0.25, 0.5), 81, rng)
        f = field_for(params, pat)
        e = sample_error(f, rng)
        fields.append(f)
        syns.append(code.layout.css_syndrome_bits(e.x_bits, e.z_bits))
    a = choose_classes(tn_coset_logs_batch(code, fields, syns, chi=56))
    b = choose_classes(tn_coset_logs_batch(code, fields, syns, chi=48))
    assert np.mean(a == b) >= 0.99


def test_decode_failure_examples():
    code = make_code(3, "XZZX")
    field = field_for(BiasedNoiseParams(1e-4, 3), code.pattern)
    _, stab = code.stabilizers[0]
    assert not decode_failure(code, field, stab, exact_ml_decode)
    assert decode_failure(code, field, code.logical_z, exact_ml_decode)
    assert decode_failure(code, field, code.logical_x, transfer_ml_decode)
    rng = np.random.default_rng(14)
    tiny = field_for(BiasedNoiseParams(1e-5, 3), code.pattern)
    fails = sum(decode_failure(code, tiny, code.from_standard(sample_error(tiny, rng)), tn_ml_decode) for _ in range(200))
    assert fails == 0


def test_outcome_correction_reproduces_syndrome():
    code = make_code(3, _random_pattern(3, 15))
    field = field_for(BiasedNoiseParams(0.2, 10), code.pattern)
    for s in _all_syndromes(code)[::17]:
        for dec in (exact_ml_decode, transfer_ml_decode, tn_ml_decode):
            out = dec(code, field, s)
            assert np.array_equal(syndrome(code, out.correction), s)
