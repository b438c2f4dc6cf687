import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import array_ldpc_reference, group_peel_reference, lpf_trial_division, xor_rows
from xorfountain.errors import NonConvergenceError, ParameterError
from xorfountain.precode import (Thresholds, adjust_parameters, apply_precode, array_ldpc_dims,
                                 build_check1, check_adjusted, largest_prime_factor, precode_bp)


@pytest.mark.parametrize("k,p", [(1038, 173), (2, 2), (100, 5), (97, 97), (1036, 37)])
def test_largest_prime_factor(k, p):
    assert largest_prime_factor(k) == p


@given(st.integers(2, 10**6))
def test_largest_prime_factor_oracle(k):
    assert largest_prime_factor(k) == lpf_trial_division(k)


def test_largest_prime_factor_rejects_small():
    with pytest.raises(ParameterError):
        largest_prime_factor(1)


def test_small_array_code_matches_transcription():
    sets = build_check1(3, 6)
    assert array_ldpc_dims(3, 6) == (3, 2, 1)
    assert np.array_equal(sets.incidence(), array_ldpc_reference(3, 6))


@pytest.mark.parametrize("b,k", [(962, 1036), (460, 506), (20, 30), (10, 15), (35, 49)])
def test_array_code_matches_transcription(b, k):
    sets = build_check1(b, k)
    H = sets.incidence()
    assert np.array_equal(H, array_ldpc_reference(b, k))
    assert sets.num_parities == k - b == H.shape[1]
    assert all(len(g) >= 2 for g in sets.groups)
    assert all(0 <= x < k for g in sets.groups for x in g)


def test_rate_one_precode():
    sets = build_check1(10, 10)
    assert sets.groups == () and sets.incidence().shape == (10, 0)


@pytest.mark.parametrize("b,k", [(5, 6), (4, 6), (0, 6), (7, 6)])
def test_unrealizable(b, k):
    with pytest.raises(ParameterError):
        build_check1(b, k)


def test_parities_of_zero_data_are_zero():
    sets = build_check1(460, 506)
    data = np.zeros((506, 32), np.uint8)
    apply_precode(data, sets)
    assert not data.any()


def test_single_group_parity():
    sets = build_check1(20, 30)
    data = np.zeros((30, 4), np.uint8)
    g = sets.groups[0]
    data[g[0]] = 0xFF
    data[g[1]] = 0x0F
    apply_precode(data, sets)
    assert g[-1] == 20 and (data[20] == 0xF0).all()


@pytest.mark.parametrize("b,k", [(3, 6), (460, 506)])
def test_groups_xor_to_zero(b, k):
    sets = build_check1(b, k)
    data = np.random.default_rng(1).integers(0, 256, (k, 16), dtype=np.uint8)
    apply_precode(data, sets)
    for g in sets.groups:
        assert not xor_rows(data[list(g)]).any()


def test_precode_bp_trivial_cases():
    sets = build_check1(3, 6)
    known = np.ones(6, bool)
    assert precode_bp(known.copy(), sets).all()
    data = np.random.default_rng(2).integers(0, 256, (6, 8), dtype=np.uint8)
    apply_precode(data, sets)
    lost = sets.groups[1][0]
    work = data.copy()
    work[lost] = 0
    known[lost] = False
    precode_bp(known, sets, work)
    assert known.all() and np.array_equal(work, data)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(3, 6), (20, 30), (460, 506)]))
def test_precode_bp_matches_peeling_oracle(seed, bk):
    b, k = bk
    sets = build_check1(b, k)
    rng = np.random.default_rng(seed)
    data = rng.integers(0, 256, (k, 8), dtype=np.uint8)
    apply_precode(data, sets)
    lost = rng.random(k) < rng.uniform(0.02, 0.3)
    known = ~lost
    work = np.where(known[:, None], data, 0).astype(np.uint8)
    precode_bp(known, sets, work)
    ref_unknown = group_peel_reference(sets.groups, np.flatnonzero(~lost).tolist())
    ref_unknown |= set(np.flatnonzero(lost).tolist()) - {x for g in sets.groups for x in g}
    assert set(np.flatnonzero(~known).tolist()) == ref_unknown
    assert np.array_equal(work[known], data[known])


def test_app_example():
    t, fs = 512, 64 << 20
    res = adjust_parameters(0.5, fs, 500, t)
    assert check_adjusted(res, 500, 0.5, fs, t) == []
    assert abs(res.b / res.k - 0.5) <= res.final.rrate_th
    assert res.redundant_zeros <= res.b * t
    assert res.b == (res.k_prime - res.j_prime) * res.p and res.j_prime >= 2
    build_check1(res.b, res.k)


def test_app_exact_multiple_pads_a_full_stripe():
    th = Thresholds(diff_th=0)
    res = adjust_parameters(962 / 1036, 962 * 512 * 7, 962, 512, th)
    assert res.b == 962
    assert res.blocks == 8 and res.redundant_zeros == 962 * 512


def test_app_deterministic():
    a = adjust_parameters(0.9, 12345678, 700, 256, seed=5)
    b = adjust_parameters(0.9, 12345678, 700, 256, seed=5)
    assert a == b


def test_app_nonconvergence():
    th = Thresholds(diff_th=0, rrate_th=0.0, delta_diff_th=0, delta_rrate_th=0, max_iter=1000)
    with pytest.raises(NonConvergenceError):
        adjust_parameters(0.5, 1000, 101, 16, th)


def test_app_bad_inputs():
    with pytest.raises(ParameterError):
        adjust_parameters(1.0, 100, 10, 4)
    with pytest.raises(ParameterError):
        adjust_parameters(0.5, 0, 10, 4)


def test_thresholds_validation():
    with pytest.raises(ParameterError):
        Thresholds(rand_win_max=1, rand_win_min=2)
