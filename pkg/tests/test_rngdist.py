import math
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from oracles import lcg_reference
from xorfountain.errors import ConfigurationError, ParameterError
from xorfountain.rngdist import (DEFAULT_SEED, FINITE_DIST, DegreeDistribution, RandomStream,
                                 lcg_next, make_distribution, sample_degree, sample_neighbors)


def test_lcg_known_values():
    s = RandomStream(1)
    assert s.next() == 1103527590
    assert RandomStream(0).next() == 12345


def test_lcg_next_is_pure():
    s = RandomStream(DEFAULT_SEED)
    s2, v = lcg_next(s)
    assert s.draws == 0 and s2.draws == 1
    assert v == s2.state == lcg_reference(DEFAULT_SEED, 1)[0]


@given(st.integers(0, 2**31 - 1))
def test_lcg_matches_reference(seed):
    s = RandomStream(seed)
    assert [s.next() for _ in range(5)] == lcg_reference(seed, 5)
    assert s.draws == 5


def test_streams_with_same_seed_agree():
    a, b = RandomStream(DEFAULT_SEED), RandomStream(DEFAULT_SEED)
    assert [a.next() for _ in range(3)] == [b.next() for _ in range(3)]


def test_finite_dist_support():
    d = make_distribution("FiniteDist", 500)
    assert d.degrees == (1, 2, 3, 4, 5, 8, 9, 19, 64, 65)
    raw = dict(FINITE_DIST)
    total = sum(raw.values())
    for deg, p in zip(d.degrees, d.probs):
        assert p == pytest.approx(raw[deg] / total, abs=1e-12)
    assert d.probs[1] == pytest.approx(0.49357, abs=1e-5)
    assert sum(d.probs) == pytest.approx(1.0, abs=1e-9)
    assert d.cdf[-1] == pytest.approx(1.0, abs=1e-9)


def test_finite_dist_truncated_at_small_k():
    d = make_distribution("FiniteDist", 10)
    assert max(d.degrees) == 10
    raw = dict(FINITE_DIST)
    tail = raw[19] + raw[64] + raw[65]
    assert d.probs[-1] == pytest.approx(tail / sum(raw.values()), abs=1e-12)
    assert sum(d.probs) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("k", [2, 10, 100, 1000])
def test_rsd_normalized(k):
    d = make_distribution("RSD", k, 0.1, 0.5)
    assert sum(d.probs) == pytest.approx(1.0, abs=1e-9)
    assert list(d.degrees) == sorted(d.degrees) and d.degrees[-1] <= k
    assert all(b >= a for a, b in zip(d.cdf, d.cdf[1:]))


def test_rsd_matches_luby_formula():
    k, c, delta = 100, 0.1, 0.5
    R = c * math.log(k / delta) * math.sqrt(k)
    spike = round(k / R)
    ref = {}
    for i in range(1, k + 1):
        rho = 1 / k if i == 1 else 1 / (i * (i - 1))
        tau = R / (i * k) if i < spike else (R * math.log(R / delta) / k if i == spike else 0)
        ref[i] = rho + tau
    z = sum(ref.values())
    d = make_distribution("RSD", k, c, delta)
    for deg, p in zip(d.degrees, d.probs):
        assert p == pytest.approx(ref[deg] / z, rel=1e-9)


def test_bad_distribution_inputs():
    with pytest.raises(ConfigurationError):
        make_distribution("Uniform", 10)
    with pytest.raises(ParameterError):
        make_distribution("FiniteDist", 1)
    with pytest.raises(ConfigurationError):
        make_distribution("RSD", 10, rsd_c=0)


def test_degenerate_distribution():
    d = DegreeDistribution.from_support("one", [(1, 1.0)])
    s = RandomStream(7)
    assert {sample_degree(d, s) for _ in range(100)} == {1}


def test_degree_sampling_statistics():
    d = make_distribution("FiniteDist", 1000)
    raw = dict(FINITE_DIST)
    mean = sum(k * p for k, p in raw.items()) / sum(raw.values())
    s = RandomStream(DEFAULT_SEED)
    N = 10**6
    counts = Counter(sample_degree(d, s) for _ in range(N))
    emp_mean = sum(k * c for k, c in counts.items()) / N
    assert emp_mean == pytest.approx(mean, abs=0.05)
    assert abs(mean - 5.84) < 0.01
    assert counts[2] / N == pytest.approx(0.49357, abs=0.005)
    assert set(counts) <= set(d.degrees)


def test_neighbors_full_set():
    assert sorted(sample_neighbors(RandomStream(3), 12, 12)) == list(range(12))


def test_neighbors_reproducible():
    a = sample_neighbors(RandomStream(99), 1, 10)
    b = sample_neighbors(RandomStream(99), 1, 10)
    assert a == b and 0 <= a[0] < 10


def test_neighbors_uniform():
    s = RandomStream(DEFAULT_SEED)
    N = 10**5
    counts = Counter(sample_neighbors(s, 1, 10)[0] for _ in range(N))
    for i in range(10):
        assert counts[i] / N == pytest.approx(0.1, abs=0.01)


def test_neighbors_degree_too_large():
    with pytest.raises(ParameterError):
        sample_neighbors(RandomStream(1), 11, 10)


@settings(max_examples=300)
@given(st.integers(1, 200), st.integers(0, 2**31 - 1), st.data())
def test_neighbors_distinct(k, seed, data):
    deg = data.draw(st.integers(1, k))
    out = sample_neighbors(RandomStream(seed), deg, k)
    assert len(out) == deg == len(set(out))
    assert all(0 <= x < k for x in out)
