import math

import numpy as np
import pytest

from xorfountain.codec import Code, choose_parameters, execute_decode, encode_stripe, plan_decode
from xorfountain.errors import ParameterError
from xorfountain.graph import erasure_set
from xorfountain.reliability import enumerate_failures, pattern_decodable, simdisk, write_report


@pytest.mark.parametrize("s,f,count", [(4, 2, 6), (5, 0, 1), (10, 3, 120), (6, 6, 1)])
def test_enumerate_counts(s, f, count):
    combos = list(enumerate_failures(s, f))
    assert len(combos) == count == math.comb(s, f)
    assert combos == sorted(combos) and len(set(combos)) == count


def test_enumerate_rejects():
    with pytest.raises(ParameterError):
        list(enumerate_failures(3, 4))


@pytest.fixture(scope="module")
def code():
    return Code.from_metadata(choose_parameters("x", 100_000, 100, 240, 64, 6))


def test_extremes(code):
    assert simdisk(code, 0).fraction == 1.0
    assert simdisk(code, 6).fraction == 0.0


def test_monotone(code):
    fr = [simdisk(code, f).fraction for f in range(7)]
    assert all(a >= b for a, b in zip(fr, fr[1:]))


def test_failing_patterns_capped(code):
    rep = simdisk(code, 5, max_failing=2)
    assert rep.decodable + min(2, rep.total_combinations - rep.decodable) >= len(rep.failing_patterns)
    assert len(rep.failing_patterns) <= 2


def test_structure_matches_content(code):
    meta = code.meta
    rng = np.random.default_rng(0)
    user = rng.integers(0, 256, (meta.b, 32), dtype=np.uint8)
    buf = encode_stripe(user, code.gen, code.check1)
    for f in (1, 2, 3):
        for disks in enumerate_failures(meta.s, f):
            E = erasure_set(disks, meta.n, meta.s)
            coding = buf[meta.k:].copy()
            coding[list(E)] = 0
            plan = plan_decode(code.gen, code.check1, E)
            data = execute_decode(plan, code.gen, code.check1, coding)
            assert pattern_decodable(code, disks) == np.array_equal(data[:meta.b], user)


def test_parallel_agrees(code):
    a, b = simdisk(code, 2), simdisk(code, 2, workers=2)
    assert (a.decodable, a.failing_patterns) == (b.decodable, b.failing_patterns)


def test_report_file(code, tmp_path):
    reps = [simdisk(code, f) for f in (0, 1)]
    path = tmp_path / "r.txt"
    write_report(reps, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == "0 1 1 1.000000"
    f, total, ok, frac = lines[2].split()
    assert (int(f), int(total)) == (1, 6) and float(frac) == pytest.approx(int(ok) / 6)
