from dataclasses import replace
from pathlib import Path

import pytest

from xorfountain import metadata as md
from xorfountain.errors import ConfigurationError, MetadataError

META = md.Metadata(filename="testfile.txt", filesize=3000000, b=460, k=506, n=1000, t=512, s=10,
                   seed=1389488782, dist="FiniteDist", precode="ArrayLDPC", stripes=13,
                   redundant_zeros=460 * 512 * 13 - 3000000)


def test_round_trip(tmp_path):
    md.write_metadata(META, tmp_path)
    assert md.read_metadata(tmp_path, "testfile.txt") == META


def test_key_order_and_format():
    lines = md.format_metadata(META).splitlines()
    assert lines[0] == "filename: testfile.txt"
    assert [ln.split(":")[0] for ln in lines[:13]] == [
        "filename", "filesize", "b", "k", "n", "t", "s", "seed", "dist", "precode",
        "stripes", "redundant_zeros", "checkdata_ints"]
    assert md.format_metadata(META).endswith("\n")


def test_missing_key_named():
    text = "\n".join(ln for ln in md.format_metadata(META).splitlines() if not ln.startswith("seed"))
    with pytest.raises(MetadataError, match="seed"):
        md.parse_metadata(text)


def test_tampered_n():
    text = md.format_metadata(META).replace("n: 1000", "n: 1001")
    with pytest.raises(MetadataError):
        md.parse_metadata(text)


def test_unknown_distribution():
    with pytest.raises(ConfigurationError):
        md.parse_metadata(md.format_metadata(replace(META, dist="Zipf")))


def test_missing_file(tmp_path):
    with pytest.raises(MetadataError):
        md.read_metadata(tmp_path, "nothing.bin")


def test_paths():
    assert md.disk_path("Coding", "testfile.txt", 7) == Path("Coding/testfile_disk0007.txt")
    assert md.meta_path("Coding", "dir/testfile.txt") == Path("Coding/testfile_meta.txt")
    assert md.check_path("Coding", "testfile.txt") == Path("Coding/testfile_check.data")
    assert md.decoded_path("Coding", "testfile.txt") == Path("Coding/testfile_decoded.txt")


def test_derived_sizes():
    assert META.per_disk == 100
    assert META.disk_bytes == 100 * 512 * 13
