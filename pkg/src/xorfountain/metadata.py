"""Plain-text metadata file and the naming scheme of the coding directory."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigurationError, MetadataError
from .precode import PRECODE_NAMES
from .rngdist import DIST_NAMES

DISK_INDX_STRNG_LEN = 4
CODING_DIR = "Coding"


@dataclass(frozen=True)
class Metadata:
    filename: str
    filesize: int
    b: int
    k: int
    n: int
    t: int
    s: int
    seed: int
    dist: str
    precode: str
    stripes: int
    redundant_zeros: int
    checkdata_ints: int = 0
    rsd_c: float = 0.1
    rsd_delta: float = 0.5
    checks_converged: int = -1  # -1: genChecks never ran

    def validate(self) -> "Metadata":
        if self.s < 1 or self.n % self.s:
            raise MetadataError(f"n={self.n} is not divisible by s={self.s}")
        if not 0 < self.b <= self.k:
            raise MetadataError(f"invalid b={self.b}, k={self.k}")
        if self.t <= 0 or self.filesize < 0:
            raise MetadataError("t must be positive and filesize non-negative")
        if self.dist not in DIST_NAMES:
            raise ConfigurationError(f"unknown degree distribution {self.dist!r}")
        if self.precode not in PRECODE_NAMES:
            raise ConfigurationError(f"unknown precode {self.precode!r}")
        stripe = self.b * self.t
        if self.stripes != self.filesize // stripe + 1:
            raise MetadataError(f"stripes={self.stripes} inconsistent with filesize and b*t")
        if self.redundant_zeros != stripe * self.stripes - self.filesize:
            raise MetadataError("redundant_zeros inconsistent with stripes")
        return self

    @property
    def per_disk(self) -> int:
        return self.n // self.s

    @property
    def disk_bytes(self) -> int:
        return self.per_disk * self.t * self.stripes

    def with_(self, **kw) -> "Metadata":
        return replace(self, **kw)


_REQUIRED = ("filename", "filesize", "b", "k", "n", "t", "s", "seed", "dist",
             "precode", "stripes", "redundant_zeros")
_TYPES = {f.name: f.type for f in fields(Metadata)}


def split_name(filename: str) -> tuple[str, str]:
    base = os.path.basename(filename)
    stem, ext = os.path.splitext(base)
    return stem, ext


def meta_path(coding_dir, filename: str) -> Path:
    return Path(coding_dir) / f"{split_name(filename)[0]}_meta.txt"


def disk_path(coding_dir, filename: str, disk: int, width: int = DISK_INDX_STRNG_LEN) -> Path:
    stem, ext = split_name(filename)
    return Path(coding_dir) / f"{stem}_disk{disk:0{width}d}{ext}"


def check_path(coding_dir, filename: str) -> Path:
    return Path(coding_dir) / f"{split_name(filename)[0]}_check.data"


def decoded_path(coding_dir, filename: str) -> Path:
    stem, ext = split_name(filename)
    return Path(coding_dir) / f"{stem}_decoded{ext}"


def format_metadata(meta: Metadata) -> str:
    return "".join(f"{f.name}: {getattr(meta, f.name)}\n" for f in fields(Metadata))


def parse_metadata(text: str) -> Metadata:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise MetadataError(f"line {lineno}: expected 'key: value'")
        values[key.strip()] = value.strip()
    for key in _REQUIRED:
        if key not in values:
            raise MetadataError(f"metadata is missing required key {key!r}")
    kw = {}
    for key, raw in values.items():
        if key not in _TYPES:
            continue
        typ = _TYPES[key]
        try:
            kw[key] = int(raw) if typ == "int" else float(raw) if typ == "float" else raw
        except ValueError:
            raise MetadataError(f"bad value for {key!r}: {raw!r}") from None
    return Metadata(**kw).validate()


def write_metadata(meta: Metadata, coding_dir) -> Path:
    path = meta_path(coding_dir, meta.filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_metadata(meta.validate()))
    return path


def read_metadata(coding_dir, filename: str) -> Metadata:
    path = meta_path(coding_dir, filename)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MetadataError(f"cannot read metadata {path}: {exc.strerror}") from exc
    return parse_metadata(text)
