"""LDGM generator matrix and chunk-to-disk bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError
from .rngdist import DegreeDistribution, RandomStream, sample_degree, sample_neighbors


def normalize_n(n_requested: int, s: int) -> int:
    """Smallest ``n >= n_requested`` that ``s`` divides."""
    if s < 1 or n_requested < s:
        raise ParameterError(f"need n >= s >= 1, got n={n_requested}, s={s}")
    return -(-n_requested // s) * s


def disk_columns(seed: int, disk: int, per_disk: int, k: int,
                 dist: DegreeDistribution) -> list[np.ndarray]:
    """Columns of one disk, drawn from a stream seeded with ``seed + disk``."""
    stream = RandomStream(seed + disk)
    cols = []
    for _ in range(per_disk):
        deg = min(sample_degree(dist, stream), k)
        cols.append(np.array(sorted(sample_neighbors(stream, deg, k)), dtype=np.int64))
    return cols


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Sparse ``k x n`` binary matrix stored column-wise.

    Column ``j`` lists the data symbols XORed into coding symbol ``j``.
    Coding symbols are striped so disk ``d`` owns ids
    ``d * per_disk ... (d + 1) * per_disk - 1``.
    """

    k: int
    n: int
    s: int
    seed: int
    columns: tuple[np.ndarray, ...]

    @property
    def per_disk(self) -> int:
        return self.n // self.s

    @property
    def per_disk_seed(self) -> list[int]:
        return [self.seed + i for i in range(self.s)]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(c) for c in self.columns], dtype=np.int64)

    @cached_property
    def indptr(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.degrees)))

    @cached_property
    def indices(self) -> np.ndarray:
        if not self.columns:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(self.columns)

    @cached_property
    def row_lists(self) -> list[np.ndarray]:
        """For every data symbol, the coding symbols it feeds (transpose)."""
        order = np.argsort(self.indices, kind="stable")
        cols = np.repeat(np.arange(self.n), self.degrees)[order]
        counts = np.bincount(self.indices, minlength=self.k)
        return np.split(cols, np.cumsum(counts)[:-1])

    @property
    def num_edges(self) -> int:
        return int(self.degrees.sum())

    def dense(self) -> np.ndarray:
        B = np.zeros((self.k, self.n), dtype=np.uint8)
        B[self.indices, np.repeat(np.arange(self.n), self.degrees)] = 1
        return B

    def disk_of(self, chunk: int) -> tuple[int, int]:
        return divmod(chunk, self.per_disk)

    def chunk_id(self, disk: int, offset: int) -> int:
        return disk * self.per_disk + offset

    @classmethod
    def from_columns(cls, k: int, columns, s: int = 1, seed: int = 0) -> "GeneratorMatrix":
        cols = tuple(np.array(sorted(set(int(x) for x in c)), dtype=np.int64) for c in columns)
        n = len(cols)
        if s < 1 or n % s:
            raise ParameterError(f"s={s} must divide n={n}")
        for j, c in enumerate(cols):
            if len(c) == 0:
                raise ParameterError(f"column {j} is empty")
            if c[0] < 0 or c[-1] >= k:
                raise ParameterError(f"column {j} has an index outside [0, {k})")
        return cls(k, n, s, seed, cols)


def build_generator(k: int, n: int, s: int, seed: int, dist: DegreeDistribution) -> GeneratorMatrix:
    if s < 1 or n % s:
        raise ParameterError(f"s={s} must divide n={n}; call normalize_n first")
    per_disk = n // s
    cols: list[np.ndarray] = []
    for disk in range(s):
        cols.extend(disk_columns(seed, disk, per_disk, k, dist))
    return GeneratorMatrix(k, n, s, seed, tuple(cols))


def erasure_set(failed_disks, n: int, s: int) -> frozenset[int]:
    """Coding ids stored on ``failed_disks``."""
    per = n // s
    out: set[int] = set()
    for d in failed_disks:
        if not 0 <= d < s:
            raise ParameterError(f"disk {d} outside [0, {s})")
        out.update(range(d * per, (d + 1) * per))
    return frozenset(out)
