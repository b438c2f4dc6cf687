"""Exhaustive disk-failure enumeration."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .codec import Code, plan_decode
from .errors import ParameterError
from .graph import erasure_set

MAX_FAILING_PATTERNS = 64


def enumerate_failures(s: int, f: int):
    if not 0 <= f <= s:
        raise ParameterError(f"need 0 <= f <= s, got f={f}, s={s}")
    return itertools.combinations(range(s), f)


def pattern_decodable(code: Code, disks) -> bool:
    """All user symbols recoverable after losing ``disks``? Structure only."""
    E = erasure_set(disks, code.gen.n, code.gen.s)
    return plan_decode(code.gen, code.check1, E).user_ok


@dataclass
class ReliabilityReport:
    s: int
    f: int
    total_combinations: int
    decodable: int
    failing_patterns: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def fraction(self) -> float:
        return self.decodable / self.total_combinations if self.total_combinations else 1.0

    def line(self) -> str:
        return f"{self.f} {self.total_combinations} {self.decodable} {self.fraction:.6f}"


def _count(code, patterns):
    return [(p, pattern_decodable(code, p)) for p in patterns]


def simdisk(code: Code, f: int, workers: int = 1,
            max_failing: int = MAX_FAILING_PATTERNS) -> ReliabilityReport:
    s = code.gen.s
    patterns = list(enumerate_failures(s, f))
    if workers > 1 and len(patterns) > workers:
        chunks = [patterns[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as ex:
            results = [r for part in ex.map(_count, [code] * workers, chunks) for r in part]
        results.sort()
    else:
        results = _count(code, patterns)
    ok = sum(1 for _, good in results if good)
    failing = [p for p, good in results if not good][:max_failing]
    return ReliabilityReport(s, f, len(patterns), ok, failing)


def write_report(reports, path) -> None:
    with open(path, "w") as fh:
        fh.write("# f total decodable fraction\n")
        for r in reports:
            fh.write(r.line() + "\n")
