"""Seeded pseudo-random streams and degree distributions.

Everything that shapes the code graph is drawn from a :class:`RandomStream`,
so a graph can be rebuilt bit-for-bit from its seed alone.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ParameterError

LCG_A = 1103515245
LCG_C = 12345
LCG_M = 1 << 31

DEFAULT_SEED = 1389488782

# Raptor-style finite distribution: (degree, probability).
FINITE_DIST = (
    (1, 0.007969),
    (2, 0.49357),
    (3, 0.16622),
    (4, 0.072646),
    (5, 0.082558),
    (8, 0.056058),
    (9, 0.037229),
    (19, 0.05559),
    (64, 0.025023),
    (65, 0.003135),
)

DIST_NAMES = ("FiniteDist", "RSD")


@dataclass
class RandomStream:
    """Linear congruential generator with the ANSI-C constants.

    ``next()`` advances the state and returns it as a 31-bit integer.
    """

    origin_seed: int
    state: int = field(init=False)
    draws: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        self.origin_seed = int(self.origin_seed)
        self.state = self.origin_seed % LCG_M

    def next(self) -> int:
        self.state = (LCG_A * self.state + LCG_C) % LCG_M
        self.draws += 1
        return self.state

    def copy(self) -> "RandomStream":
        other = RandomStream(self.origin_seed)
        other.state = self.state
        other.draws = self.draws
        return other


def lcg_next(stream: RandomStream) -> tuple[RandomStream, int]:
    """Functional form of :meth:`RandomStream.next`; leaves ``stream`` untouched."""
    nxt = stream.copy()
    value = nxt.next()
    return nxt, value


@dataclass(frozen=True)
class DegreeDistribution:
    name: str
    degrees: tuple[int, ...]
    probs: tuple[float, ...]
    cdf: tuple[float, ...]

    @classmethod
    def from_support(cls, name: str, support) -> "DegreeDistribution":
        merged: dict[int, float] = {}
        for deg, p in support:
            if p > 0:
                merged[int(deg)] = merged.get(int(deg), 0.0) + float(p)
        if not merged:
            raise ConfigurationError("degree distribution has no mass")
        degrees = tuple(sorted(merged))
        if degrees[0] < 1:
            raise ConfigurationError("degrees must be positive")
        total = math.fsum(merged.values())
        probs = tuple(merged[d] / total for d in degrees)
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        return cls(name, degrees, probs, tuple(float(c) for c in cdf))

    @property
    def mean(self) -> float:
        return math.fsum(d * p for d, p in zip(self.degrees, self.probs))

    @property
    def max_degree(self) -> int:
        return self.degrees[-1]


def robust_soliton(k: int, c: float, delta: float) -> list[tuple[int, float]]:
    """Luby's robust soliton (rho + tau), unnormalized support."""
    if c <= 0 or not 0 < delta < 1:
        raise ConfigurationError("RSD needs c > 0 and 0 < delta < 1")
    R = c * math.log(k / delta) * math.sqrt(k)
    spike = int(round(k / R)) if R > 0 else k
    spike = min(max(spike, 1), k)
    out = []
    for i in range(1, k + 1):
        rho = 1.0 / k if i == 1 else 1.0 / (i * (i - 1))
        if i < spike:
            tau = R / (i * k)
        elif i == spike:
            tau = R * math.log(R / delta) / k
        else:
            tau = 0.0
        out.append((i, rho + max(tau, 0.0)))
    return out


def make_distribution(name: str, k: int, rsd_c: float = 0.1, rsd_delta: float = 0.5) -> DegreeDistribution:
    """Build the named degree distribution for ``k`` data symbols.

    FiniteDist degrees above ``k`` collapse onto degree ``k``.
    """
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    if name == "FiniteDist":
        support = [(min(d, k), p) for d, p in FINITE_DIST]
    elif name == "RSD":
        support = robust_soliton(k, rsd_c, rsd_delta)
    else:
        raise ConfigurationError(f"unknown degree distribution {name!r}")
    return DegreeDistribution.from_support(name, support)


def sample_degree(dist: DegreeDistribution, stream: RandomStream) -> int:
    u = stream.next() / LCG_M
    idx = bisect.bisect_right(dist.cdf, u)
    return dist.degrees[min(idx, len(dist.degrees) - 1)]


def sample_neighbors(stream: RandomStream, degree: int, k: int) -> list[int]:
    """Draw ``degree`` distinct indices in ``[0, k)``, rejecting repeats.

    Returned in draw order.
    """
    if degree > k or degree < 1:
        raise ParameterError(f"cannot pick {degree} distinct neighbors out of {k}")
    chosen: list[int] = []
    seen: set[int] = set()
    while len(chosen) < degree:
        idx = stream.next() % k
        if idx not in seen:
            seen.add(idx)
            chosen.append(idx)
    return chosen
