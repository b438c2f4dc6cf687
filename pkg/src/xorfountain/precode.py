"""Binary array-LDPC precode.

The precode appends ``k - b`` parity symbols to the ``b`` user symbols so
that a set of data-only XOR checks holds.  Parity ``r`` lives at data index
``b + r`` and only depends on user symbols and lower-numbered parities, so
encoding is a single forward pass.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NonConvergenceError, ParameterError
from .rngdist import RandomStream

PRECODE_NAMES = ("ArrayLDPC", "None")


@functools.lru_cache(maxsize=4096)
def largest_prime_factor(k: int) -> int:
    if k < 2:
        raise ParameterError(f"largest_prime_factor needs k >= 2, got {k}")
    best = 1
    n = k
    d = 2
    while d * d <= n:
        while n % d == 0:
            best = d
            n //= d
        d += 1
    return max(best, n) if n > 1 else best


@dataclass
class Thresholds:
    """Tunables of the parameter search.

    ``red_byte_th=None`` bounds the zero padding by one stripe (``b * t``),
    which every candidate satisfies; pass a byte count for a tighter bound.
    """

    diff_th: float = 16
    rrate_th: float = 0.02
    red_byte_th: int | None = None
    rand_win_max: int = 64
    rand_win_min: int = 32
    array_min_jj: int = 2
    array_min_kk: int = 3  # kept for completeness, the search never reads it
    tries_th: int = 200
    delta_diff_th: float = 8
    delta_rrate_th: float = 0.005
    max_iter: int = 10**7

    def __post_init__(self) -> None:
        vals = [self.diff_th, self.rrate_th, self.rand_win_max, self.rand_win_min,
                self.array_min_jj, self.array_min_kk, self.tries_th,
                self.delta_diff_th, self.delta_rrate_th]
        if self.red_byte_th is not None:
            vals.append(self.red_byte_th)
        if any(v < 0 for v in vals):
            raise ParameterError("thresholds must be non-negative")
        if self.rand_win_max < self.rand_win_min:
            raise ParameterError("rand_win_max must be >= rand_win_min")


@dataclass(frozen=True)
class AdjustedParams:
    b: int
    k: int
    redundant_zeros: int
    blocks: int
    p: int
    k_prime: int
    j_prime: int
    iterations: int
    final: Thresholds = field(compare=False)


def _app_violated(b, bhat, k, r_ldpc, kp, jp, p, blocks, t, filesize, diff_th, rrate_th, red_th):
    red = red_th if red_th is not None else b * t
    return (abs(b - bhat) > diff_th
            or abs(b / k - r_ldpc) > rrate_th
            or kp > p or jp > p or kp < jp
            or abs(blocks * t * b - filesize) > red)


def check_adjusted(res: AdjustedParams, b_requested: int, r_ldpc: float, filesize: int, t: int) -> list[str]:
    """Return the list of search-loop clauses ``res`` still violates."""
    th = res.final
    red = th.red_byte_th if th.red_byte_th is not None else res.b * t
    bad = []
    if abs(res.b - b_requested) > th.diff_th:
        bad.append("diff")
    if abs(res.b / res.k - r_ldpc) > th.rrate_th:
        bad.append("rate")
    if res.k_prime > res.p:
        bad.append("k_prime > p")
    if res.j_prime > res.p:
        bad.append("j_prime > p")
    if res.k_prime < res.j_prime:
        bad.append("k_prime < j_prime")
    if abs(res.blocks * t * res.b - filesize) > red:
        bad.append("padding")
    return bad


def adjust_parameters(r_ldpc: float, filesize: int, b: int, t: int,
                      th: Thresholds | None = None, seed: int = 0) -> AdjustedParams:
    """Search for a realizable array-LDPC ``(b, k)`` close to the request.

    Random offsets come from an LCG seeded with ``seed``.  Every
    ``tries_th`` candidates with positive ``b`` the diff and rate tolerances
    widen by their deltas.
    """
    if filesize <= 0 or t <= 0:
        raise ParameterError("filesize and t must be positive")
    if not 0 < r_ldpc < 1:
        raise ParameterError(f"precode rate must be in (0, 1), got {r_ldpc}")
    th = replace(th) if th is not None else Thresholds()
    rng = RandomStream(seed)
    bhat = int(b)
    b, k, kp, jp, p, blocks, tries, it = 0, 1, 10**9, 10**9, 2, 1, 0, 0
    diff_th, rrate_th = th.diff_th, th.rrate_th
    window = th.rand_win_max + th.rand_win_min
    while _app_violated(b, bhat, k, r_ldpc, kp, jp, p, blocks, t, filesize,
                        diff_th, rrate_th, th.red_byte_th):
        k = int(bhat / r_ldpc) + rng.next() % window - th.rand_win_min
        it += 1
        if it > th.max_iter:
            raise NonConvergenceError(
                f"parameter search did not converge in {th.max_iter} iterations "
                f"(b={bhat}, rate={r_ldpc}, t={t}, filesize={filesize})")
        if k < 2:
            b, k = 0, 1
            continue
        p = largest_prime_factor(k)
        kp = k // p
        jp = kp - bhat // p
        if jp < th.array_min_jj:
            jp = th.array_min_jj
        b = (kp - jp) * p
        if b > 0:
            blocks = filesize // (t * b) + 1
            tries += 1
            if tries > th.tries_th:
                diff_th += th.delta_diff_th
                rrate_th += th.delta_rrate_th
                tries = 0
    blocks = filesize // (t * b) + 1
    final = replace(th, diff_th=diff_th, rrate_th=rrate_th)
    return AdjustedParams(b=b, k=k, redundant_zeros=b * t * blocks - filesize, blocks=blocks,
                          p=p, k_prime=kp, j_prime=jp, iterations=it, final=final)


@dataclass(frozen=True)
class Check1Sets:
    """Array-LDPC parity groups over the ``k`` data symbols.

    ``table[r]`` holds the non-parity members of check ``r`` exactly as the
    index formula produces them; ``groups[r]`` adds parity ``b + r``.
    """

    b: int
    k: int
    table: np.ndarray
    groups: tuple[tuple[int, ...], ...]

    @property
    def num_parities(self) -> int:
        return self.k - self.b

    def incidence(self) -> np.ndarray:
        """Dense ``k x (k - b)`` 0/1 matrix, column ``r`` = group ``r``."""
        L = np.zeros((self.k, self.num_parities), dtype=np.uint8)
        for r, g in enumerate(self.groups):
            L[list(g), r] = 1
        return L


def array_ldpc_dims(b: int, k: int) -> tuple[int, int, int]:
    """Return ``(p, k_prime, j_prime)`` or raise if ``(b, k)`` is not an array code."""
    if not 0 < b <= k:
        raise ParameterError(f"need 0 < b <= k, got b={b}, k={k}")
    if b == k:
        return 1, k, 0
    p = largest_prime_factor(k)
    kp = k // p
    if b % p:
        raise ParameterError(f"b={b} is not a multiple of p={p} (k={k})")
    jp = kp - b // p
    if jp < 1 or kp <= jp:
        raise ParameterError(f"(b={b}, k={k}) gives k'={kp}, j'={jp}: not realizable")
    return p, kp, jp


def build_check1(b: int, k: int) -> Check1Sets:
    p, kp, jp = array_ldpc_dims(b, k)
    if b == k:
        return Check1Sets(b, k, np.zeros((0, 0), dtype=np.int64), ())
    table = np.empty((jp * p, kp - jp), dtype=np.int64)
    for j in range(jp):
        for i in range(p):
            for m in range(1, kp - jp + 1):
                table[i + j * p, m - 1] = (kp * p - (jp - j + m - 1) * p
                                           - (m * (jp - j - 1) - i - 1 + p) % p - 1)
    if table.min() < 0 or table.max() >= k:
        raise ParameterError("array LDPC index out of range")
    groups = tuple(tuple(sorted(int(x) for x in row)) + (b + r,) for r, row in enumerate(table))
    return Check1Sets(b, k, table, groups)


def apply_precode(data: np.ndarray, sets: Check1Sets) -> None:
    """Fill parity rows ``data[b:k]`` in place from the user rows.

    ``data`` has one row per data symbol (any row width).
    """
    b = sets.b
    for r, g in enumerate(sets.groups):
        members = list(g[:-1])
        np.bitwise_xor.reduce(data[members], axis=0, out=data[b + r])


def precode_bp(known: np.ndarray, sets: Check1Sets, data: np.ndarray | None = None) -> np.ndarray:
    """Peel parity groups with a single unknown member until nothing changes.

    ``known`` is a boolean mask over the ``k`` data symbols and is updated in
    place (and returned).  When ``data`` is given the recovered rows are
    written into it.
    """
    groups = [list(g) for g in sets.groups]
    missing = [sum(1 for x in g if not known[x]) for g in groups]
    member_of: dict[int, list[int]] = {}
    for gi, g in enumerate(groups):
        for x in g:
            member_of.setdefault(x, []).append(gi)
    queue = [gi for gi, m in enumerate(missing) if m == 1]
    while queue:
        gi = queue.pop()
        if missing[gi] != 1:
            continue
        g = groups[gi]
        target = next(x for x in g if not known[x])
        if data is not None:
            others = [x for x in g if x != target]
            np.bitwise_xor.reduce(data[others], axis=0, out=data[target])
        known[target] = True
        for gj in member_of[target]:
            missing[gj] -= 1
            if missing[gj] == 1:
                queue.append(gj)
    return known
