"""XOR encoding, belief-propagation decoding and decoding-path generation.

Symbols are rows of a 2-D ``uint8`` array.  A row may hold one stripe
(``t`` bytes) or the same symbol of many stripes side by side; the graph is
shared by every stripe, so one schedule serves them all.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metadata as md
from .errors import DecodeFailure, ParameterError
from .graph import GeneratorMatrix, build_generator, erasure_set
from .precode import Check1Sets, adjust_parameters, apply_precode, build_check1, precode_bp, Thresholds
from .rngdist import DEFAULT_SEED, make_distribution

log = logging.getLogger(__name__)

BATCH_BYTES = 32 << 20


def xor_accumulate(dst: np.ndarray, src: np.ndarray) -> np.ndarray:
    if dst.shape != src.shape:
        raise ValueError(f"block size mismatch: {dst.shape} vs {src.shape}")
    np.bitwise_xor(dst, src, out=dst)
    return dst


def _xor_rows(rows: np.ndarray, idx, out: np.ndarray) -> None:
    if len(idx) == 1:
        out[...] = rows[idx[0]]
    else:
        np.bitwise_xor.reduce(rows[idx], axis=0, out=out)


# -- encoding ---------------------------------------------------------------

def encode_symbols(data: np.ndarray, gen: GeneratorMatrix, workers: int = 1,
                   columns=None) -> np.ndarray:
    """Coding rows for ``columns`` (default all) of ``gen`` from ``data``.

    Work is split per disk when ``workers > 1``.
    """
    cols = range(gen.n) if columns is None else list(columns)
    out = np.empty((len(cols), data.shape[1]), dtype=np.uint8)

    def run(lo, hi):
        for pos in range(lo, hi):
            _xor_rows(data, gen.columns[cols[pos]], out[pos])

    if workers <= 1 or len(cols) < 2:
        run(0, len(cols))
    else:
        parts = min(workers, len(cols))
        bounds = np.linspace(0, len(cols), parts + 1).astype(int)
        with ThreadPoolExecutor(workers) as ex:
            list(ex.map(run, bounds[:-1], bounds[1:]))
    return out


def encode_stripe(user: np.ndarray, gen: GeneratorMatrix, check1: Check1Sets | None,
                  workers: int = 1) -> np.ndarray:
    """Full ``(k + n)`` row buffer: user rows, precode parities, then coding rows."""
    user = np.asarray(user, dtype=np.uint8)
    if user.ndim == 1:
        raise ParameterError("user data must be 2-D (symbols x bytes)")
    b = user.shape[0]
    k, n = gen.k, gen.n
    buf = np.zeros((k + n, user.shape[1]), dtype=np.uint8)
    buf[:b] = user
    if check1 is not None and check1.num_parities:
        if check1.b != b or check1.k != k:
            raise ParameterError("precode does not match (b, k)")
        apply_precode(buf[:k], check1)
    elif b != k:
        raise ParameterError("b != k requires a precode")
    buf[k:] = encode_symbols(buf[:k], gen, workers)
    return buf


# -- peeling schedules ------------------------------------------------------

def _peel_state(gen: GeneratorMatrix, erasures):
    alive = np.ones(gen.n, dtype=bool)
    if erasures:
        alive[list(erasures)] = False
    deg = [int(d) if a else 0 for d, a in zip(gen.degrees, alive)]
    sums = [int(c.sum()) if a else 0 for c, a in zip(gen.columns, alive)]
    rows = [[g for g in r.tolist() if alive[g]] for r in gen.row_lists]
    return alive, deg, sums, rows


def bp_peel(gen: GeneratorMatrix, erasures=frozenset(), maxit: int | None = None):
    """Structure-only belief propagation in sweep order.

    Each sweep visits the surviving coding symbols in index order and peels
    any of degree one immediately.  Returns ``(unresolved, order)`` where
    ``order`` lists ``(data, coding)`` pairs in decoding order.
    """
    maxit = gen.n if maxit is None else maxit
    alive, deg, sums, rows = _peel_state(gen, erasures)
    survivors = np.flatnonzero(alive).tolist()
    unresolved = set(range(gen.k))
    order: list[tuple[int, int]] = []
    it = 0
    while unresolved and it < maxit:
        progress = False
        for g in survivors:
            if deg[g] == 1:
                f = sums[g]
                unresolved.discard(f)
                order.append((f, g))
                progress = True
                for g2 in rows[f]:
                    deg[g2] -= 1
                    sums[g2] -= f
        it += 1
        if not progress:
            break
    return unresolved, order


@dataclass
class DecodingPath:
    """Decoding pairs grouped by iteration.

    Within one iteration every pair reads only symbols finished in earlier
    iterations, and each data symbol is written exactly once.
    """

    iterations: list[list[tuple[int, int]]] = field(default_factory=list)
    ripples: list[list[int]] = field(default_factory=list)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [p for it in self.iterations for p in it]


def dpg(gen: GeneratorMatrix, erasures=frozenset(), maxit: int | None = None):
    """Delayed peeling: one lowest-degree coding symbol per data symbol per round.

    Returns ``(path, unresolved)``.  Ties on degree go to the lower coding id.
    """
    maxit = gen.n if maxit is None else maxit
    alive, deg, sums, rows = _peel_state(gen, erasures)
    orig = gen.degrees
    ones = {g for g in np.flatnonzero(alive).tolist() if deg[g] == 1}
    unresolved = set(range(gen.k))
    path = DecodingPath()
    it = 0
    while unresolved and it < maxit:
        ripple = sorted(g for g in ones if deg[g] == 1)
        ones = set()
        if not ripple:
            break
        best: dict[int, int] = {}
        for g in ripple:
            f = sums[g]
            cur = best.get(f)
            if cur is None or orig[g] < orig[cur]:
                best[f] = g
        pairs = sorted(best.items())
        for f, _ in pairs:
            unresolved.discard(f)
            for g2 in rows[f]:
                deg[g2] -= 1
                sums[g2] -= f
                if deg[g2] == 1:
                    ones.add(g2)
        path.ripples.append(ripple)
        path.iterations.append(pairs)
        it += 1
    return path, unresolved


@dataclass
class DecodePlan:
    """Schedule for a fixed erasure pattern: outer pairs plus precode pass."""

    iterations: list[list[tuple[int, int]]]
    outer_unresolved: frozenset[int]
    unresolved: frozenset[int]
    b: int

    @property
    def pairs(self):
        return [p for it in self.iterations for p in it]

    @property
    def user_ok(self) -> bool:
        return not any(f < self.b for f in self.unresolved)

    @property
    def coding_used(self) -> list[int]:
        return sorted({g for _, g in self.pairs})


def plan_decode(gen: GeneratorMatrix, check1: Check1Sets | None, erasures=frozenset(),
                maxit: int | None = None, parallel: bool = False) -> DecodePlan:
    """Outer BP (sequential sweep or delayed rounds), then one precode pass."""
    if parallel:
        path, F = dpg(gen, erasures, maxit)
        iterations = path.iterations
    else:
        F, order = bp_peel(gen, erasures, maxit)
        iterations = [[p] for p in order]
    outer = frozenset(F)
    left = outer
    if left and check1 is not None and check1.num_parities:
        known = np.ones(gen.k, dtype=bool)
        known[list(left)] = False
        precode_bp(known, check1)
        left = frozenset(np.flatnonzero(~known).tolist())
    b = check1.b if check1 is not None else gen.k
    return DecodePlan(iterations, outer, left, b)


def execute_decode(plan: DecodePlan, gen: GeneratorMatrix, check1: Check1Sets | None,
                   coding: np.ndarray, workers: int = 1) -> np.ndarray:
    """Run ``plan`` on coding rows (shape ``(n, width)``); returns data rows."""
    data = np.zeros((gen.k, coding.shape[1]), dtype=np.uint8)

    def solve(pairs):
        for f, g in pairs:
            row = data[f]
            row[...] = coding[g]
            for d in gen.columns[g]:
                if d != f:
                    np.bitwise_xor(row, data[d], out=row)

    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for pairs in plan.iterations:
            if pool is None or len(pairs) < 2 * workers:
                solve(pairs)
            else:
                chunks = [pairs[i::workers] for i in range(workers)]
                list(pool.map(solve, chunks))
    finally:
        if pool is not None:
            pool.shutdown()
    if plan.outer_unresolved and check1 is not None and check1.num_parities:
        known = np.ones(gen.k, dtype=bool)
        known[list(plan.outer_unresolved)] = False
        precode_bp(known, check1, data)
    return data


def bp_decode_stripe(survivors, gen: GeneratorMatrix, erasures=frozenset(),
                     maxit: int | None = None, check1: Check1Sets | None = None):
    """Decode one stripe from ``{coding id: t bytes}``.

    Returns ``(data rows (k, t), unresolved data ids)``.
    """
    erasures = frozenset(erasures)
    width = None
    coding = None
    for g, blk in survivors.items():
        blk = np.frombuffer(bytes(blk), dtype=np.uint8) if not isinstance(blk, np.ndarray) else blk
        if coding is None:
            width = blk.shape[-1]
            coding = np.zeros((gen.n, width), dtype=np.uint8)
        coding[g] = blk
    if coding is None:
        coding = np.zeros((gen.n, 1), dtype=np.uint8)
    plan = plan_decode(gen, check1, erasures, maxit)
    return execute_decode(plan, gen, check1, coding), set(plan.unresolved)


# -- files ------------------------------------------------------------------

@dataclass
class Code:
    """Everything derived from metadata that the codec needs."""

    meta: md.Metadata
    gen: GeneratorMatrix
    check1: Check1Sets | None

    @classmethod
    def from_metadata(cls, meta: md.Metadata) -> "Code":
        dist = make_distribution(meta.dist, meta.k, meta.rsd_c, meta.rsd_delta)
        gen = build_generator(meta.k, meta.n, meta.s, meta.seed, dist)
        check1 = build_check1(meta.b, meta.k) if meta.precode == "ArrayLDPC" else None
        return cls(meta, gen, check1)


def choose_parameters(filename: str, filesize: int, k: int, n: int, t: int, s: int,
                      dist: str = "FiniteDist", precode: str = "ArrayLDPC",
                      r_ldpc: float = 0.95, seed: int = DEFAULT_SEED,
                      rsd_c: float = 0.1, rsd_delta: float = 0.5,
                      thresholds: Thresholds | None = None) -> md.Metadata:
    """Turn user-facing knobs into a consistent :class:`Metadata`.

    ``k`` is the requested total number of data symbols; with the array
    precode the user part starts at ``floor(k * r_ldpc)`` and the search
    settles on a nearby realizable code.
    """
    if t <= 0 or k < 2:
        raise ParameterError("need t > 0 and k >= 2")
    if precode == "ArrayLDPC":
        res = adjust_parameters(r_ldpc, max(filesize, 1), int(k * r_ldpc), t, thresholds, seed)
        b, k = res.b, res.k
    elif precode == "None":
        b = k
    else:
        raise ParameterError(f"unknown precode {precode!r}")
    from .graph import normalize_n
    n = normalize_n(max(n, s), s)
    stripes = filesize // (b * t) + 1
    return md.Metadata(filename=os.path.basename(filename), filesize=filesize, b=b, k=k,
                       n=n, t=t, s=s, seed=seed, dist=dist, precode=precode,
                       stripes=stripes, redundant_zeros=b * t * stripes - filesize,
                       rsd_c=rsd_c, rsd_delta=rsd_delta).validate()


def _batches(stripes: int, row_bytes: int):
    per = max(1, BATCH_BYTES // max(row_bytes, 1))
    for lo in range(0, stripes, per):
        yield lo, min(stripes, lo + per)


def _user_rows(chunk: bytes, nstripes: int, b: int, t: int) -> np.ndarray:
    """File bytes of ``nstripes`` stripes -> ``(b, nstripes * t)`` rows."""
    buf = np.zeros(nstripes * b * t, dtype=np.uint8)
    buf[:len(chunk)] = np.frombuffer(chunk, dtype=np.uint8)
    return np.ascontiguousarray(buf.reshape(nstripes, b, t).transpose(1, 0, 2)).reshape(b, -1)


def _disk_block(rows: np.ndarray, nstripes: int, t: int) -> np.ndarray:
    """``(per_disk, nstripes * t)`` rows -> on-disk byte order (stripe-major)."""
    return rows.reshape(rows.shape[0], nstripes, t).transpose(1, 0, 2)


def encode_file(path, coding_dir, meta: md.Metadata, workers: int | None = None) -> Code:
    """Encode ``path`` into ``s`` disk files plus metadata under ``coding_dir``."""
    code = Code.from_metadata(meta)
    gen = code.gen
    if not plan_decode(gen, code.check1).user_ok:
        raise DecodeFailure(
            f"graph for seed {meta.seed} cannot decode even without erasures; "
            "choose another seed or more coding symbols")
    coding_dir = Path(coding_dir)
    coding_dir.mkdir(parents=True, exist_ok=True)
    workers = meta.s if workers is None else workers
    t, b, per = meta.t, meta.b, meta.per_disk
    outs = [open(md.disk_path(coding_dir, meta.filename, d), "wb") for d in range(meta.s)]
    try:
        with open(path, "rb") as src:
            for lo, hi in _batches(meta.stripes, (meta.k + meta.n) * t):
                ns = hi - lo
                user = _user_rows(src.read(ns * b * t), ns, b, t)
                buf = encode_stripe(user, gen, code.check1, workers)
                coding = buf[meta.k:]
                for d, fh in enumerate(outs):
                    fh.write(_disk_block(coding[d * per:(d + 1) * per], ns, t).tobytes())
    finally:
        for fh in outs:
            fh.close()
    md.write_metadata(meta, coding_dir)
    return code


def surviving_disks(coding_dir, meta: md.Metadata) -> list[int]:
    """Disks whose file exists with the exact expected size."""
    ok = []
    for d in range(meta.s):
        p = md.disk_path(coding_dir, meta.filename, d)
        try:
            if p.stat().st_size == meta.disk_bytes:
                ok.append(d)
        except OSError:
            pass
    return ok


def load_coding(coding_dir, meta: md.Metadata, lo: int, hi: int, chunks=None) -> np.ndarray:
    """Coding rows for stripes ``[lo, hi)``; rows of ``chunks`` only (others stay zero)."""
    t, per = meta.t, meta.per_disk
    ns = hi - lo
    coding = np.zeros((meta.n, ns * t), dtype=np.uint8)
    by_disk: dict[int, list[int]] = {}
    for c in (range(meta.n) if chunks is None else chunks):
        by_disk.setdefault(c // per, []).append(c % per)
    for d, offs in by_disk.items():
        mm = np.memmap(md.disk_path(coding_dir, meta.filename, d), dtype=np.uint8, mode="r",
                       shape=(meta.stripes, per, t))
        block = np.asarray(mm[lo:hi, offs, :])
        coding[[d * per + o for o in offs]] = block.transpose(1, 0, 2).reshape(len(offs), -1)
        del mm
    return coding


def decode_file(filename: str, coding_dir, workers: int = 1, out_path=None):
    """Rebuild the original file from whatever disk files survive.

    Returns ``(output path, plan)``.
    """
    meta = md.read_metadata(coding_dir, filename)
    code = Code.from_metadata(meta)
    alive = surviving_disks(coding_dir, meta)
    erasures = erasure_set(set(range(meta.s)) - set(alive), meta.n, meta.s)
    plan = plan_decode(code.gen, code.check1, erasures, parallel=workers > 1)
    if not plan.user_ok:
        bad = sorted(f for f in plan.unresolved if f < meta.b)
        raise DecodeFailure(
            f"stripe 0: {len(bad)} user symbols unresolved with disks "
            f"{sorted(set(range(meta.s)) - set(alive))} missing", stripe=0, unresolved=bad)
    out_path = Path(out_path) if out_path else md.decoded_path(coding_dir, meta.filename)
    t, b = meta.t, meta.b
    used = plan.coding_used
    remaining = meta.filesize
    with open(out_path, "wb") as fh:
        for lo, hi in _batches(meta.stripes, (meta.k + meta.n) * t):
            ns = hi - lo
            coding = load_coding(coding_dir, meta, lo, hi, used)
            data = execute_decode(plan, code.gen, code.check1, coding, workers)
            user = data[:b].reshape(b, ns, t).transpose(1, 0, 2).tobytes()
            take = min(remaining, len(user))
            fh.write(user[:take])
            remaining -= take
    return out_path, plan
