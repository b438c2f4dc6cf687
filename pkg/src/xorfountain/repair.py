"""Chunk repair (check-based or decode-and-re-encode) and code updates."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import metadata as md
from .checks import CheckSet, parse_checkdata, runtime_check_sets
from .codec import (Code, _batches, _disk_block, encode_symbols, execute_decode, load_coding,
                    plan_decode, surviving_disks)
from .errors import FormatError, ParameterError, RepairFailure
from .graph import erasure_set

log = logging.getLogger(__name__)


class Sym(NamedTuple):
    kind: str  # "C" coding, "D" data
    index: int


@dataclass(frozen=True)
class Step:
    target: Sym
    via: int                     # index into RepairPlan.sets
    inputs: tuple[Sym, ...]      # the other members of the group
    level: int                   # steps of one level are independent


@dataclass
class RepairPlan:
    targets: frozenset[int]
    steps: list[Step]
    fallback: bool
    sets: list[CheckSet] = field(repr=False, default_factory=list)

    @property
    def reads(self) -> list[int]:
        """Surviving coding chunks the plan touches (each counted once)."""
        resolved = {s.target for s in self.steps}
        return sorted({m.index for s in self.steps for m in s.inputs
                       if m.kind == "C" and m not in resolved})


def _members(cs: CheckSet) -> list[Sym]:
    out = [Sym("C", c) for c in cs.coding_members]
    if cs.is_check2:
        out.append(Sym("D", cs.data_index))
    return out


def plan_fast_repair(targets, sets, survivors, k: int) -> RepairPlan:
    """Peel the ordered groups, one unknown at a time, until the targets are known.

    Unknowns are the targets, every coding chunk outside ``survivors`` and all
    ``k`` data symbols.  Among the groups that currently have a single
    unknown, the one adding the fewest not-yet-read chunks goes first (ties
    keep the stored smallest-first order).  Steps no target depends on are
    dropped.
    """
    targets = frozenset(int(t) for t in targets)
    sets = list(sets)
    if not targets:
        return RepairPlan(targets, [], False, sets)
    survivors = set(int(s) for s in survivors)
    members = [_members(cs) for cs in sets]
    unknown = {Sym("D", d) for d in range(k)}
    for mem in members:
        unknown.update(m for m in mem if m.kind == "C" and m.index not in survivors)
    unknown.update(Sym("C", t) for t in targets)
    touching: dict[Sym, list[int]] = {}
    for idx, mem in enumerate(members):
        for m in mem:
            touching.setdefault(m, []).append(idx)
    n_unknown = np.array([sum(m in unknown for m in mem) for mem in members], dtype=np.int64)
    new_reads = np.array([len(mem) for mem in members], dtype=np.int64) - n_unknown
    never = np.iinfo(np.int64).max
    read: set[Sym] = set()
    level_of: dict[Sym, int] = {}
    steps: list[Step] = []
    open_targets = set(targets)
    while open_targets:
        cost = np.where(n_unknown == 1, new_reads, never)
        idx = int(np.argmin(cost))
        if cost[idx] == never:
            break
        mem = members[idx]
        tgt = next(m for m in mem if m in unknown)
        inputs = tuple(m for m in mem if m != tgt)
        lvl = 1 + max((level_of.get(m, -1) for m in inputs), default=-1)
        unknown.discard(tgt)
        level_of[tgt] = lvl
        steps.append(Step(tgt, idx, inputs, lvl))
        for j in touching[tgt]:
            n_unknown[j] -= 1
        for m in inputs:
            if m.kind == "C" and m not in level_of and m not in read:
                read.add(m)
                for j in touching[m]:
                    new_reads[j] -= 1
        if tgt.kind == "C":
            open_targets.discard(tgt.index)
    need = {Sym("C", t) for t in targets}
    kept = []
    for st in reversed(steps):
        if st.target in need:
            kept.append(st)
            need.update(st.inputs)
    kept.reverse()
    return RepairPlan(targets, kept, bool(open_targets), sets)


@dataclass
class RepairReport:
    mode: str                    # "fast", "conventional" or "none"
    targets: tuple[int, ...]
    disks: tuple[int, ...]
    bytes_read: int
    bytes_written: int
    seconds: float = 0.0
    bytes_needed: int | None = None  # conventional: chunks the decode path actually uses
    provenance: dict[int, str] = field(default_factory=dict, repr=False)

    @property
    def speed_mb_s(self) -> float:
        return self.bytes_written / 1e6 / self.seconds if self.seconds > 0 else float("inf")


def _write_disks(coding_dir, meta, disks, rows_for_batch):
    """Write whole disk files; ``rows_for_batch(lo, hi)`` -> {coding id: row}."""
    per, t = meta.per_disk, meta.t
    handles = {d: open(md.disk_path(coding_dir, meta.filename, d), "wb") for d in disks}
    try:
        for lo, hi in _batches(meta.stripes, (meta.k + meta.n) * t):
            rows = rows_for_batch(lo, hi)
            for d, fh in handles.items():
                block = np.stack([rows[d * per + o] for o in range(per)])
                fh.write(_disk_block(block, hi - lo, t).tobytes())
    finally:
        for fh in handles.values():
            fh.close()


def run_fast_plan(plan: RepairPlan, coding: np.ndarray, k: int, workers: int = 1) -> dict[int, np.ndarray]:
    """Execute ``plan`` on loaded coding rows; returns restored target rows."""
    width = coding.shape[1]
    values: dict[Sym, np.ndarray] = {}

    def get(m: Sym) -> np.ndarray:
        return values[m] if m in values else coding[m.index]

    def solve(st: Step):
        acc = np.zeros(width, dtype=np.uint8)
        for m in st.inputs:
            np.bitwise_xor(acc, get(m), out=acc)
        return st.target, acc

    levels: dict[int, list[Step]] = {}
    for st in plan.steps:
        levels.setdefault(st.level, []).append(st)
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for lvl in sorted(levels):
            batch = levels[lvl]
            results = pool.map(solve, batch) if pool and len(batch) > 1 else map(solve, batch)
            for tgt, val in results:
                values[tgt] = val
    finally:
        if pool:
            pool.shutdown()
    return {t: values[Sym("C", t)] for t in plan.targets}


def load_check_sets(coding_dir, meta: md.Metadata, code: Code) -> list[CheckSet] | None:
    path = md.check_path(coding_dir, meta.filename)
    if not path.exists():
        return None
    try:
        stored = parse_checkdata(path.read_bytes(), n=meta.n, k=meta.k)
    except FormatError as exc:
        log.warning("ignoring unreadable %s: %s", path, exc)
        return None
    return runtime_check_sets(stored, code.gen, code.check1)


def fast_repair(coding_dir, meta, code, targets, sets, workers=1, write=True):
    """Returns a report, or None when the groups cannot reach every target."""
    alive = [c for c in range(meta.n) if c not in targets]
    plan = plan_fast_repair(targets, sets, alive, meta.k)
    if plan.fallback:
        return None
    reads = plan.reads
    disks = sorted({c // meta.per_disk for c in targets})

    def rows(lo, hi):
        coding = load_coding(coding_dir, meta, lo, hi, reads)
        return run_fast_plan(plan, coding, meta.k, workers)

    if write:
        _write_disks(coding_dir, meta, disks, rows)
    via = {st.target.index: st.via for st in plan.steps if st.target.kind == "C"}
    prov = {t: f"group {via[t]}" for t in plan.targets}
    scale = meta.t * meta.stripes
    return RepairReport("fast", tuple(sorted(targets)), tuple(disks), len(reads) * scale,
                        len(targets) * scale, provenance=prov)


def conventional_repair(coding_dir, meta, code, targets, workers=1, write=True) -> RepairReport:
    """Decode everything, then re-encode only the lost columns.

    The decoder is fed every surviving chunk, and that is what ``bytes_read``
    counts; ``bytes_needed`` is the subset its peeling path consumed.
    """
    targets = sorted(targets)
    scale = meta.t * meta.stripes
    if not targets:
        return RepairReport("conventional", (), (), 0, 0)
    plan = plan_decode(code.gen, code.check1, frozenset(targets), parallel=workers > 1)
    if plan.unresolved:
        raise RepairFailure(f"cannot decode with {len(targets)} chunks missing; "
                            f"{len(plan.unresolved)} data symbols unresolved")
    lost = set(targets)
    survivors = [c for c in range(meta.n) if c not in lost]
    disks = sorted({c // meta.per_disk for c in targets})

    def rows(lo, hi):
        coding = load_coding(coding_dir, meta, lo, hi, survivors)
        data = execute_decode(plan, code.gen, code.check1, coding, workers)
        fresh = encode_symbols(data, code.gen, workers, columns=targets)
        return dict(zip(targets, fresh))

    if write:
        _write_disks(coding_dir, meta, disks, rows)
    return RepairReport("conventional", tuple(targets), tuple(disks), len(survivors) * scale,
                        len(targets) * scale, provenance={t: "decode" for t in targets},
                        bytes_needed=len(plan.coding_used) * scale)


def execute_repair(filename: str, coding_dir, workers: int | None = None,
                   mode: str = "auto") -> RepairReport:
    """Restore every missing or wrong-sized disk file.

    ``mode`` is ``auto`` (groups when available, else decode), ``fast`` or
    ``conventional``.
    """
    meta = md.read_metadata(coding_dir, filename)
    code = Code.from_metadata(meta)
    alive = surviving_disks(coding_dir, meta)
    lost = sorted(set(range(meta.s)) - set(alive))
    targets = erasure_set(lost, meta.n, meta.s)
    if not targets:
        return RepairReport("none", (), (), 0, 0)
    workers = len(targets) if workers is None else workers
    workers = max(1, min(workers, 64))
    start = time.perf_counter()
    report = None
    if mode in ("auto", "fast"):
        sets = load_check_sets(coding_dir, meta, code)
        if sets is not None:
            report = fast_repair(coding_dir, meta, code, targets, sets, workers)
        if report is None:
            if mode == "fast":
                raise RepairFailure("check groups cannot repair this failure pattern")
            log.info("falling back to conventional repair")
    if report is None:
        report = conventional_repair(coding_dir, meta, code, targets, workers)
    report.seconds = time.perf_counter() - start
    return report


def update_code(meta: md.Metadata, extend_disks: int) -> md.Metadata:
    """Grow (or shrink) the code by whole disks; existing chunks stay valid.

    Disk ``i`` always draws its columns from ``seed + i``, so the first
    ``min(s, s')`` disks keep their columns.
    """
    e = int(extend_disks)
    if e <= -meta.s:
        raise ParameterError(f"cannot remove {-e} of {meta.s} disks")
    if e == 0:
        return meta
    return meta.with_(n=meta.n + e * meta.per_disk, s=meta.s + e).validate()
