"""Local recovery groups over coding symbols and the check-data file.

Columns of the generator matrix are sparsified by pairwise XOR; the
combination that produced each column is tracked so that a column reduced
to a single data symbol yields a data-plus-coding group and a column reduced
to nothing yields a coding-only group.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import FormatError
from .graph import GeneratorMatrix
from .precode import Check1Sets

log = logging.getLogger(__name__)

ORDER_CHECK_2 = True
ORDER_CHECK_3 = True


@dataclass(frozen=True)
class CheckSet:
    """``data_index`` set: D[data_index] = XOR of members.  Unset: members XOR to zero."""

    coding_members: tuple[int, ...]
    data_index: int | None = None

    @property
    def is_check2(self) -> bool:
        return self.data_index is not None

    @property
    def key(self) -> tuple:
        return (self.data_index, frozenset(self.coding_members))

    def __len__(self) -> int:
        return len(self.coding_members)


def check2(data_index: int, members) -> CheckSet:
    return CheckSet(tuple(int(m) for m in members), int(data_index))


def check3(members) -> CheckSet:
    return CheckSet(tuple(int(m) for m in members), None)


def set_xor(*sets) -> frozenset[int]:
    """Symmetric difference of any number of index sets."""
    out: set[int] = set()
    for s in sets:
        out.symmetric_difference_update(s)
    return frozenset(out)


# -- bit packing ------------------------------------------------------------

def pack_columns(columns, nbits: int) -> np.ndarray:
    """One packed uint64 row per index list."""
    words = max(1, -(-nbits // 64))
    out = np.zeros((len(columns), words), dtype=np.uint64)
    for r, col in enumerate(columns):
        col = np.asarray(col, dtype=np.int64)
        if col.size:
            np.bitwise_xor.at(out[r], col // 64, np.left_shift(np.uint64(1), (col % 64).astype(np.uint64)))
    return out


def unpack_row(row: np.ndarray) -> list[int]:
    bits = np.unpackbits(row.view(np.uint8), bitorder="little")
    return np.flatnonzero(bits).tolist()


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).sum(axis=-1, dtype=np.int64)


@dataclass
class CGAResult:
    B: np.ndarray      # packed reduced columns, (n, words(k))
    L: np.ndarray      # packed combination columns, (n, words(n))
    weights: np.ndarray
    k: int
    n: int
    sweeps: int
    heuristic_converged: bool = True
    completed: int = 0  # columns touched by the elimination fallback

    @property
    def zero_columns(self) -> int:
        return int((self.weights == 0).sum())

    @property
    def unit_columns(self) -> int:
        return int((self.weights == 1).sum())

    @property
    def converged(self) -> bool:
        return self.zero_columns == self.n - self.k and self.unit_columns == self.k

    def column(self, j: int) -> list[int]:
        return unpack_row(self.B[j])

    def combination(self, j: int) -> list[int]:
        return [i for i in unpack_row(self.L[j]) if i < self.n]


def _complete(B: np.ndarray, L: np.ndarray, w: np.ndarray, k: int) -> int:
    """Column elimination over the columns the greedy sweep left heavier than one.

    Unit and zero columns are untouched unless a duplicate unit must vanish.
    Returns the number of columns modified.
    """
    touched: set[int] = set()
    pivot_of: dict[int, int] = {}
    for j in np.flatnonzero(w == 1).tolist():
        r = unpack_row(B[j])[0]
        if r in pivot_of:
            B[j] ^= B[pivot_of[r]]
            L[j] ^= L[pivot_of[r]]
            w[j] = 0
            touched.add(j)
        else:
            pivot_of[r] = j
    word = np.arange(k) // 64
    bit = np.left_shift(np.uint64(1), (np.arange(k) % 64).astype(np.uint64))
    heavy = np.flatnonzero(w > 1)
    # strip bits already owned by a unit column
    for j in heavy.tolist():
        for r in unpack_row(B[j]):
            if r in pivot_of:
                B[j] ^= B[pivot_of[r]]
                L[j] ^= L[pivot_of[r]]
                touched.add(j)
    w[heavy] = _popcount(B[heavy])
    for r in range(k):
        if r in pivot_of:
            continue
        rest = np.flatnonzero(w > 1)
        rest = np.concatenate((rest, np.flatnonzero(w == 1)))
        has = rest[(B[rest, word[r]] & bit[r]) != 0]
        free = has[~np.isin(has, list(pivot_of.values()))]
        if free.size == 0:
            continue
        p = int(free[np.argmin(w[free])])
        others = has[has != p]
        B[others] ^= B[p]
        L[others] ^= L[p]
        w[others] = _popcount(B[others])
        touched.update(others.tolist())
        touched.add(p)
        pivot_of[r] = p
    return len(touched)


def cga(gen: GeneratorMatrix, trace=None, complete: bool = True) -> CGAResult:
    """Greedy pairwise column reduction over GF(2).

    Sweeps ``j`` (outer) and ``i`` (inner) in index order; column ``j``
    absorbs column ``i`` whenever ``2 w(j) > w(i)`` and the XOR is lighter
    than column ``j``.  Stops once ``n - k`` columns are zero or a sweep
    changes nothing.  ``trace(j, i, result)`` is called after each update.

    The greedy rule can stall on full-rank matrices; with ``complete`` the
    leftover heavy columns are then finished by column elimination.
    """
    n, k = gen.n, gen.k
    B = pack_columns(gen.columns, k)
    L = pack_columns([[j] for j in range(n)], n)
    w = _popcount(B)
    sweeps = 0
    while int((w == 0).sum()) < n - k:
        sweeps += 1
        changed = False
        for j in range(n):
            i0 = 0
            while w[j] > 0 and i0 < n:
                wj = w[j]
                lim = w[i0:] < 2 * wj
                if j >= i0:
                    lim[j - i0] = False
                cand = np.flatnonzero(lim)
                if cand.size == 0:
                    break
                xw = _popcount(B[i0 + cand] ^ B[j])
                hit = np.flatnonzero(xw < wj)
                if hit.size == 0:
                    break
                i = i0 + int(cand[hit[0]])
                B[j] ^= B[i]
                L[j] ^= L[i]
                w[j] = xw[hit[0]]
                changed = True
                if trace is not None:
                    trace(j, i, CGAResult(B, L, w, k, n, sweeps))
                i0 = i + 1
        if not changed:
            break
    res = CGAResult(B, L, w, k, n, sweeps)
    res.heuristic_converged = res.converged
    if not res.converged:
        log.info("greedy check generation stalled: %d zero and %d unit columns (want %d and %d)",
                 res.zero_columns, res.unit_columns, n - k, k)
        if complete:
            res.completed = _complete(B, L, w, k)
    if not res.converged:
        log.warning("check generation did not converge (rank-deficient generator?)")
    return res


def extract_check_sets(res: CGAResult) -> list[CheckSet]:
    """Unit columns give data-plus-coding groups, zero columns coding-only ones."""
    out = []
    for j in range(res.n):
        wj = int(res.weights[j])
        if wj == 1:
            out.append(check2(res.column(j)[0], res.combination(j)))
        elif wj == 0:
            out.append(check3(res.combination(j)))
    return out


def _dedup(candidates, existing) -> list[CheckSet]:
    seen = {s.key for s in existing}
    out = []
    for c in candidates:
        if len(c) >= 2 and c.key not in seen:
            seen.add(c.key)
            out.append(c)
    return out


def check2_by_data(sets) -> dict[int, CheckSet]:
    """First data-plus-coding group per data symbol."""
    out: dict[int, CheckSet] = {}
    for s in sets:
        if s.is_check2 and s.data_index not in out:
            out[s.data_index] = s
    return out


def derive_checks_degree_one(gen: GeneratorMatrix, sets) -> list[CheckSet]:
    """A coding symbol with a single neighbor equals that data symbol outright."""
    by_data = check2_by_data(sets)
    cands = []
    for j in np.flatnonzero(gen.degrees == 1).tolist():
        d = int(gen.columns[j][0])
        if d in by_data:
            cands.append(check3(sorted(set_xor(by_data[d].coding_members, [j]))))
    return _dedup(cands, sets)


def derive_checks_via_precode(check1: Check1Sets | None, sets) -> list[CheckSet]:
    """Combine the coding groups of every member of each precode group."""
    if check1 is None:
        return []
    by_data = check2_by_data(sets)
    cands = []
    for g in check1.groups:
        if not all(d in by_data for d in g):
            continue
        cands.append(check3(sorted(set_xor(*(by_data[d].coding_members for d in g)))))
    return _dedup(cands, sets)


def order_check_sets(sets, order_check2: bool = ORDER_CHECK_2,
                     order_check3: bool = ORDER_CHECK_3) -> list[CheckSet]:
    """Smallest groups first, per kind; a kind with ordering off keeps its slots."""
    sets = list(sets)
    if order_check2 and order_check3:
        return sorted(sets, key=len)
    out = list(sets)
    for flag, want in ((order_check2, True), (order_check3, False)):
        if not flag:
            continue
        slots = [i for i, s in enumerate(sets) if s.is_check2 == want]
        for i, s in zip(slots, sorted((sets[i] for i in slots), key=len)):
            out[i] = s
    return out


# -- check.data -------------------------------------------------------------

def serialize_checkdata(sets) -> np.ndarray:
    """Flat little-endian int32 image: ``1 d L c...`` or ``0 L c...`` per group."""
    ints: list[int] = []
    for s in sets:
        if s.is_check2:
            ints += [1, s.data_index, len(s.coding_members)]
        else:
            ints += [0, len(s.coding_members)]
        ints += s.coding_members
    return np.array(ints, dtype="<i4")


def parse_checkdata(image, n: int | None = None, k: int | None = None) -> list[CheckSet]:
    if isinstance(image, np.ndarray):
        ints = image.astype("<i4", copy=False)
    else:
        raw = bytes(image)
        if len(raw) % 4:
            raise FormatError("image length is not a multiple of 4", len(raw) - len(raw) % 4)
        ints = np.frombuffer(raw, dtype="<i4")
    vals = ints.tolist()
    out: list[CheckSet] = []
    pos = 0
    total = len(vals)

    def need(count, what):
        if pos + count > total:
            raise FormatError(f"truncated record: missing {what}", 4 * total)

    while pos < total:
        flag = vals[pos]
        start = pos
        pos += 1
        data_index = None
        if flag == 1:
            need(1, "data index")
            data_index = vals[pos]
            pos += 1
            if data_index < 0 or (k is not None and data_index >= k):
                raise FormatError(f"data index {data_index} out of range", 4 * (pos - 1))
        elif flag != 0:
            raise FormatError(f"invalid group flag {flag}", 4 * start)
        need(1, "degree")
        deg = vals[pos]
        pos += 1
        if deg < 1:
            raise FormatError(f"invalid group degree {deg}", 4 * (pos - 1))
        need(deg, "coding indices")
        members = vals[pos:pos + deg]
        for off, c in enumerate(members):
            if c < 0 or (n is not None and c >= n):
                raise FormatError(f"coding index {c} out of range", 4 * (pos + off))
        pos += deg
        out.append(CheckSet(tuple(members), data_index))
    return out


def checkdata_bound(res: CGAResult) -> int:
    """Integers needed if every column became a group: sum of group sizes + k + 2n."""
    sizes = np.bitwise_count(res.L).sum()
    return int(sizes) + res.k + 2 * res.n


def generate_checks(gen: GeneratorMatrix) -> tuple[list[CheckSet], CGAResult]:
    res = cga(gen)
    return order_check_sets(extract_check_sets(res)), res


def runtime_check_sets(sets, gen: GeneratorMatrix, check1: Check1Sets | None) -> list[CheckSet]:
    """Stored groups plus both derived families, smallest first."""
    extra = derive_checks_degree_one(gen, sets)
    extra += derive_checks_via_precode(check1, list(sets) + extra)
    return order_check_sets(list(sets) + extra)


@dataclass
class GenChecksResult:
    path: object
    ints: int
    bound: int
    converged: bool
    stored: int
    derived: int
    meta: object


def gen_checks(filename: str, coding_dir, modify_metadata: bool = False,
               extend_disks: int = 0) -> GenChecksResult:
    """Write ``<name>_check.data`` for an encoded file.

    A non-zero ``extend_disks`` first grows or shrinks the code in the
    metadata; the new disk files appear on the next repair run.
    """
    from . import metadata as md
    from .codec import Code
    from .repair import update_code

    meta = md.read_metadata(coding_dir, filename)
    if extend_disks:
        meta = update_code(meta, extend_disks)
    code = Code.from_metadata(meta)
    sets, res = generate_checks(code.gen)
    image = serialize_checkdata(sets)
    path = md.check_path(coding_dir, meta.filename)
    path.write_bytes(image.tobytes())
    if modify_metadata or extend_disks:
        meta = meta.with_(checks_converged=int(res.converged))
        if modify_metadata:
            meta = meta.with_(checkdata_ints=len(image))
        md.write_metadata(meta, coding_dir)
    derived = len(runtime_check_sets(sets, code.gen, code.check1)) - len(sets)
    return GenChecksResult(path, len(image), checkdata_bound(res), res.converged,
                           len(sets), derived, meta)
