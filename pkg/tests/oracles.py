"""Reference implementations the package is checked against.

Each one is written from the definition, slow and obvious, with no imports
from the package under test.
"""
from __future__ import annotations

import numpy as np


def lcg_reference(state: int, draws: int) -> list[int]:
    out = []
    for _ in range(draws):
        state = (1103515245 * state + 12345) % 2**31
        out.append(state)
    return out


def lpf_trial_division(k: int) -> int:
    best, d = 1, 2
    while k > 1:
        while k % d == 0:
            best, k = d, k // d
        d += 1
    return best


def array_ldpc_reference(b: int, k: int) -> np.ndarray:
    """Incidence (k x (k-b)) from a direct reading of the array-code loop."""
    p = lpf_trial_division(k)
    kp = k // p
    jp = kp - b // p
    H = np.zeros((k, k - b), dtype=np.uint8)
    for j in range(jp):
        for i in range(p):
            col = i + j * p
            for m in range(1, kp - jp + 1):
                idx = kp * p - (jp - j + m - 1) * p - ((m * (jp - j - 1) - i - 1) % p) - 1
                H[idx, col] = 1
            H[b + col, col] = 1
    return H


def gf2_rank(M: np.ndarray) -> int:
    A = (np.asarray(M) & 1).astype(np.uint8).copy()
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = np.flatnonzero(A[r:, c])
        if piv.size == 0:
            continue
        p = r + piv[0]
        A[[r, p]] = A[[p, r]]
        below = np.flatnonzero(A[:, c])
        below = below[below != r]
        A[below] ^= A[r]
        r += 1
        if r == rows:
            break
    return r


def gf2_solve(G: np.ndarray, y: np.ndarray) -> np.ndarray | None:
    """Solve x G = y over GF(2) for bytes.

    ``G`` is k x m (0/1), ``y`` is m x w (uint8 rows).  Returns x (k x w) when
    the solution is unique, else None.
    """
    G = (np.asarray(G) & 1).astype(np.uint8)
    k, m = G.shape
    if gf2_rank(G) < k:
        return None
    # rows of the system: for each column c, XOR_{d: G[d,c]} x_d = y_c
    A = G.T.copy()
    Y = np.asarray(y, dtype=np.uint8).copy()
    r = 0
    for c in range(k):
        piv = np.flatnonzero(A[r:, c])
        p = r + piv[0]
        A[[r, p]] = A[[p, r]]
        Y[[r, p]] = Y[[p, r]]
        for q in np.flatnonzero(A[:, c]):
            if q != r:
                A[q] ^= A[r]
                Y[q] ^= Y[r]
        r += 1
    return Y[:k]


def xor_encode(columns, data: np.ndarray) -> np.ndarray:
    """Coding row j = XOR of data rows in ``columns[j]``, one at a time."""
    out = np.zeros((len(columns), data.shape[1]), dtype=np.uint8)
    for j, col in enumerate(columns):
        for d in col:
            out[j] ^= data[d]
    return out


def peel_reference(columns, k: int, erased) -> set[int]:
    """Textbook peeling on the surviving columns; returns unresolved data ids."""
    live = [set(int(x) for x in c) for j, c in enumerate(columns) if j not in erased]
    known: set[int] = set()
    changed = True
    while changed:
        changed = False
        for c in live:
            rest = c - known
            if len(rest) == 1:
                known |= rest
                changed = True
    return set(range(k)) - known


def group_peel_reference(groups, known) -> set[int]:
    """Peel parity groups (each XORs to zero); returns the still unknown ids."""
    known = set(known)
    universe = {x for g in groups for x in g}
    changed = True
    while changed:
        changed = False
        for g in groups:
            rest = set(g) - known
            if len(rest) == 1:
                known |= rest
                changed = True
    return universe - known


def xor_rows(rows) -> np.ndarray:
    rows = list(rows)
    acc = np.zeros_like(rows[0])
    for r in rows:
        acc = acc ^ r
    return acc


def two_pass_content_decode(columns, groups, k: int, coding: np.ndarray, erased):
    """Peel the coding rows to a fixpoint, then the parity groups once to a fixpoint.

    Works on contents: every recovered row is an actual XOR.  Returns
    ``(data rows, known mask)``.
    """
    data = np.zeros((k, coding.shape[1]), dtype=np.uint8)
    known = np.zeros(k, dtype=bool)
    live = [j for j in range(len(columns)) if j not in erased]
    changed = True
    while changed:
        changed = False
        for j in live:
            rest = [d for d in columns[j] if not known[d]]
            if len(rest) == 1:
                acc = coding[j].copy()
                for d in columns[j]:
                    if d != rest[0]:
                        acc ^= data[d]
                data[rest[0]] = acc
                known[rest[0]] = True
                changed = True
    changed = True
    while changed:
        changed = False
        for g in groups:
            rest = [d for d in g if not known[d]]
            if len(rest) == 1:
                data[rest[0]] = xor_rows(data[d] for d in g if d != rest[0])
                known[rest[0]] = True
                changed = True
    return data, known
