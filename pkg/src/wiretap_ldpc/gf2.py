"""Exact GF(2) triangularization of sparse parity-check matrices.

Gaussian elimination with greedy minimum-weight pivoting keeps fill-in low
on LDPC matrices.  The result is a column permutation and row set putting
the parity-check matrix in the form [A, B] with B lower-triangular
(unit diagonal), which gives a linear-time encoder by forward substitution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .tanner import TannerGraph

RANK_DEFICIENCY_LIMIT = 0.01


class DegenerateGraphError(ValueError):
    """Sampled graph cannot support the requested triangular form."""


@dataclass
class TriangularizedCode:
    """Row-reduced parity checks of a Tanner graph, split as H' = [A, B].

    column_perm[j] is the original variable index occupying permuted
    position j; the first n_info positions carry the information bits
    (message positions first), the rest the parity bits.  A and B are CSR
    over the n_parity output rows; B omits its unit diagonal.
    """

    graph: TannerGraph
    column_perm: np.ndarray
    n_info: int
    n_dropped_rows: int
    a_indptr: np.ndarray
    a_indices: np.ndarray
    b_indptr: np.ndarray
    b_indices: np.ndarray

    @property
    def n_total(self) -> int:
        return self.graph.n_var

    @property
    def n_parity(self) -> int:
        return self.n_total - self.n_info

    def inverse_perm(self) -> np.ndarray:
        inv = np.empty(self.n_total, dtype=np.int64)
        inv[self.column_perm] = np.arange(self.n_total)
        return inv

    def b_dense(self) -> np.ndarray:
        """Dense B including the diagonal; for tests on small codes."""
        r = self.n_parity
        b = np.eye(r, dtype=np.uint8)
        for i in range(r):
            for t in range(self.b_indptr[i], self.b_indptr[i + 1]):
                b[i, self.b_indices[t]] ^= 1
        return b

    def a_dense(self) -> np.ndarray:
        r = self.n_parity
        a = np.zeros((r, self.n_info), dtype=np.uint8)
        for i in range(r):
            for t in range(self.a_indptr[i], self.a_indptr[i + 1]):
                a[i, self.a_indices[t]] ^= 1
        return a


def triangularize(graph: TannerGraph, message_positions) -> TriangularizedCode:
    """Put the graph's parity checks in [A, B] form with B lower-triangular.

    message_positions (original variable indices) are pinned to the first
    columns of A and never pivoted.  Dependent rows are dropped (raising
    the information length); more than 1% dropped rows, or an independent
    row supported only on message positions, raises DegenerateGraphError.
    """
    m = graph.n_var
    message_positions = np.asarray(list(message_positions), dtype=np.int64)
    if len(np.unique(message_positions)) != len(message_positions):
        raise ValueError("message positions must be distinct")
    if message_positions.size and (
        message_positions.min() < 0 or message_positions.max() >= m
    ):
        raise ValueError("message position out of range")
    is_message = np.zeros(m, dtype=bool)
    is_message[message_positions] = True

    rows: list[set[int]] = []
    for adj in graph.chk_adj:
        s: set[int] = set()
        for v in adj.tolist():
            s.symmetric_difference_update((v,))
        rows.append(s)

    col_rows: list[set[int]] = [set() for _ in range(m)]
    weight = np.zeros(m, dtype=np.int64)
    for r, s in enumerate(rows):
        for c in s:
            col_rows[c].add(r)
            weight[c] += 1

    # selection key: true weight for eligible pivot columns, else sentinel
    SENTINEL = np.iinfo(np.int64).max
    eligible = ~is_message
    key = np.where(eligible & (weight > 0), weight, SENTINEL)

    active = np.ones(len(rows), dtype=bool)
    pivot_rows: list[int] = []
    pivot_cols: list[int] = []

    def _bump(col: int, delta: int):
        w = weight[col] + delta
        weight[col] = w
        if eligible[col]:
            key[col] = w if w > 0 else SENTINEL

    while True:
        c = int(np.argmin(key))
        if key[c] == SENTINEL:
            break
        cand = col_rows[c]
        p = min(cand, key=lambda r: len(rows[r]))
        targets = [r for r in cand if r != p]
        rp = rows[p]
        for q in targets:
            rq = rows[q]
            for col in rp:
                if col in rq:
                    rq.remove(col)
                    col_rows[col].discard(q)
                    _bump(col, -1)
                else:
                    rq.add(col)
                    col_rows[col].add(q)
                    _bump(col, +1)
        # retire the pivot row, then the pivot column
        for col in rp:
            col_rows[col].discard(p)
            _bump(col, -1)
        eligible[c] = False
        key[c] = SENTINEL
        active[p] = False
        pivot_rows.append(p)
        pivot_cols.append(c)

    n_dropped = 0
    for r in np.flatnonzero(active):
        if rows[r]:
            raise DegenerateGraphError(
                "independent parity check supported only on message positions; "
                "resample the graph or choose other message positions"
            )
        n_dropped += 1
    if n_dropped > RANK_DEFICIENCY_LIMIT * len(rows) and n_dropped > 1:
        raise DegenerateGraphError(
            f"{n_dropped} dependent rows out of {len(rows)} exceeds the "
            f"{RANK_DEFICIENCY_LIMIT:.0%} rank-deficiency limit"
        )

    n_parity = len(pivot_rows)
    n_info = m - n_parity
    if message_positions.size > n_info:
        raise DegenerateGraphError("more message positions than information bits")

    # permuted order: message cols, leftover cols, pivot cols reversed
    leftover = np.flatnonzero(~is_message)
    in_pivot = np.zeros(m, dtype=bool)
    in_pivot[pivot_cols] = True
    leftover = leftover[~in_pivot[leftover]]
    column_perm = np.concatenate(
        [message_positions, leftover, np.array(pivot_cols[::-1], dtype=np.int64)]
    )
    col_rank = np.empty(m, dtype=np.int64)
    col_rank[column_perm] = np.arange(m)

    a_indptr = np.zeros(n_parity + 1, dtype=np.int64)
    b_indptr = np.zeros(n_parity + 1, dtype=np.int64)
    a_idx: list[np.ndarray] = []
    b_idx: list[np.ndarray] = []
    for i, p in enumerate(pivot_rows[::-1]):
        cols = col_rank[np.fromiter(rows[p], dtype=np.int64, count=len(rows[p]))]
        a_part = np.sort(cols[cols < n_info])
        b_part = np.sort(cols[cols >= n_info]) - n_info
        b_part = b_part[b_part != i]  # diagonal is implicit
        if b_part.size and b_part.max() > i:
            raise AssertionError("triangular structure violated")
        a_idx.append(a_part)
        b_idx.append(b_part)
        a_indptr[i + 1] = a_indptr[i] + len(a_part)
        b_indptr[i + 1] = b_indptr[i] + len(b_part)

    return TriangularizedCode(
        graph=graph,
        column_perm=column_perm,
        n_info=n_info,
        n_dropped_rows=n_dropped,
        a_indptr=a_indptr,
        a_indices=(
            np.concatenate(a_idx).astype(np.int64) if a_idx else np.empty(0, np.int64)
        ),
        b_indptr=b_indptr,
        b_indices=(
            np.concatenate(b_idx).astype(np.int64) if b_idx else np.empty(0, np.int64)
        ),
    )


@njit(cache=True)
def _forward_substitute(a_indptr, a_indices, b_indptr, b_indices, u, e):
    for i in range(e.shape[0]):
        acc = 0
        for t in range(a_indptr[i], a_indptr[i + 1]):
            acc ^= u[a_indices[t]]
        for t in range(b_indptr[i], b_indptr[i + 1]):
            acc ^= e[b_indices[t]]
        e[i] = acc


def encode(code: TriangularizedCode, info_bits) -> np.ndarray:
    """Extend info bits to a full codeword (permuted order) satisfying H.

    Solves B e = A u by forward substitution; cost is linear in the
    nonzeros of A and B.
    """
    u = np.ascontiguousarray(np.asarray(info_bits, dtype=np.uint8) & 1)
    if u.shape != (code.n_info,):
        raise ValueError(f"expected {code.n_info} information bits, got {u.shape}")
    e = np.zeros(code.n_parity, dtype=np.uint8)
    _forward_substitute(
        code.a_indptr, code.a_indices, code.b_indptr, code.b_indices, u, e
    )
    return np.concatenate([u, e])


def parity_violations(graph: TannerGraph, bits_original_order: np.ndarray) -> int:
    """Number of unsatisfied checks; independent GF(2) product check."""
    x = np.asarray(bits_original_order, dtype=np.uint8) & 1
    bad = 0
    for adj in graph.chk_adj:
        if x[adj].sum() & 1:
            bad += 1
    return int(bad)


def codeword_in_original_order(code: TriangularizedCode, permuted_bits) -> np.ndarray:
    x = np.empty(code.n_total, dtype=np.uint8)
    x[code.column_perm] = np.asarray(permuted_bits, dtype=np.uint8) & 1
    return x
