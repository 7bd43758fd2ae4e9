"""Constraint matrix construction and linear algebra over GF(256).

A constraint matrix has L columns and three kinds of rows, stored in this
order: S LDPC rows (binary, circulant construction plus an identity block
and two PI-column entries each), H HDPC rows (octet entries, the MT*GAMMA
product plus an identity block), and one binary LT row per encoding symbol.
Construction follows RFC 6330 section 5.3.3.3 in additive (XOR) form, so
arbitrary S values are well defined; for the standard parameter space the
result is bit-identical to the RFC's assignment form.

``solve``/``rank`` run deterministic Gaussian elimination (lowest-index
pivot row, then lowest-index column). ``method="dense"`` is the reference
octet-by-octet path; ``method="hybrid"`` (the ``auto`` choice) bit-packs
the binary rows first and produces identical ranks and solutions faster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .codeparams import tuple_gen

LDPC, HDPC, LT = 0, 1, 2


@dataclass
class ConstraintMatrix:
    rows: np.ndarray        # (R, L) uint8
    row_kinds: np.ndarray   # (R,) uint8, values in {LDPC, HDPC, LT}

    def __post_init__(self):
        self.rows = np.ascontiguousarray(self.rows, dtype=np.uint8)
        self.row_kinds = np.ascontiguousarray(self.row_kinds, dtype=np.uint8)
        if self.rows.ndim != 2 or self.row_kinds.shape != (self.rows.shape[0],):
            raise ValueError("rows must be (R, L) with one kind tag per row")
        binary = self.rows[self.row_kinds != HDPC]
        if binary.size and binary.max() > 1:
            raise ValueError("LDPC and LT rows must be binary")

    @property
    def dims(self):
        return self.rows.shape


@dataclass
class SingularReport:
    rank: int


def build_ldpc_rows(params):
    """S binary rows: circulant block, I_S, and the two PI entries per row."""
    return _kernels.build_ldpc_rows_kernel(
        params.S, params.B, params.W, params.P, params.L)


def build_hdpc_rows(params):
    """H octet rows: MT*GAMMA built by right-to-left column recurrence, plus I_H.

    When H == 1 both MT entries of a column land on the same row and
    cancel, the natural limit of the construction.
    """
    return _kernels.build_hdpc_rows_kernel(
        params.H, params.K_prime + params.S, params.L)


def build_lt_row(params, tup):
    """Binary row selecting the tuple's LT-column walk and PI-column walk."""
    w, p, p1, l = params.W, params.P, params.P1, params.L
    row = np.zeros(l, dtype=np.uint8)
    d, a, b, d1, a1, b1 = tup
    row[b] ^= 1
    for _ in range(d - 1):
        b = (b + a) % w
        row[b] ^= 1
    while b1 >= p:
        b1 = (b1 + a1) % p1
    row[w + b1] ^= 1
    for _ in range(d1 - 1):
        b1 = (b1 + a1) % p1
        while b1 >= p:
            b1 = (b1 + a1) % p1
        row[w + b1] ^= 1
    return row


def build_constraint_matrix(params, isis):
    """LDPC rows, HDPC rows, then one LT row per internal symbol id."""
    isis = np.asarray(list(isis), dtype=np.int64)
    lt = np.zeros((len(isis), params.L), dtype=np.uint8)
    _kernels.fill_lt_rows_dense(lt, 0, isis, params.J, params.W,
                                params.P, params.P1)
    rows = np.concatenate([build_ldpc_rows(params), build_hdpc_rows(params), lt])
    kinds = np.concatenate([
        np.full(params.S, LDPC, np.uint8),
        np.full(params.H, HDPC, np.uint8),
        np.full(len(isis), LT, np.uint8),
    ])
    return ConstraintMatrix(rows=rows, row_kinds=kinds)


def _run_hybrid(matrix, rhs, want_solution):
    rows, kinds = matrix.rows, matrix.row_kinds
    cols = rows.shape[1]
    binary_mask = kinds != HDPC
    nwords = max((cols + 63) // 64, 1)
    binp = _kernels.pack_binary_rows(rows[binary_mask], nwords)
    hdpc = rows[~binary_mask].copy()
    brhs = np.ascontiguousarray(rhs[binary_mask])
    hrhs = np.ascontiguousarray(rhs[~binary_mask])
    return _kernels.hybrid_solve(binp, brhs, hdpc, hrhs, cols, want_solution)


def rank(matrix, method="auto"):
    """Rank over GF(256)."""
    rows = matrix.rows
    if rows.shape[0] == 0:
        return 0
    empty = np.zeros((rows.shape[0], 0), dtype=np.uint8)
    if method == "dense":
        r, _ = _kernels.dense_solve(rows.copy(), empty)
        return int(r)
    r, _, _ = _run_hybrid(matrix, empty, False)
    return int(r)


def solve(matrix, rhs, method="auto", with_ops=False):
    """Solve matrix * C = rhs; the unique C when full rank, else SingularReport.

    rhs is one symbol payload per row, all the same length. A (rows,
    width) uint8 array works too and gets the solution back as a
    (columns, width) array instead of a list. with_ops=True returns a
    (result, ops) pair where ops counts byte-level row operations.
    """
    rows = matrix.rows
    n, cols = rows.shape
    if len(rhs) != n:
        raise ValueError("need one right-side symbol per row (%d != %d)" % (len(rhs), n))
    if n < cols:
        raise ValueError("underdetermined system: %d rows < %d columns" % (n, cols))
    as_array = isinstance(rhs, np.ndarray)
    if as_array:
        if rhs.ndim != 2 or rhs.dtype != np.uint8:
            raise ValueError("array right side must be a 2-d uint8 array")
        d = rhs.copy()
    else:
        widths = {len(x) for x in rhs}
        if len(widths) > 1:
            raise ValueError("right-side symbols must share one length")
        width = widths.pop() if widths else 0
        if n and width:
            d = np.frombuffer(b"".join(bytes(x) for x in rhs),
                              dtype=np.uint8).reshape(n, width).copy()
        else:
            d = np.zeros((n, width), dtype=np.uint8)

    if method == "dense":
        a = rows.copy()
        r, ops = _kernels.dense_solve(a, d)
        sol = d
    elif method in ("auto", "hybrid"):
        r, ops, sol = _run_hybrid(matrix, d, True)
    else:
        raise ValueError("unknown solve method %r" % (method,))
    if r < cols:
        result = SingularReport(rank=int(r))
    elif as_array:
        result = sol[:cols].copy()
    else:
        result = [sol[i].tobytes() for i in range(cols)]
    return (result, int(ops)) if with_ops else result
