"""Compiled inner loops for matrix construction and elimination.

Two solver kernels share the work:

``dense_solve`` is the reference path: plain Gaussian elimination over
GF(256) on the full octet matrix, lowest-index pivot row then lowest-index
column, with back-substitution when the system is full rank.

``hybrid_solve`` is the production path for large trial volumes. Binary
rows (LDPC + LT) are bit-packed into 64-bit words and reduced by a packed
Gauss-Jordan pass; HDPC rows are then reduced against those pivots (cheap,
because Jordan pivot rows only carry their own pivot column plus free
columns) and finished by a small dense octet elimination. Ranks and
solutions are identical to ``dense_solve`` by construction - the two paths
are cross-checked in the test suite.

Both kernels report an operation count: the number of byte-level row
operations performed, a deterministic decode-cost measure used by the
simulation reports (wall-clock time is measured separately and never feeds
deterministic output).
"""

import numpy as np
from numba import njit

from .fieldmath import INV_TABLE, MUL_TABLE, OCT_EXP
from .tables import DEGREE_TABLE, V0, V1, V2, V3

_DEBRUIJN_MULT = np.uint64(0x03F79D71B4CB0A89)
_DEBRUIJN_TABLE = np.array([
    0, 1, 48, 2, 57, 49, 28, 3, 61, 58, 50, 42, 38, 29, 17, 4,
    62, 55, 59, 36, 53, 51, 43, 22, 45, 39, 33, 30, 24, 18, 12, 5,
    63, 47, 56, 27, 60, 41, 37, 16, 54, 35, 52, 21, 44, 32, 23, 11,
    46, 26, 40, 15, 34, 20, 31, 10, 25, 14, 19, 9, 13, 8, 7, 6,
], dtype=np.uint8)


@njit(cache=True, inline="always")
def _bit_index(lsb):
    return _DEBRUIJN_TABLE[(lsb * _DEBRUIJN_MULT) >> np.uint64(58)]


@njit(cache=True)
def dense_solve(a, d):
    """In-place GF(256) elimination of a (R, L) system with (R, T) right side.

    Returns (rank, ops). When rank == L the first L rows of d hold the
    unique solution and a is reduced to the identity on its pivot columns.
    """
    rows, cols = a.shape
    width = d.shape[1]
    ops = 0
    r = 0
    for c in range(cols):
        pivot = -1
        for i in range(r, rows):
            if a[i, c]:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != r:
            for j in range(cols):
                tmp = a[r, j]
                a[r, j] = a[pivot, j]
                a[pivot, j] = tmp
            for t in range(width):
                tmp = d[r, t]
                d[r, t] = d[pivot, t]
                d[pivot, t] = tmp
        v = a[r, c]
        if v != 1:
            inv = INV_TABLE[v]
            for j in range(c, cols):
                a[r, j] = MUL_TABLE[inv, a[r, j]]
            for t in range(width):
                d[r, t] = MUL_TABLE[inv, d[r, t]]
            ops += (cols - c) + width
        for i in range(r + 1, rows):
            f = a[i, c]
            if f:
                if f == 1:
                    for j in range(c, cols):
                        a[i, j] ^= a[r, j]
                    for t in range(width):
                        d[i, t] ^= d[r, t]
                else:
                    for j in range(c, cols):
                        a[i, j] ^= MUL_TABLE[f, a[r, j]]
                    for t in range(width):
                        d[i, t] ^= MUL_TABLE[f, d[r, t]]
                ops += (cols - c) + width
        r += 1
        if r == rows:
            break
    if r == cols:
        # full rank: pivots sit on the diagonal, clear the upper triangle
        for rr in range(cols - 1, 0, -1):
            for i in range(rr):
                f = a[i, rr]
                if f:
                    a[i, rr] = 0
                    if f == 1:
                        for t in range(width):
                            d[i, t] ^= d[rr, t]
                    else:
                        for t in range(width):
                            d[i, t] ^= MUL_TABLE[f, d[rr, t]]
                    ops += 1 + width
    return r, ops


@njit(cache=True)
def hybrid_solve(binp, brhs, hdpc, hrhs, cols, want_solution):
    """Packed-binary + octet elimination; see module docstring.

    binp: (Rb, nwords) uint64 packed binary rows (modified)
    brhs: (Rb, T) uint8 right side of the binary rows (modified)
    hdpc: (Hh, cols) uint8 octet rows (modified)
    hrhs: (Hh, T) uint8 (modified)

    Returns (rank, ops, c) with c the (cols, T) solution when
    want_solution and the system is full rank, else zeros.
    """
    rb_rows = binp.shape[0]
    nwords = binp.shape[1]
    h_rows = hdpc.shape[0]
    width = brhs.shape[1]
    ops = 0

    piv_col = np.full(rb_rows, -1, np.int64)
    rb = 0
    for c in range(cols):
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        pivot = -1
        for i in range(rb, rb_rows):
            if binp[i, w] & bit:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != rb:
            for k in range(nwords):
                tmpw = binp[rb, k]
                binp[rb, k] = binp[pivot, k]
                binp[pivot, k] = tmpw
            for t in range(width):
                tmpb = brhs[rb, t]
                brhs[rb, t] = brhs[pivot, t]
                brhs[pivot, t] = tmpb
        for i in range(rb_rows):
            if i != rb and (binp[i, w] & bit):
                for k in range(nwords):
                    binp[i, k] ^= binp[rb, k]
                for t in range(width):
                    brhs[i, t] ^= brhs[rb, t]
                ops += nwords * 8 + width
        piv_col[rb] = c
        rb += 1
        if rb == rb_rows:
            break

    # Reduce HDPC rows against the binary pivots. Jordan pivot rows carry
    # their own pivot column plus free columns only, so a single pass with
    # the original coefficients is a complete reduction.
    for h in range(h_rows):
        for idx in range(rb):
            pc = piv_col[idx]
            beta = hdpc[h, pc]
            if beta:
                hdpc[h, pc] = 0
                for k in range(nwords):
                    word = binp[idx, k]
                    base = k << 6
                    while word:
                        lsb = word & (~word + np.uint64(1))
                        j = base + _bit_index(lsb)
                        if j != pc:
                            hdpc[h, j] ^= beta
                        word ^= lsb
                        ops += 1
                for t in range(width):
                    hrhs[h, t] ^= MUL_TABLE[beta, brhs[idx, t]]
                ops += width

    # Dense octet elimination of what is left of the HDPC rows.
    hpiv_col = np.full(h_rows, -1, np.int64)
    rh = 0
    for c in range(cols):
        pivot = -1
        for i in range(rh, h_rows):
            if hdpc[i, c]:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != rh:
            for j in range(cols):
                tmp = hdpc[rh, j]
                hdpc[rh, j] = hdpc[pivot, j]
                hdpc[pivot, j] = tmp
            for t in range(width):
                tmpb = hrhs[rh, t]
                hrhs[rh, t] = hrhs[pivot, t]
                hrhs[pivot, t] = tmpb
        v = hdpc[rh, c]
        if v != 1:
            inv = INV_TABLE[v]
            for j in range(c, cols):
                hdpc[rh, j] = MUL_TABLE[inv, hdpc[rh, j]]
            for t in range(width):
                hrhs[rh, t] = MUL_TABLE[inv, hrhs[rh, t]]
            ops += (cols - c) + width
        for i in range(h_rows):
            if i != rh:
                f = hdpc[i, c]
                if f:
                    if f == 1:
                        for j in range(c, cols):
                            hdpc[i, j] ^= hdpc[rh, j]
                        for t in range(width):
                            hrhs[i, t] ^= hrhs[rh, t]
                    else:
                        for j in range(c, cols):
                            hdpc[i, j] ^= MUL_TABLE[f, hdpc[rh, j]]
                        for t in range(width):
                            hrhs[i, t] ^= MUL_TABLE[f, hrhs[rh, t]]
                    ops += (cols - c) + width
        hpiv_col[rh] = c
        rh += 1
        if rh == h_rows:
            break

    rank = rb + rh
    sol = np.zeros((cols, width), np.uint8)
    if want_solution and rank == cols:
        for i in range(rh):
            for t in range(width):
                sol[hpiv_col[i], t] = hrhs[i, t]
        for i in range(rb):
            pc = piv_col[i]
            for t in range(width):
                sol[pc, t] = brhs[i, t]
            for k in range(nwords):
                word = binp[i, k]
                base = k << 6
                while word:
                    lsb = word & (~word + np.uint64(1))
                    j = base + _bit_index(lsb)
                    if j != pc:
                        for t in range(width):
                            sol[pc, t] ^= sol[j, t]
                        ops += width
                    word ^= lsb
    return rank, ops, sol


@njit(cache=True, inline="always")
def _rand(y, i, m):
    x0 = (y + i) & 0xFF
    x1 = ((y >> 8) + i) & 0xFF
    x2 = ((y >> 16) + i) & 0xFF
    x3 = ((y >> 24) + i) & 0xFF
    return np.int64((V0[x0] ^ V1[x1] ^ V2[x2] ^ V3[x3]) % np.uint32(m))


@njit(cache=True)
def _tuple_gen(x, j, w, p1):
    a = 53591 + j * 997
    if a % 2 == 0:
        a += 1
    b = 10267 * (j + 1)
    y = (b + x * a) & 0xFFFFFFFF
    v = _rand(y, 0, 1 << 20)
    d = 30
    for dd in range(1, 31):
        if v < DEGREE_TABLE[dd]:
            d = dd
            break
    if d > w - 2:
        d = w - 2
    a = 1 + _rand(y, 1, w - 1)
    b = _rand(y, 2, w)
    if d < 4:
        d1 = 2 + _rand(x, 3, 2)
    else:
        d1 = 2
    a1 = 1 + _rand(x, 4, p1 - 1)
    b1 = _rand(x, 5, p1)
    return d, a, b, d1, a1, b1


@njit(cache=True)
def build_ldpc_rows_kernel(s, b, w, p, l):
    rows = np.zeros((s, l), np.uint8)
    for i in range(b):
        a = 1 + i // s
        r = i % s
        rows[r, i] ^= 1
        r = (r + a) % s
        rows[r, i] ^= 1
        r = (r + a) % s
        rows[r, i] ^= 1
    for i in range(s):
        rows[i, b + i] ^= 1
        rows[i, w + i % p] ^= 1
        rows[i, w + (i + 1) % p] ^= 1
    return rows


@njit(cache=True)
def build_hdpc_rows_kernel(h, kps, l):
    rows = np.zeros((h, l), np.uint8)
    col = np.empty(h, np.uint8)
    for i in range(h):
        col[i] = OCT_EXP[i % 255]
        rows[i, kps - 1] = col[i]
    for j in range(kps - 2, -1, -1):
        for i in range(h):
            col[i] = MUL_TABLE[2, col[i]]
        i1 = _rand(j + 1, 6, h)
        if h > 1:
            i2 = (i1 + _rand(j + 1, 7, h - 1) + 1) % h
        else:
            i2 = i1
        col[i1] ^= 1
        col[i2] ^= 1
        for i in range(h):
            rows[i, j] = col[i]
    for i in range(h):
        rows[i, kps + i] ^= 1
    return rows


@njit(cache=True)
def fill_lt_rows_dense(rows, row0, isis, j, w, p, p1):
    """Write the LT row of each internal symbol id as uint8 entries."""
    for r in range(isis.shape[0]):
        row = row0 + r
        d, a, b, d1, a1, b1 = _tuple_gen(isis[r], j, w, p1)
        rows[row, b] ^= 1
        for _ in range(d - 1):
            b = (b + a) % w
            rows[row, b] ^= 1
        while b1 >= p:
            b1 = (b1 + a1) % p1
        rows[row, w + b1] ^= 1
        for _ in range(d1 - 1):
            b1 = (b1 + a1) % p1
            while b1 >= p:
                b1 = (b1 + a1) % p1
            rows[row, w + b1] ^= 1


@njit(cache=True)
def fill_lt_rows_packed(packed, row0, isis, j, w, p, p1):
    """Write the LT row of each internal symbol id as packed bits."""
    for r in range(isis.shape[0]):
        row = row0 + r
        d, a, b, d1, a1, b1 = _tuple_gen(isis[r], j, w, p1)
        packed[row, b >> 6] ^= np.uint64(1) << np.uint64(b & 63)
        for _ in range(d - 1):
            b = (b + a) % w
            packed[row, b >> 6] ^= np.uint64(1) << np.uint64(b & 63)
        while b1 >= p:
            b1 = (b1 + a1) % p1
        c = w + b1
        packed[row, c >> 6] ^= np.uint64(1) << np.uint64(c & 63)
        for _ in range(d1 - 1):
            b1 = (b1 + a1) % p1
            while b1 >= p:
                b1 = (b1 + a1) % p1
            c = w + b1
            packed[row, c >> 6] ^= np.uint64(1) << np.uint64(c & 63)


@njit(cache=True)
def lt_combine(inter, isis, j, w, p, p1):
    """Generate encoding symbols: XOR of intermediate symbols per tuple walk."""
    width = inter.shape[1]
    out = np.zeros((isis.shape[0], width), np.uint8)
    for r in range(isis.shape[0]):
        d, a, b, d1, a1, b1 = _tuple_gen(isis[r], j, w, p1)
        for t in range(width):
            out[r, t] ^= inter[b, t]
        for _ in range(d - 1):
            b = (b + a) % w
            for t in range(width):
                out[r, t] ^= inter[b, t]
        while b1 >= p:
            b1 = (b1 + a1) % p1
        for t in range(width):
            out[r, t] ^= inter[w + b1, t]
        for _ in range(d1 - 1):
            b1 = (b1 + a1) % p1
            while b1 >= p:
                b1 = (b1 + a1) % p1
            for t in range(width):
                out[r, t] ^= inter[w + b1, t]
    return out


@njit(cache=True)
def gf_matmul(m, x):
    """GF(256) matrix product m @ x for uint8 arrays."""
    rows = m.shape[0]
    inner = m.shape[1]
    width = x.shape[1]
    out = np.zeros((rows, width), np.uint8)
    for i in range(rows):
        for j in range(inner):
            f = m[i, j]
            if f == 1:
                for t in range(width):
                    out[i, t] ^= x[j, t]
            elif f:
                for t in range(width):
                    out[i, t] ^= MUL_TABLE[f, x[j, t]]
    return out


def pack_binary_rows(rows, nwords):
    """Bit-pack (n, L) binary uint8 rows into (n, nwords) uint64 words."""
    n, cols = rows.shape
    packed_bytes = np.packbits(rows, axis=1, bitorder="little")
    buf = np.zeros((n, nwords * 8), dtype=np.uint8)
    buf[:, :packed_bytes.shape[1]] = packed_bytes
    return buf.view(np.uint64)
