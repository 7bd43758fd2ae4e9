"""Octet (GF(256)) arithmetic per RFC 6330 section 5.7.

The field is GF(2^8) built over the polynomial x^8 + x^4 + x^3 + x^2 + 1
(0x11D) with alpha = 2 as the generator. Addition is bitwise XOR. The
exp/log tables are generated at import time and immediately checked, entry
by entry, against a brute-force carry-less polynomial multiplier, so a bad
table can never ship silently.

Symbol payloads are plain ``bytes``; ``vec_fma`` is the one vector
operation the solver row-reductions need.
"""

import numpy as np

FIELD_POLYNOMIAL = 0x11D
FIELD_ORDER = 256


def _generate_tables():
    exp = np.zeros(510, dtype=np.uint8)
    log = np.zeros(256, dtype=np.int64)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & 0x100:
            x ^= FIELD_POLYNOMIAL
    # OCT_EXP doubles the cycle so table products never need a modulo
    exp[255:510] = exp[0:255]
    return exp, log


def _oracle_mul_grid():
    """All 256x256 products by carry-less multiply + polynomial reduction."""
    a = np.arange(256, dtype=np.int64)[:, None]
    b = np.arange(256, dtype=np.int64)[None, :]
    acc = np.zeros((256, 256), dtype=np.int64)
    for bit in range(8):
        acc ^= np.where((b >> bit) & 1, a << bit, 0)
    for bit in range(15, 7, -1):
        acc ^= np.where((acc >> bit) & 1, FIELD_POLYNOMIAL << (bit - 8), 0)
    return acc.astype(np.uint8)


OCT_EXP, OCT_LOG = _generate_tables()

MUL_TABLE = np.zeros((256, 256), dtype=np.uint8)
MUL_TABLE[1:, 1:] = OCT_EXP[OCT_LOG[1:, None] + OCT_LOG[None, 1:]]

INV_TABLE = np.zeros(256, dtype=np.uint8)
INV_TABLE[1:] = OCT_EXP[(255 - OCT_LOG[1:]) % 255]

if not np.array_equal(MUL_TABLE, _oracle_mul_grid()):
    raise RuntimeError("GF(256) table generation disagrees with the polynomial oracle")


def oct_mul(a, b):
    """Field product of two octets."""
    if not (0 <= a < 256 and 0 <= b < 256):
        raise ValueError("octets must be in [0, 255]")
    return int(MUL_TABLE[a, b])


def oct_inv(a):
    """Multiplicative inverse; zero has none."""
    if not 0 <= a < 256:
        raise ValueError("octets must be in [0, 255]")
    if a == 0:
        raise ValueError("zero has no multiplicative inverse")
    return int(INV_TABLE[a])


def vec_fma(dst, src, beta):
    """Return dst + beta*src elementwise (addition = XOR) as bytes."""
    if len(dst) != len(src):
        raise ValueError("vec_fma length mismatch: %d != %d" % (len(dst), len(src)))
    if not 0 <= beta < 256:
        raise ValueError("octets must be in [0, 255]")
    if beta == 0:
        return bytes(dst)
    d = np.frombuffer(bytes(dst), dtype=np.uint8)
    s = np.frombuffer(bytes(src), dtype=np.uint8)
    return (d ^ MUL_TABLE[beta][s]).tobytes()


def tables_consistent():
    """Cheap integrity check of the exp/log pair; used by the selftest."""
    nz = np.arange(1, 256)
    if not np.array_equal(OCT_EXP[OCT_LOG[nz]], nz.astype(np.uint8)):
        return False
    return np.array_equal(MUL_TABLE, _oracle_mul_grid())
