"""GF(256) arithmetic against brute-force polynomial oracles."""

from __future__ import annotations

import numpy as np
import pytest

from raptorq_uep import fieldmath
from raptorq_uep.fieldmath import (FIELD_POLYNOMIAL, INV_TABLE, MUL_TABLE,
                                   OCT_EXP, OCT_LOG, oct_inv, oct_mul,
                                   tables_consistent, vec_fma)


def poly_mul(a, b):
    """Carry-less multiply reduced mod 0x11D; no table involved."""
    acc = 0
    for bit in range(8):
        if (b >> bit) & 1:
            acc ^= a << bit
    for bit in range(15, 7, -1):
        if (acc >> bit) & 1:
            acc ^= FIELD_POLYNOMIAL << (bit - 8)
    return acc


def test_generator_cycle():
    # alpha = 2 generates the multiplicative group: order exactly 255
    assert OCT_EXP[0] == 1
    assert oct_mul(int(OCT_EXP[254]), 2) == 1
    assert len({int(OCT_EXP[i]) for i in range(255)}) == 255


def test_exp_log_round_trip():
    for i in range(255):
        assert OCT_LOG[int(OCT_EXP[i])] == i
    # doubled exp table lets products index without a modulo
    assert np.array_equal(OCT_EXP[255:510], OCT_EXP[0:255])


@pytest.mark.parametrize("a,b,want", [
    (0, 0, 0), (0, 77, 0), (1, 77, 77), (2, 2, 4),
    (0x80, 2, 0x1D),          # x^8 reduces to the field polynomial tail
    (0x0E, 0x0D, poly_mul(0x0E, 0x0D)),
])
def test_known_products(a, b, want):
    assert oct_mul(a, b) == want


def test_mul_table_exhaustive_against_oracle():
    grid = np.array([[poly_mul(a, b) for b in range(256)] for a in range(256)],
                    dtype=np.uint8)
    assert np.array_equal(MUL_TABLE, grid)


def test_commutativity():
    assert np.array_equal(MUL_TABLE, MUL_TABLE.T)


def test_associativity_and_distributivity_sampled():
    rng = np.random.default_rng(3)
    for _ in range(300):
        a, b, c = (int(x) for x in rng.integers(0, 256, size=3))
        assert oct_mul(a, oct_mul(b, c)) == oct_mul(oct_mul(a, b), c)
        assert oct_mul(a, b ^ c) == oct_mul(a, b) ^ oct_mul(a, c)


def test_every_nonzero_octet_has_inverse():
    for a in range(1, 256):
        assert oct_mul(a, oct_inv(a)) == 1
    assert INV_TABLE[0] == 0


def test_vec_fma_matches_bytewise_loop():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(1, 40))
        dst = rng.integers(0, 256, size=n, dtype=np.uint8).tobytes()
        src = rng.integers(0, 256, size=n, dtype=np.uint8).tobytes()
        beta = int(rng.integers(0, 256))
        want = bytes(d ^ oct_mul(beta, s) for d, s in zip(dst, src))
        assert vec_fma(dst, src, beta) == want


def test_vec_fma_edges():
    assert vec_fma(b"\x05\x06", b"\xff\xff", 0) == b"\x05\x06"
    assert vec_fma(b"\x05\x06", b"\x0f\xf0", 1) == b"\x0a\xf6"
    assert vec_fma(b"", b"", 7) == b""


@pytest.mark.parametrize("call", [
    lambda: oct_mul(-1, 0),
    lambda: oct_mul(0, 256),
    lambda: oct_inv(0),
    lambda: oct_inv(300),
    lambda: vec_fma(b"\x00", b"\x00\x00", 1),
    lambda: vec_fma(b"\x00", b"\x00", 256),
])
def test_validation_errors(call):
    with pytest.raises(ValueError):
        call()


def test_tables_consistent_detects_corruption():
    assert tables_consistent()
    saved = int(fieldmath.MUL_TABLE[3, 7])
    fieldmath.MUL_TABLE[3, 7] ^= 0x40
    try:
        assert not tables_consistent()
    finally:
        fieldmath.MUL_TABLE[3, 7] = saved
    assert tables_consistent()
