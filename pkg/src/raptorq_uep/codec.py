"""Systematic block encode/decode built on the constraint matrix.

Encoding solves A*C = D for the L intermediate symbols, where D stacks
S + H zero symbols, the K source symbols, and K' - K zero padding.
Every encoding symbol (source or repair) is then an LT combination of C,
so the first K encoding symbols reproduce the source block exactly.

Decoding rebuilds the same kind of system from whatever symbols arrived.
Padding symbols are always known to be zero, so a decoder holding any K
received symbols of full joint rank recovers C, then re-generates the
source symbols. Failure is all-or-nothing and reports the achieved rank.

Wire form of a symbol: 3-byte big-endian ESI followed by the T-byte
payload. ESIs of repair symbols start at K.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matrixgen
from ._kernels import lt_combine
from .codeparams import CodeParams, ImportanceClass

MAX_ESI = 1 << 24


@dataclass(frozen=True)
class Symbol:
    """One encoding symbol: ESI plus payload."""

    esi: int
    data: bytes

    def __post_init__(self):
        if not 0 <= self.esi < MAX_ESI:
            raise ValueError("esi must be in [0, 2**24)")
        if not isinstance(self.data, bytes):
            object.__setattr__(self, "data", bytes(self.data))


@dataclass
class SourceBlock:
    """K source symbols tagged with an importance class."""

    params: CodeParams
    importance: ImportanceClass
    symbols: list[Symbol] = field(default_factory=list)

    def __post_init__(self):
        if len(self.symbols) != self.params.K:
            raise ValueError(
                "need exactly K=%d source symbols, got %d"
                % (self.params.K, len(self.symbols)))
        for i, sym in enumerate(self.symbols):
            if sym.esi != i:
                raise ValueError("source symbols must carry ESIs 0..K-1 in order")
            if len(sym.data) != self.params.T:
                raise ValueError("symbol %d is %d bytes, expected T=%d"
                                 % (i, len(sym.data), self.params.T))


@dataclass
class IntermediateSymbols:
    """The L solved intermediate symbols for one block."""

    params: CodeParams
    c: np.ndarray  # (L, T) uint8

    def symbol(self, i):
        return self.c[i].tobytes()


@dataclass
class DecodeFailure:
    """Decode could not reach full rank."""

    rank: int
    needed: int
    received: int

    def __str__(self):
        return ("decode failed: rank %d of %d from %d received symbols"
                % (self.rank, self.needed, self.received))


def make_source_block(data, params, importance):
    """Split a K*T byte string into a SourceBlock."""
    t = params.T
    if len(data) != params.K * t:
        raise ValueError("data must be exactly K*T = %d bytes, got %d"
                         % (params.K * t, len(data)))
    syms = [Symbol(i, bytes(data[i * t:(i + 1) * t])) for i in range(params.K)]
    return SourceBlock(params=params, importance=importance, symbols=syms)


def _esi_to_isi(params, esi):
    # repair ESIs shift past the padding symbols
    return esi if esi < params.K else esi + (params.K_prime - params.K)


def _combine(params, c, isis):
    out = lt_combine(c, np.asarray(isis, dtype=np.int64),
                     params.J, params.W, params.P, params.P1)
    return [out[i].tobytes() for i in range(out.shape[0])]


def encode_block(block, method="auto"):
    """Solve for the intermediate symbols of a source block."""
    p = block.params
    m = matrixgen.build_constraint_matrix(p, range(p.K_prime))
    pad = b"\x00" * p.T
    rhs = [pad] * (p.S + p.H) + [s.data for s in block.symbols] \
        + [pad] * (p.K_prime - p.K)
    sol = matrixgen.solve(m, rhs, method=method)
    if isinstance(sol, matrixgen.SingularReport):
        raise RuntimeError(
            "constraint matrix singular at rank %d for systematic index J=%d; "
            "parameter resolution should have rejected this" % (sol.rank, p.J))
    c = np.frombuffer(b"".join(sol), dtype=np.uint8).reshape(p.L, p.T).copy()
    return IntermediateSymbols(params=p, c=c)


def gen_encoding_symbol(inter, esi):
    """Generate the encoding symbol for one ESI (source or repair)."""
    p = inter.params
    if not 0 <= esi < MAX_ESI:
        raise ValueError("esi must be in [0, 2**24)")
    data = _combine(p, inter.c, [_esi_to_isi(p, esi)])[0]
    return Symbol(esi, data)


def gen_encoding_symbols(inter, esis):
    """Batch form of gen_encoding_symbol."""
    p = inter.params
    isis = [_esi_to_isi(p, e) for e in esis]
    return [Symbol(e, d) for e, d in zip(esis, _combine(p, inter.c, isis))]


def decode_block(received, params, method="auto"):
    """Recover the K source symbols, or report the rank shortfall.

    received is any iterable of Symbol. Duplicates are rejected; order
    does not matter (rows are assembled in ascending ESI order).
    """
    p = params
    syms = sorted(received, key=lambda s: s.esi)
    esis = [s.esi for s in syms]
    if len(set(esis)) != len(esis):
        raise ValueError("duplicate ESIs in received set")
    for s in syms:
        if len(s.data) != p.T:
            raise ValueError("symbol %d is %d bytes, expected T=%d"
                             % (s.esi, len(s.data), p.T))

    # padding symbols are implicitly received and zero
    pad_isis = list(range(p.K, p.K_prime))
    isis = pad_isis + [_esi_to_isi(p, e) for e in esis]
    m = matrixgen.build_constraint_matrix(p, isis)
    if len(isis) < p.K_prime:
        return DecodeFailure(rank=matrixgen.rank(m, method=method),
                             needed=p.L, received=len(esis))
    pad = b"\x00" * p.T
    rhs = [pad] * (p.S + p.H + len(pad_isis)) + [s.data for s in syms]
    sol = matrixgen.solve(m, rhs, method=method)
    if isinstance(sol, matrixgen.SingularReport):
        return DecodeFailure(rank=sol.rank, needed=p.L, received=len(esis))
    c = np.frombuffer(b"".join(sol), dtype=np.uint8).reshape(p.L, p.T).copy()
    return _combine(p, c, range(p.K))


def to_wire(symbol, params=None):
    """3-byte big-endian ESI + payload."""
    return symbol.esi.to_bytes(3, "big") + symbol.data


def from_wire(buf, params):
    """Parse one wire symbol; length must be exactly 3 + T."""
    if len(buf) != 3 + params.T:
        raise ValueError("wire symbol must be %d bytes, got %d"
                         % (3 + params.T, len(buf)))
    return Symbol(int.from_bytes(buf[:3], "big"), bytes(buf[3:]))
