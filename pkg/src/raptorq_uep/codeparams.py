"""Code parameter derivation, including importance-class precode overrides.

``standard_params`` reproduces the RFC 6330 Table 2 lookup: the smallest
padded block size K' >= K together with its systematic index J and the
standard precode row counts (S LDPC rows, H HDPC rows) and LT column count
W. ``pbpr_params`` swaps in per-class (S, H) values while keeping K' and W
from the standard row, growing L = K' + S + H and letting P = L - W absorb
the difference; because the standard systematic index is tuned for the
standard precode, the override re-searches J upward from the standard value
until the ISI 0..K'-1 constraint matrix is invertible.

Every encoding symbol maps to a ``Tuple`` (d, a, b, d1, a1, b1) via the
Rand/Deg generators of RFC 6330 sections 5.3.5.1-5.3.5.4; the tuple drives
both LT row construction and symbol generation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import NamedTuple

import numpy as np

from . import tables

K_MAX = 56403


class ImportanceClass(enum.Enum):
    LIB = "LIB"
    MIB = "MIB"


@dataclass(frozen=True)
class PrecodeProfile:
    importance: ImportanceClass
    S: int
    H: int

    def __post_init__(self):
        if self.S < 1 or self.H < 1:
            raise ValueError("precode profile needs S >= 1 and H >= 1")


@dataclass(frozen=True)
class CodeParams:
    K: int
    K_prime: int
    S: int
    H: int
    W: int
    L: int
    P: int
    B: int
    J: int
    T: int
    P1: int

    def __post_init__(self):
        if self.L != self.K_prime + self.S + self.H:
            raise ValueError("L must equal K' + S + H")
        if self.P != self.L - self.W or self.P < 1:
            raise ValueError("P must equal L - W and be >= 1")
        if self.W > self.L:
            raise ValueError("W cannot exceed L")
        if not 1 <= self.K <= self.K_prime:
            raise ValueError("K must satisfy 1 <= K <= K'")
        if self.B != self.W - self.S:
            raise ValueError("B must equal W - S")
        if self.T < 1:
            raise ValueError("symbol size T must be >= 1")


class Tuple(NamedTuple):
    d: int
    a: int
    b: int
    d1: int
    a1: int
    b1: int


def rand(y, i, m):
    """The Rand[y, i, m] generator of RFC 6330 section 5.3.5.1."""
    if m <= 0:
        raise ValueError("modulus must be positive")
    x0 = (y + i) % 256
    x1 = ((y >> 8) + i) % 256
    x2 = ((y >> 16) + i) % 256
    x3 = ((y >> 24) + i) % 256
    v = int(tables.V0[x0]) ^ int(tables.V1[x1]) ^ int(tables.V2[x2]) ^ int(tables.V3[x3])
    return v % m


def _deg(v, w):
    # cumulative degree distribution; capped so the (a, b) walk stays in range
    for d in range(1, 31):
        if v < int(tables.DEGREE_TABLE[d]):
            return min(d, w - 2)
    raise AssertionError("v out of range for the degree table")


def _smallest_prime_at_least(n):
    c = max(n, 2)
    while True:
        for f in range(2, int(c ** 0.5) + 1):
            if c % f == 0:
                break
        else:
            return c
        c += 1


def standard_params(K, T=1):
    """Parameters for the smallest standard K' >= K."""
    if not 1 <= K <= K_MAX:
        raise ValueError("K must be in [1, %d]" % K_MAX)
    col = tables.SYSTEMATIC_TABLE[:, 0]
    row = tables.SYSTEMATIC_TABLE[int(np.searchsorted(col, K))]
    k_prime, j, s, h, w = (int(x) for x in row)
    l = k_prime + s + h
    p = l - w
    return CodeParams(K=K, K_prime=k_prime, S=s, H=h, W=w, L=l, P=p,
                      B=w - s, J=j, T=T, P1=_smallest_prime_at_least(p))


def pbpr_params(K, profile, T=1):
    """Parameters with the profile's (S, H) in place of the standard row's.

    K' and W stay as the standard row defines them; L and P are recomputed.
    The systematic index is re-searched when the override changes the
    precode, so encoder and decoder must both derive params through this
    function (J is part of the returned CodeParams).
    """
    std = standard_params(K, T)
    if (profile.S, profile.H) == (std.S, std.H):
        return std
    l = std.K_prime + profile.S + profile.H
    p = l - std.W
    if p < 1:
        raise ValueError("profile (S=%d, H=%d) leaves no PI columns for K=%d"
                         % (profile.S, profile.H, K))
    j = _find_systematic_index(std.K_prime, profile.S, profile.H, std.W, std.J)
    return CodeParams(K=K, K_prime=std.K_prime, S=profile.S, H=profile.H,
                      W=std.W, L=l, P=p, B=std.W - profile.S, J=j, T=T,
                      P1=_smallest_prime_at_least(p))


@lru_cache(maxsize=None)
def _find_systematic_index(k_prime, s, h, w, j_start):
    from . import matrixgen

    for j in range(j_start, j_start + 10000):
        candidate = CodeParams(K=k_prime, K_prime=k_prime, S=s, H=h, W=w,
                               L=k_prime + s + h, P=k_prime + s + h - w,
                               B=w - s, J=j, T=1,
                               P1=_smallest_prime_at_least(k_prime + s + h - w))
        m = matrixgen.build_constraint_matrix(candidate, range(k_prime))
        if matrixgen.rank(m) == candidate.L:
            return j
    raise RuntimeError("no systematic index found near J=%d for (K'=%d, S=%d, H=%d)"
                       % (j_start, k_prime, s, h))


def tuple_gen(params, esi):
    """Deterministic (d, a, b, d1, a1, b1) for one encoding symbol id."""
    if not 0 <= esi < 1 << 24:
        raise ValueError("esi must be a 24-bit identifier")
    j = params.J
    w = params.W
    p1 = params.P1
    a = 53591 + j * 997
    if a % 2 == 0:
        a += 1
    b = 10267 * (j + 1)
    y = (b + esi * a) % (1 << 32)
    v = rand(y, 0, 1 << 20)
    d = _deg(v, w)
    a = 1 + rand(y, 1, w - 1)
    b = rand(y, 2, w)
    if d < 4:
        d1 = 2 + rand(esi, 3, 2)
    else:
        d1 = 2
    a1 = 1 + rand(esi, 4, p1 - 1)
    b1 = rand(esi, 5, p1)
    return Tuple(d=d, a=a, b=b, d1=d1, a1=a1, b1=b1)


def load_profiles(path):
    """Parse a profile file of ``<class>.<K> = <S>,<H>`` lines."""
    with open(path, encoding="utf-8") as f:
        return parse_profiles(f.read(), source=str(path))


def parse_profiles(text, source="<profiles>"):
    profiles = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = "%s:%d" % (source, lineno)
        if "=" not in line:
            raise ValueError("%s: expected key = value" % where)
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            cls_name, k_text = key.split(".")
            importance = ImportanceClass[cls_name.upper()]
            k = int(k_text)
            s_text, h_text = value.split(",")
            profile = PrecodeProfile(importance=importance,
                                     S=int(s_text), H=int(h_text))
        except (KeyError, ValueError) as exc:
            raise ValueError("%s: bad profile entry %r (%s)" % (where, raw, exc)) from None
        profiles[(k, importance)] = profile
    return profiles


def default_profiles():
    """The shipped profile set (see data/default_profiles.cfg)."""
    text = resources.files("raptorq_uep").joinpath("data/default_profiles.cfg").read_text()
    return parse_profiles(text, source="default_profiles.cfg")


def params_for(K, importance, profiles=None, T=1):
    """Resolve (K, class) to CodeParams via a profile set."""
    if profiles is None:
        profiles = default_profiles()
    try:
        profile = profiles[(K, importance)]
    except KeyError:
        known = sorted({k for k, _ in profiles})
        raise ValueError(
            "no precode profile for K=%d %s; this profile set covers K in %s"
            % (K, importance.value, known)) from None
    return pbpr_params(K, profile, T=T)
