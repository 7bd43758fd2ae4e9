"""Closed-form and sampled full-rank probabilities for the decode matrix.

The decode matrix stacks a binary part (W LT columns worth of LDPC and
LT rows) and H dense GF(256) precode rows. Writing p_W for the chance
the binary part reaches rank W and treating the dense rows as uniformly
random octets, the chance that H uniformly random rows over GF(q) are
independent is

    p_r(H, q) = product over i in 1..H of (1 - q**-i)

and the chance the whole matrix reaches full rank factors into

    exact:       p_K = p_W * product over i in 1..P-H-1 of (1 - 2**(i-P))
    approximate: p_K ~= p_W * (1 - 2**-H)
    combined:    p_N = p_W * (1 - 2**-H) * p_r(H, q)

The approximate form collapses to 0 at H = 0 even though the empty
product is 1; it is only meaningful for H >= 1, so both forms are
computed and reported side by side. Factors sit extremely close to 1,
so float products are accumulated as compensated sums of log1p terms,
and every quantity also has an exact rational twin (``*_exact``): past
H around 53 the true increments of p_N drop below one float ulp, so
properties like strict monotonicity in H are only visible to exact
arithmetic.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._kernels import dense_solve

DEFAULT_SEED = 1729


@dataclass(frozen=True)
class RankInputs:
    H: int
    q: int = 256
    p_W: float = 1.0
    P: int = 0

    def __post_init__(self):
        if self.H < 0:
            raise ValueError("H must be >= 0")
        if self.q < 2:
            raise ValueError("q must be >= 2")
        if not 0.0 <= self.p_W <= 1.0:
            raise ValueError("p_W must be in [0, 1]")


def _log1p_product(terms):
    """exp(sum(log1p(t))) with exact summation of the logs."""
    return math.exp(math.fsum(math.log1p(t) for t in terms))


def full_rank_prob_random(H, q=256):
    """Probability that H uniformly random rows over GF(q) are independent."""
    if H < 0:
        raise ValueError("H must be >= 0")
    if q < 2:
        raise ValueError("q must be >= 2")
    if H == 0:
        return 1.0
    return _log1p_product(-float(q) ** -i for i in range(1, H + 1))


def binary_tail_prob_exact(P, H):
    """Exact tail product: probability the binary PI block covers P - H - 1 steps."""
    if P - H - 1 < 1:
        return 1.0
    return _log1p_product(-(2.0 ** (i - P)) for i in range(1, P - H))


def binary_tail_prob_approx(H):
    """The (1 - 2**-H) shortcut for the binary tail; degenerate at H = 0."""
    return 1.0 - 2.0 ** -H


def combined_full_rank_prob(inputs):
    """p_N = p_W * (1 - 2**-H) * p_r(H, q)."""
    return (inputs.p_W * binary_tail_prob_approx(inputs.H)
            * full_rank_prob_random(inputs.H, inputs.q))


def full_rank_prob_random_exact(H, q=256):
    """full_rank_prob_random as an exact rational."""
    if H < 0:
        raise ValueError("H must be >= 0")
    out = Fraction(1)
    qi = Fraction(1)
    for i in range(1, H + 1):
        qi /= q
        out *= 1 - qi
    return out


def combined_full_rank_prob_exact(inputs):
    """combined_full_rank_prob as an exact rational."""
    return (Fraction(inputs.p_W) * (1 - Fraction(1, 2 ** inputs.H))
            * full_rank_prob_random_exact(inputs.H, inputs.q))


@dataclass
class RankRow:
    H: int
    q: int
    p_r_exact: float
    p_K_exact: float
    p_K_approx: float
    p_N: float


def rank_table(h_values, q=256, p_W=1.0, P=None):
    """One RankRow per H; P defaults to max(H) + 2 so the exact tail exists."""
    h_values = list(h_values)
    if P is None:
        P = max(h_values) + 2
    rows = []
    for h in h_values:
        inp = RankInputs(H=h, q=q, p_W=p_W, P=P)
        rows.append(RankRow(
            H=h, q=q,
            p_r_exact=full_rank_prob_random(h, q),
            p_K_exact=p_W * binary_tail_prob_exact(P, h),
            p_K_approx=p_W * binary_tail_prob_approx(h),
            p_N=combined_full_rank_prob(inp)))
    return rows


def write_rank_csv(rows, path):
    """H, q, p_r_exact, p_K_exact, p_K_approx, p_N."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["H", "q", "p_r_exact", "p_K_exact", "p_K_approx", "p_N"])
            for r in rows:
                w.writerow([r.H, r.q, repr(r.p_r_exact), repr(r.p_K_exact),
                            repr(r.p_K_approx), repr(r.p_N)])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass(frozen=True)
class MatrixModel:
    """Sampled-matrix family: H random octet rows over a fixed full-rank base.

    base_rank rows of an identity block anchor the matrix; the H sampled
    rows must extend it to full rank. base_rank = 0 gives plain square
    random matrices of side H.
    """

    base_rank: int = 0
    q: int = 256

    def __post_init__(self):
        if self.q != 256:
            raise ValueError("only GF(256) sampling is implemented")


@dataclass
class RankProfile:
    trials: int
    full_rank_trials: int

    @property
    def fraction(self):
        return self.full_rank_trials / self.trials

    @property
    def ci95(self):
        f = self.fraction
        return 1.96 * math.sqrt(f * (1.0 - f) / self.trials)


def empirical_rank_profile(model, H, trials, seed=DEFAULT_SEED):
    """Observed full-rank fraction of sampled matrices with H random rows."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = model.base_rank + H
    hits = 0
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [seed & 0xFFFFFFFFFFFFFFFF, 0x52414E4B], dtype=np.uint64)))
    empty = np.zeros((n, 0), dtype=np.uint8)
    for _ in range(trials):
        m = np.zeros((n, n), dtype=np.uint8)
        if model.base_rank:
            m[:model.base_rank, :model.base_rank] = np.eye(
                model.base_rank, dtype=np.uint8)
        m[model.base_rank:] = rng.integers(0, 256, size=(H, n), dtype=np.uint8)
        r, _ = dense_solve(m, empty)
        hits += (r == n)
    return RankProfile(trials=trials, full_rank_trials=hits)
