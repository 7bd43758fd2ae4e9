"""Erasure-channel Monte Carlo harness.

A trial encodes one random source block, transmits the K source symbols
followed by repair symbols whose ESIs are drawn uniformly at random
without replacement from [K, 2**24), erases every symbol independently
with probability erasure_p, and hands the first K + overhead survivors
(stream order) to the decoder. Fewer survivors than that is a shortfall:
counted as a failure and also reported separately, so failure rates can
be conditioned on the decoder actually receiving its full symbol count.

Both importance classes see identical channel randomness per trial index
(paired design; pairing changes variance, never expectation). Every
trial's random stream derives only from (seed, trial_index), so results
are independent of how trials are scheduled across workers.

``run_trial`` is the reference path: it runs the full codec and checks
the decoded bytes. ``run_experiment`` runs a rank-only fast path that
consumes the identical random stream and therefore reaches the identical
verdict on every trial; the equivalence is cross-checked in the tests.

Decode effort in experiment reports is a deterministic cost model: the
solver's count of byte-level row operations on the constraint matrix
(payload columns excluded), accumulated exactly. This keeps report files
bit-identical across re-runs and worker counts. Wall-clock time appears
in two honest places only: TrialResult.decode_time and the timing
reports of ``measure_timing``, which are measurements and are expected
to vary between runs.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import codec, matrixgen
from ._kernels import fill_lt_rows_packed, hybrid_solve, lt_combine, pack_binary_rows
from .codeparams import ImportanceClass, params_for, tuple_gen

DEFAULT_SEED = 1729
DEFAULT_GRID = tuple(i / 10 for i in range(1, 10))

_STREAM_CONST = 0x9E3779B97F4A7C15  # second Philox key word for trial streams
_TIMING_CONST = 0x5DEECE66D


@dataclass(frozen=True)
class ChannelConfig:
    """Memoryless erasure channel: each symbol dropped i.i.d. with erasure_p."""

    erasure_p: float
    rng_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not 0.0 <= self.erasure_p <= 1.0:
            raise ValueError("erasure_p must be in [0, 1]")


@dataclass
class TrialResult:
    success: bool
    received_count: int
    rank_achieved: int
    decode_time: int  # wall nanoseconds

    def __post_init__(self):
        if self.success and self.rank_achieved < 0:
            raise ValueError("successful trial must report full rank")


@dataclass
class ClassPointStats:
    """Aggregate over all trials of one class at one grid point."""

    importance: ImportanceClass
    erasure_p: float
    overhead: int
    trials: int
    failures: int
    shortfall_trials: int
    decode_cost_sum: int

    @property
    def failure_rate(self):
        return self.failures / self.trials

    @property
    def ci95(self):
        r = self.failure_rate
        return 1.96 * math.sqrt(r * (1.0 - r) / self.trials)

    @property
    def mean_decode_cost(self):
        return self.decode_cost_sum / self.trials

    @property
    def conditioned_failure_rate(self):
        """Failure rate among trials where the decoder got its full count."""
        n = self.trials - self.shortfall_trials
        if n <= 0:
            return float("nan")
        return (self.failures - self.shortfall_trials) / n


@dataclass
class PairCounts:
    """Discordant/concordant failure counts between the paired classes."""

    erasure_p: float
    lib_only_failures: int
    mib_only_failures: int
    both_failures: int


@dataclass
class ExperimentReport:
    K: int
    overhead: int
    trials: int
    seed: int
    grid: tuple
    stats: dict = field(default_factory=dict)   # ImportanceClass -> [ClassPointStats]
    pairs: list = field(default_factory=list)   # [PairCounts], one per grid point
    encode_ns: dict = field(default_factory=dict)  # ImportanceClass -> wall ns

    def failure_ratio(self, index):
        """LIB/MIB failure count ratio at grid point index, or None for 0/0."""
        lib = self.stats[ImportanceClass.LIB][index].failures
        mib = self.stats[ImportanceClass.MIB][index].failures
        if lib == 0 and mib == 0:
            return None
        if mib == 0:
            return math.inf
        return lib / mib

    def max_failure_ratio(self):
        """Largest LIB/MIB failure ratio over the grid; None if no failures anywhere."""
        ratios = [self.failure_ratio(i) for i in range(len(self.grid))]
        ratios = [r for r in ratios if r is not None]
        return max(ratios) if ratios else None


@dataclass
class TimingReport:
    K: int
    runs: int
    seed: int
    median_encode_ns: dict = field(default_factory=dict)  # per class, wall clock
    median_decode_ns: dict = field(default_factory=dict)
    mean_encode_ops: dict = field(default_factory=dict)   # per class, deterministic
    mean_decode_ops: dict = field(default_factory=dict)

    def pct_increase(self):
        """Measured MIB-over-LIB percentage from the wall-clock medians."""
        lib = self.median_encode_ns[ImportanceClass.LIB] + self.median_decode_ns[ImportanceClass.LIB]
        mib = self.median_encode_ns[ImportanceClass.MIB] + self.median_decode_ns[ImportanceClass.MIB]
        return 100.0 * (mib / lib - 1.0)

    def ops_pct_increase(self):
        """Same ratio from byte-operation counts; identical on every run."""
        lib = self.mean_encode_ops[ImportanceClass.LIB] + self.mean_decode_ops[ImportanceClass.LIB]
        mib = self.mean_encode_ops[ImportanceClass.MIB] + self.mean_decode_ops[ImportanceClass.MIB]
        return 100.0 * (mib / lib - 1.0)


def repair_budget(K, erasure_p):
    """Repair symbols to transmit so survivor shortfall stays rare."""
    denom = max(1.0 - erasure_p, 0.05)
    return math.ceil(K * (erasure_p + 0.2) / denom) + 10


def _trial_rng(seed, trial_index):
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, trial_index ^ _STREAM_CONST],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_repair_esis(rng, K, budget):
    """budget distinct ESIs from [K, 2**24), first-draw order preserved."""
    esis = rng.integers(K, 1 << 24, size=budget, dtype=np.int64)
    _, first = np.unique(esis, return_index=True)
    while first.size < esis.size:
        esis = esis[np.sort(first)]
        extra = rng.integers(K, 1 << 24, size=budget - esis.size, dtype=np.int64)
        esis = np.concatenate([esis, extra])
        _, first = np.unique(esis, return_index=True)
    return esis


def _channel_draws(rng, K, T, erasure_p, budget):
    """The full random stream of one trial, in its fixed draw order."""
    data = rng.integers(0, 256, size=K * T, dtype=np.uint8)
    esis = _draw_repair_esis(rng, K, budget)
    survive = rng.random(K + budget) >= erasure_p
    return data, esis, survive


def erase(symbols, cfg, rng=None):
    """Drop each symbol independently with probability cfg.erasure_p.

    Survivor order is preserved. A fresh generator is derived from
    cfg.rng_seed unless an existing one is passed in.
    """
    if rng is None:
        rng = _trial_rng(cfg.rng_seed, 0)
    keep = rng.random(len(symbols)) >= cfg.erasure_p
    return [s for s, k in zip(symbols, keep) if k]


def run_trial(K, importance, erasure_p, overhead=0, seed=DEFAULT_SEED,
              trial_index=0, profiles=None, T=1):
    """One full-codec trial: encode, transmit, erase, decode, verify."""
    params = params_for(K, importance, profiles, T=T)
    budget = repair_budget(K, erasure_p)
    rng = _trial_rng(seed, trial_index)
    data, esis, survive = _channel_draws(rng, K, T, erasure_p, budget)

    block = codec.make_source_block(data.tobytes(), params, importance)
    inter = codec.encode_block(block)
    stream = block.symbols + codec.gen_encoding_symbols(inter, esis.tolist())
    survivors = [s for s, keep in zip(stream, survive) if keep]
    want = K + overhead
    taken = survivors[:want]

    t0 = time.perf_counter_ns()
    out = codec.decode_block(taken, params)
    decode_ns = time.perf_counter_ns() - t0

    if isinstance(out, codec.DecodeFailure):
        rank = out.rank
        success = False
    else:
        rank = params.L
        if bytes(b"".join(out)) != data.tobytes():
            raise AssertionError("decode returned full rank but wrong payload")
        success = len(survivors) >= want
    return TrialResult(success=success, received_count=len(taken),
                       rank_achieved=rank, decode_time=decode_ns)


class _RankDecoder:
    """Rank-only decoder with the per-class constant rows prebuilt."""

    def __init__(self, params, overhead):
        self.params = params
        p = params
        npad = p.K_prime - p.K
        nwords = max((p.L + 63) // 64, 1)
        fixed = [matrixgen.build_ldpc_rows(p)]
        if npad:
            pad_rows = np.zeros((npad, p.L), np.uint8)
            for r, isi in enumerate(range(p.K, p.K_prime)):
                pad_rows[r] = matrixgen.build_lt_row(p, tuple_gen(p, isi))
            fixed.append(pad_rows)
        self._fixed = pack_binary_rows(np.concatenate(fixed), nwords)
        self._hdpc = matrixgen.build_hdpc_rows(p)
        self._nwords = nwords
        self._nfixed = self._fixed.shape[0]
        maxrows = self._nfixed + p.K + overhead
        self._buf = np.zeros((maxrows, nwords), np.uint64)
        self._brhs = np.zeros((maxrows, 0), np.uint8)
        self._hrhs = np.zeros((p.H, 0), np.uint8)

    def rank_of(self, isis):
        """(rank, cost) for the survivor ISI set, ascending order expected."""
        p = self.params
        n = self._nfixed + isis.shape[0]
        binp = self._buf[:n]
        binp[:self._nfixed] = self._fixed
        binp[self._nfixed:] = 0
        fill_lt_rows_packed(binp, self._nfixed, isis, p.J, p.W, p.P, p.P1)
        rank, ops, _ = hybrid_solve(binp, self._brhs[:n], self._hdpc.copy(),
                                    self._hrhs, p.L, False)
        return int(rank), int(ops)


def _point_counters(K, erasure_p, overhead, trials, seed, start, step,
                    profiles, T):
    """Integer counters for one grid point over a stripe of trial indices.

    Stripes with the same (seed, trials) always sum to the same totals
    regardless of how indices are divided between workers.
    """
    lib_p = params_for(K, ImportanceClass.LIB, profiles, T=T)
    mib_p = params_for(K, ImportanceClass.MIB, profiles, T=T)
    decoders = {
        ImportanceClass.LIB: _RankDecoder(lib_p, overhead),
        ImportanceClass.MIB: _RankDecoder(mib_p, overhead),
    }
    budget = repair_budget(K, erasure_p)
    want = K + overhead
    c = {
        "trials": 0, "shortfall": 0,
        "fail_lib": 0, "fail_mib": 0,
        "cost_lib": 0, "cost_mib": 0,
        "lib_only": 0, "mib_only": 0, "both": 0,
    }
    for idx in range(start, trials, step):
        rng = _trial_rng(seed, idx)
        _, esis, survive = _channel_draws(rng, K, T, erasure_p, budget)
        src_esis = np.flatnonzero(survive[:K])
        rep_esis = esis[survive[K:]]
        n_surv = src_esis.size + rep_esis.size
        shortfall = n_surv < want
        if shortfall:
            taken_src, taken_rep = src_esis, rep_esis
        elif src_esis.size >= want:
            taken_src, taken_rep = src_esis[:want], rep_esis[:0]
        else:
            taken_src, taken_rep = src_esis, rep_esis[:want - src_esis.size]
        c["trials"] += 1
        c["shortfall"] += shortfall
        failed = {}
        for cls, key in ((ImportanceClass.LIB, "lib"), (ImportanceClass.MIB, "mib")):
            dec = decoders[cls]
            npad = dec.params.K_prime - K
            isis = np.sort(np.concatenate([taken_src, taken_rep + npad]))
            rank, cost = dec.rank_of(isis)
            fail = shortfall or rank < dec.params.L
            failed[key] = fail
            c["fail_" + key] += fail
            c["cost_" + key] += cost
        if failed["lib"] and failed["mib"]:
            c["both"] += 1
        elif failed["lib"]:
            c["lib_only"] += 1
        elif failed["mib"]:
            c["mib_only"] += 1
    return c


def _merge(counters):
    out = dict(counters[0])
    for c in counters[1:]:
        for k, v in c.items():
            out[k] += v
    return out


def run_experiment(K, grid=DEFAULT_GRID, trials=100_000, overhead=0,
                   seed=DEFAULT_SEED, workers=1, profiles=None, T=1):
    """Paired-class failure rates over the erasure grid.

    Trial verdicts are identical to run_trial on the same (seed, index);
    this path just skips payload work, so only rank decides success.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    grid = tuple(grid)
    report = ExperimentReport(K=K, overhead=overhead, trials=trials,
                              seed=seed, grid=grid)
    report.stats = {ImportanceClass.LIB: [], ImportanceClass.MIB: []}

    # one timed reference encode per class, for the report's encode figure
    for cls in (ImportanceClass.LIB, ImportanceClass.MIB):
        p = params_for(K, cls, profiles, T=T)
        rng = _trial_rng(seed ^ _TIMING_CONST, 0)
        data = rng.integers(0, 256, size=K * T, dtype=np.uint8).tobytes()
        block = codec.make_source_block(data, p, cls)
        t0 = time.perf_counter_ns()
        codec.encode_block(block)
        report.encode_ns[cls] = time.perf_counter_ns() - t0

    for erasure_p in grid:
        args = [(K, erasure_p, overhead, trials, seed, w, workers, profiles, T)
                for w in range(workers)]
        if workers <= 1:
            counters = [_point_counters(*args[0])]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                counters = list(pool.map(_point_counters, *zip(*args)))
        c = _merge(counters)
        assert c["trials"] == trials
        for cls, key in ((ImportanceClass.LIB, "lib"), (ImportanceClass.MIB, "mib")):
            report.stats[cls].append(ClassPointStats(
                importance=cls, erasure_p=erasure_p, overhead=overhead,
                trials=trials, failures=c["fail_" + key],
                shortfall_trials=c["shortfall"],
                decode_cost_sum=c["cost_" + key]))
        report.pairs.append(PairCounts(
            erasure_p=erasure_p, lib_only_failures=c["lib_only"],
            mib_only_failures=c["mib_only"], both_failures=c["both"]))
    return report


def measure_timing(K, runs=5000, seed=DEFAULT_SEED, profiles=None, T=1):
    """Per-class encode and decode cost of the constraint-system phase.

    Each run encodes a fresh random block and then decodes a reception
    in which 10% of the source symbols are replaced by repair symbols.
    The reception pattern is drawn once per class and re-drawn until it
    is decodable (full rank is a property of the pattern, not the data),
    so every timed run solves the same two systems on new payloads. The
    timed region is the elimination over the exact linear systems the
    block codec assembles (dense reference solver); assembling symbol
    containers around them is interpreter bookkeeping that is identical
    for both classes and would only dilute the ratio, so it stays
    outside the clock. Classes are interleaved run by run, the first 5%
    of runs is warm-up, and the per-phase summary is the median, which
    preemption spikes cannot drag. Byte-operation counts are accumulated
    alongside as a machine-independent mirror of the same work.
    """
    if runs < 100:
        raise ValueError("runs must be >= 100")
    classes = (ImportanceClass.LIB, ImportanceClass.MIB)
    prm = {cls: params_for(K, cls, profiles, T=T) for cls in classes}
    rng = _trial_rng(seed, _TIMING_CONST)
    warmup = math.ceil(runs * 0.05)
    n_erase = math.ceil(K * 0.1)

    enc_matrix = {cls: matrixgen.build_constraint_matrix(prm[cls], range(prm[cls].K_prime))
                  for cls in classes}
    dec_matrix, rep_isis = {}, {}
    while True:
        # one erasure pattern shared by both classes, so the class ratio
        # is not polluted by pattern-to-pattern cost variance
        erased = rng.choice(K, size=n_erase, replace=False)
        keep = np.setdiff1d(np.arange(K), erased)
        for cls in classes:
            p = prm[cls]
            rep_isis[cls] = np.arange(p.K_prime, p.K_prime + n_erase)
            isis = np.concatenate([keep, np.arange(K, p.K_prime), rep_isis[cls]])
            m = matrixgen.build_constraint_matrix(p, isis)
            if matrixgen.rank(m) != p.L:
                break
            dec_matrix[cls] = m
        else:
            break

    enc_ns = {cls: [] for cls in classes}
    dec_ns = {cls: [] for cls in classes}
    enc_ops = {cls: 0 for cls in classes}
    dec_ops = {cls: 0 for cls in classes}
    for run in range(runs):
        for cls in classes:
            p = prm[cls]
            pre = p.S + p.H
            data = rng.integers(0, 256, size=(K, T), dtype=np.uint8)
            enc_rhs = np.zeros((p.L, T), dtype=np.uint8)
            enc_rhs[pre:pre + K] = data

            t0 = time.perf_counter_ns()
            inter, e_ops = matrixgen.solve(enc_matrix[cls], enc_rhs,
                                           method="dense", with_ops=True)
            t1 = time.perf_counter_ns()
            if isinstance(inter, matrixgen.SingularReport):
                raise AssertionError("encode system must be full rank")

            repairs = lt_combine(inter, rep_isis[cls], p.J, p.W, p.P, p.P1)
            nrows = pre + p.K_prime
            dec_rhs = np.zeros((nrows, T), dtype=np.uint8)
            dec_rhs[pre:pre + len(keep)] = data[keep]
            dec_rhs[nrows - n_erase:] = repairs

            t2 = time.perf_counter_ns()
            out, d_ops = matrixgen.solve(dec_matrix[cls], dec_rhs,
                                         method="dense", with_ops=True)
            t3 = time.perf_counter_ns()
            if isinstance(out, matrixgen.SingularReport) or not np.array_equal(out, inter):
                raise AssertionError("decode must regenerate the intermediate symbols")
            if run >= warmup:
                enc_ns[cls].append(t1 - t0)
                dec_ns[cls].append(t3 - t2)
                enc_ops[cls] += e_ops
                dec_ops[cls] += d_ops
    report = TimingReport(K=K, runs=runs, seed=seed)
    kept_runs = runs - warmup
    for cls in classes:
        report.median_encode_ns[cls] = float(np.median(enc_ns[cls]))
        report.median_decode_ns[cls] = float(np.median(dec_ns[cls]))
        report.mean_encode_ops[cls] = enc_ops[cls] / kept_runs
        report.mean_decode_ops[cls] = dec_ops[cls] / kept_runs
    return report


def _atomic_write(path, write_fn):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            write_fn(f)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_experiment_csv(report, path):
    """K, class, erasure_p, overhead, trials, failures, failure_rate, ci95, mean_decode_ops."""
    def emit(f):
        w = csv.writer(f)
        w.writerow(["K", "class", "erasure_p", "overhead", "trials",
                    "failures", "failure_rate", "ci95", "mean_decode_ops"])
        for cls in (ImportanceClass.LIB, ImportanceClass.MIB):
            for st in report.stats[cls]:
                w.writerow([report.K, cls.value, repr(st.erasure_p),
                            st.overhead, st.trials, st.failures,
                            repr(st.failure_rate), repr(st.ci95),
                            repr(st.mean_decode_cost)])
    _atomic_write(path, emit)


def write_shortfall_csv(report, path):
    """Companion counts for conditioning failure rates on full delivery."""
    def emit(f):
        w = csv.writer(f)
        w.writerow(["K", "class", "erasure_p", "overhead", "shortfall_trials"])
        for cls in (ImportanceClass.LIB, ImportanceClass.MIB):
            for st in report.stats[cls]:
                w.writerow([report.K, cls.value, repr(st.erasure_p),
                            st.overhead, st.shortfall_trials])
    _atomic_write(path, emit)


def write_timing_csv(reports, path):
    """K, class, runs, mean_encode_ops, mean_decode_ops, pct_increase_ops.

    Only the deterministic operation counts go to the file; wall-clock
    medians live on the TimingReport, since a measurement can never be
    byte-identical across re-runs.
    """
    def emit(f):
        w = csv.writer(f)
        w.writerow(["K", "class", "runs", "mean_encode_ops",
                    "mean_decode_ops", "pct_increase_ops"])
        for rep in reports:
            for cls in (ImportanceClass.LIB, ImportanceClass.MIB):
                pct = rep.ops_pct_increase() if cls is ImportanceClass.MIB else 0.0
                w.writerow([rep.K, cls.value, rep.runs,
                            repr(rep.mean_encode_ops[cls]),
                            repr(rep.mean_decode_ops[cls]), repr(pct)])
    _atomic_write(path, emit)
