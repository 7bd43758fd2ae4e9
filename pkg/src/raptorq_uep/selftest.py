"""Built-in sanity suites runnable from the CLI.

Four fast suites cover the field tables, the recorded reference vectors,
the systematic round trip, and the random-matrix rank model. Each suite
raises on its first discrepancy; the runner reports one PASS/FAIL line
per suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import codec, fieldmath, matrixgen, rankanalysis
from .codeparams import ImportanceClass, params_for, standard_params, tuple_gen


def _suite_fieldmath():
    if not fieldmath.tables_consistent():
        raise AssertionError("multiplication tables disagree with the reference multiply")
    rng = np.random.default_rng(3)
    for _ in range(200):
        a, b, c = (int(x) for x in rng.integers(0, 256, 3))
        assert fieldmath.oct_mul(a, b) == fieldmath.oct_mul(b, a)
        assert fieldmath.oct_mul(a, fieldmath.oct_mul(b, c)) \
            == fieldmath.oct_mul(fieldmath.oct_mul(a, b), c)
        assert fieldmath.oct_mul(a, b ^ c) \
            == fieldmath.oct_mul(a, b) ^ fieldmath.oct_mul(a, c)
        if a:
            assert fieldmath.oct_mul(a, fieldmath.oct_inv(a)) == 1


def _load_reference():
    ref = resources.files("raptorq_uep").joinpath("data/reference_k10.json")
    return json.loads(ref.read_text())


def _suite_reference_fixtures():
    case = _load_reference()["cases"][0]
    p = standard_params(case["K"], T=case["T"])
    assert (p.K_prime, p.J, p.S, p.H, p.W, p.L, p.P, p.P1) == (
        case["Kprime"], case["J"], case["S"], case["H"], case["W"],
        case["L"], case["P"], case["P1"])
    for i, tref in enumerate(case["tuples"]):
        assert list(tuple_gen(p, i)) == tref
    m = matrixgen.build_constraint_matrix(p, range(p.K_prime))
    ref = np.array(
        [[int(row[2 * i: 2 * i + 2], 16) for i in range(case["L"])]
         for row in case["constraint_matrix"]], dtype=np.uint8)
    assert np.array_equal(m.rows, ref)
    data = bytes.fromhex(case["data"])
    block = codec.make_source_block(data, p, ImportanceClass.LIB)
    inter = codec.encode_block(block)
    refc = [bytes.fromhex(h) for h in case["intermediate"]]
    assert [inter.symbol(i) for i in range(p.L)] == refc
    for esi in range(case["K"], case["K"] + 5):
        sym = codec.gen_encoding_symbol(inter, esi)
        assert sym.data == bytes.fromhex(case["symbols"][str(esi)])


def _suite_systematic_roundtrip():
    rng = np.random.default_rng(17)
    for cls in (ImportanceClass.LIB, ImportanceClass.MIB):
        p = params_for(55, cls, T=4)
        data = rng.integers(0, 256, p.K * p.T, dtype=np.uint8).tobytes()
        block = codec.make_source_block(data, p, cls)
        inter = codec.encode_block(block)
        out = codec.decode_block(block.symbols, p)
        assert isinstance(out, list) and b"".join(out) == data
        # half the sources lost, repairs fill in
        keep = [s for s in block.symbols if s.esi % 2 == 0]
        repairs = codec.gen_encoding_symbols(
            inter, range(p.K, p.K + p.K - len(keep)))
        out = codec.decode_block(keep + repairs, p)
        assert isinstance(out, list) and b"".join(out) == data


def _suite_rank_model():
    trials = 1500
    prof = rankanalysis.empirical_rank_profile(
        rankanalysis.MatrixModel(), H=2, trials=trials, seed=23)
    want = rankanalysis.full_rank_prob_random(2, 256)
    sd = math.sqrt(want * (1.0 - want) / trials)
    assert abs(prof.fraction - want) <= 3 * sd, (prof.fraction, want)


SUITES = (
    ("fieldmath", _suite_fieldmath),
    ("reference-fixtures", _suite_reference_fixtures),
    ("systematic-roundtrip", _suite_systematic_roundtrip),
    ("rank-model", _suite_rank_model),
)


@dataclass
class SelftestReport:
    results: list  # (name, passed, message)

    @property
    def ok(self):
        return all(passed for _, passed, _ in self.results)


def selftest(verbose=True):
    """Run all suites; report one line each."""
    results = []
    for name, fn in SUITES:
        try:
            fn()
            results.append((name, True, ""))
            if verbose:
                print("%s: PASS" % name)
        except Exception as exc:  # noqa: BLE001 - suite failures are data
            results.append((name, False, str(exc)))
            if verbose:
                print("%s: FAIL (%s)" % (name, exc))
    return SelftestReport(results=results)
