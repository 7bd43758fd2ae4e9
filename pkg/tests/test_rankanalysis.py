"""Full-rank probability formulas against high-precision and sampled oracles."""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath as mp
import pytest

from raptorq_uep.rankanalysis import (MatrixModel, RankInputs, RankProfile,
                                      binary_tail_prob_approx,
                                      binary_tail_prob_exact,
                                      combined_full_rank_prob,
                                      combined_full_rank_prob_exact,
                                      empirical_rank_profile,
                                      full_rank_prob_random,
                                      full_rank_prob_random_exact, rank_table,
                                      write_rank_csv)


def mp_rank_prob(H, q):
    """The independence product evaluated at 60 decimal digits."""
    with mp.workdps(60):
        out = mp.mpf(1)
        for i in range(1, H + 1):
            out *= 1 - mp.mpf(q) ** -i
        return float(out)


@pytest.mark.parametrize("q", [2, 16, 256])
def test_random_rank_prob_matches_high_precision(q):
    for H in list(range(1, 17)) + [32, 64]:
        want = mp_rank_prob(H, q)
        got = full_rank_prob_random(H, q)
        assert got == pytest.approx(want, rel=1e-14)


def test_random_rank_prob_known_values():
    assert full_rank_prob_random(0, 2) == 1.0
    assert full_rank_prob_random(1, 2) == pytest.approx(0.5)
    assert full_rank_prob_random(2, 2) == pytest.approx(3 / 8)
    assert full_rank_prob_random_exact(2, 2) == Fraction(3, 8)
    assert full_rank_prob_random_exact(1, 256) == Fraction(255, 256)


def test_exact_and_float_forms_agree():
    for H in range(0, 65):
        exact = full_rank_prob_random_exact(H, 256)
        assert full_rank_prob_random(H, 256) == pytest.approx(float(exact), rel=1e-14)
        inp = RankInputs(H=H)
        cexact = combined_full_rank_prob_exact(inp)
        assert combined_full_rank_prob(inp) == pytest.approx(float(cexact), rel=1e-14)


def test_combined_prob_strictly_increasing_in_exact_arithmetic():
    # past H around 53 the float form plateaus below one ulp; the exact
    # rational form must still grow at every step
    prev = combined_full_rank_prob_exact(RankInputs(H=1))
    for H in range(2, 65):
        cur = combined_full_rank_prob_exact(RankInputs(H=H))
        assert cur > prev
        prev = cur


def test_combined_prob_degenerate_at_zero_rows():
    assert combined_full_rank_prob(RankInputs(H=0)) == 0.0
    assert combined_full_rank_prob_exact(RankInputs(H=0)) == 0


def test_binary_tail_products():
    assert binary_tail_prob_approx(0) == 0.0
    assert binary_tail_prob_approx(3) == pytest.approx(7 / 8)
    # empty tail: fewer than one factor
    assert binary_tail_prob_exact(0, 0) == 1.0
    assert binary_tail_prob_exact(5, 4) == 1.0
    # exact tail approaches the shortcut as the block outgrows H
    for H in range(1, 9):
        exact = binary_tail_prob_exact(30, H)
        approx = binary_tail_prob_approx(H)
        assert abs(exact - approx) <= 2.0 ** (-2 * H) + 2.0 ** -28


def test_input_validation():
    with pytest.raises(ValueError, match="H"):
        full_rank_prob_random(-1)
    with pytest.raises(ValueError, match="q"):
        full_rank_prob_random(2, q=1)
    with pytest.raises(ValueError, match="H"):
        RankInputs(H=-1)
    with pytest.raises(ValueError, match="p_W"):
        RankInputs(H=1, p_W=1.5)
    with pytest.raises(ValueError, match="GF\\(256\\)"):
        MatrixModel(q=2)
    with pytest.raises(ValueError, match="trials"):
        empirical_rank_profile(MatrixModel(), H=1, trials=0)


def test_rank_table_consistency():
    rows = rank_table([1, 2, 4, 8])
    assert [r.H for r in rows] == [1, 2, 4, 8]
    for r in rows:
        assert r.q == 256
        assert r.p_r_exact == pytest.approx(full_rank_prob_random(r.H))
        assert r.p_K_approx == pytest.approx(binary_tail_prob_approx(r.H))
        # default P is max(H) + 2 = 10
        assert r.p_K_exact == pytest.approx(binary_tail_prob_exact(10, r.H))
        assert r.p_N == pytest.approx(r.p_K_approx * r.p_r_exact)
    halved = rank_table([4], p_W=0.5)[0]
    full = rank_table([4], p_W=1.0)[0]
    assert halved.p_K_approx == pytest.approx(full.p_K_approx / 2)
    assert halved.p_N == pytest.approx(full.p_N / 2)


def test_rank_csv_round_trip(tmp_path):
    rows = rank_table([1, 2, 4])
    path = tmp_path / "rank.csv"
    write_rank_csv(rows, path)
    write_rank_csv(rows, path)  # replace, never append
    lines = path.read_text().splitlines()
    assert lines[0] == "H,q,p_r_exact,p_K_exact,p_K_approx,p_N"
    assert len(lines) == 4
    assert float(lines[1].split(",")[2]) == rows[0].p_r_exact
    assert not list(tmp_path.glob("*.tmp"))


@pytest.mark.parametrize("base_rank", [0, 5])
def test_sampled_matrices_match_the_formula(base_rank):
    # an identity anchor never changes the full-rank chance of the H
    # random rows, so both models must land on the same product
    H, trials = 2, 4000
    prof = empirical_rank_profile(MatrixModel(base_rank=base_rank), H, trials)
    p = full_rank_prob_random(H, 256)
    sigma = math.sqrt(p * (1.0 - p) / trials)
    assert abs(prof.fraction - p) <= 3 * sigma


def test_sampling_is_deterministic_per_seed():
    prof1 = empirical_rank_profile(MatrixModel(), 3, 500, seed=9)
    prof2 = empirical_rank_profile(MatrixModel(), 3, 500, seed=9)
    assert prof1.full_rank_trials == prof2.full_rank_trials
    assert prof1.trials == 500


def test_rank_profile_statistics():
    prof = RankProfile(trials=400, full_rank_trials=300)
    assert prof.fraction == 0.75
    assert prof.ci95 == pytest.approx(1.96 * math.sqrt(0.75 * 0.25 / 400))
