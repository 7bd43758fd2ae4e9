"""Parameter derivation, profile parsing, and tuple generation."""

from __future__ import annotations

import pytest

from raptorq_uep import matrixgen, tables
from raptorq_uep.codeparams import (CodeParams, ImportanceClass,
                                    PrecodeProfile, default_profiles,
                                    params_for, parse_profiles, pbpr_params,
                                    standard_params, tuple_gen)

LIB, MIB = ImportanceClass.LIB, ImportanceClass.MIB

# Resolved parameters for every shipped (K, class) pair. Values are pinned
# from the verified parameter table plus the shipped profile set; the
# systematic indexes were confirmed full rank when first derived.
RESOLVED = {
    (10, LIB): dict(S=7, H=10, W=17, L=27, P=10, P1=11, J=254),
    (10, MIB): dict(S=11, H=12, W=17, L=33, P=16, P1=17, J=254),
    (55, LIB): dict(S=13, H=10, W=67, L=78, P=11, P1=11, J=520),
    (55, MIB): dict(S=17, H=12, W=67, L=84, P=17, P1=17, J=520),
    (101, LIB): dict(S=17, H=10, W=113, L=128, P=15, P1=17, J=562),
    (101, MIB): dict(S=23, H=12, W=113, L=136, P=23, P1=23, J=562),
    (213, LIB): dict(S=23, H=10, W=223, L=246, P=23, P1=23, J=396),
    (213, MIB): dict(S=27, H=12, W=223, L=252, P=29, P1=29, J=396),
}


@pytest.mark.parametrize("key", sorted(RESOLVED, key=lambda k: (k[0], k[1].value)))
def test_params_for_resolved_values(key):
    K, cls = key
    p = params_for(K, cls)
    assert p.K == p.K_prime == K
    for name, want in RESOLVED[key].items():
        assert getattr(p, name) == want, name
    assert p.B == p.W - p.S
    assert p.L == p.K_prime + p.S + p.H


def test_standard_params_picks_smallest_padded_size():
    col = [int(r[0]) for r in tables.SYSTEMATIC_TABLE]
    for K in (1, 2, 9, 11, 50, 56, 100, 102, 212, 500, 56403):
        want = min(x for x in col if x >= K)
        assert standard_params(K).K_prime == want


def test_standard_params_range_checks():
    with pytest.raises(ValueError):
        standard_params(0)
    with pytest.raises(ValueError):
        standard_params(56404)


def test_pbpr_passthrough_when_profile_matches_standard():
    # the LIB profile for K=55 is the standard row, so no re-derivation
    assert params_for(55, LIB) == standard_params(55)


def test_pbpr_override_grows_precode():
    std = standard_params(101)
    prof = default_profiles()[(101, MIB)]
    p = pbpr_params(101, prof)
    assert (p.S, p.H) == (prof.S, prof.H)
    assert p.W == std.W and p.K_prime == std.K_prime
    assert p.L == std.K_prime + prof.S + prof.H
    assert p.P == p.L - p.W
    assert p.J >= std.J


def test_pbpr_rejects_profile_without_pi_columns():
    prof = PrecodeProfile(importance=MIB, S=1, H=1)
    with pytest.raises(ValueError, match="PI columns"):
        pbpr_params(10, prof)


@pytest.mark.parametrize("key", sorted(RESOLVED, key=lambda k: (k[0], k[1].value)))
def test_systematic_index_gives_invertible_matrix(key):
    K, cls = key
    p = params_for(K, cls)
    m = matrixgen.build_constraint_matrix(p, range(p.K_prime))
    assert matrixgen.rank(m) == p.L


def test_tuple_gen_matches_reference(reference_cases, params_from_case):
    for case in reference_cases:
        p = params_from_case(case)
        for isi, want in enumerate(case["tuples"]):
            assert list(tuple_gen(p, isi)) == want


def test_tuple_components_in_range():
    for K, cls in RESOLVED:
        p = params_for(K, cls)
        for isi in range(0, 400, 7):
            t = tuple_gen(p, isi)
            assert 1 <= t.d <= p.W - 2
            assert 1 <= t.a <= p.W - 1
            assert 0 <= t.b < p.W
            assert t.d1 in (2, 3)
            assert 1 <= t.a1 <= p.P1 - 1
            assert 0 <= t.b1 < p.P1


def test_tuple_gen_rejects_wide_esi():
    p = standard_params(10)
    with pytest.raises(ValueError):
        tuple_gen(p, 1 << 24)


def test_default_profiles_cover_shipped_blocks():
    profs = default_profiles()
    assert set(profs) == {(K, cls) for K in (10, 55, 101, 213)
                          for cls in (LIB, MIB)}
    for (K, cls), prof in profs.items():
        assert prof.importance is cls


def test_params_for_unknown_k_names_covered_set():
    with pytest.raises(ValueError, match=r"covers K in \[10, 55, 101, 213\]"):
        params_for(60, LIB)


def test_parse_profiles_round_trip_and_comments():
    text = """
    # comment line
    lib.55 = 13,10   # trailing comment
    MIB.55 = 17, 12
    """
    profs = parse_profiles(text)
    assert profs[(55, LIB)] == PrecodeProfile(importance=LIB, S=13, H=10)
    assert profs[(55, MIB)] == PrecodeProfile(importance=MIB, S=17, H=12)


@pytest.mark.parametrize("line", [
    "lib.55 13,10",          # no equals
    "foo.55 = 13,10",        # unknown class
    "lib.x = 13,10",         # K not an int
    "lib.55 = 13",           # missing H
    "lib.55 = 0,10",         # S below minimum
])
def test_parse_profiles_rejects_bad_lines(line):
    with pytest.raises(ValueError, match="cfg:1"):
        parse_profiles(line, source="cfg")


def test_precode_profile_validation():
    with pytest.raises(ValueError):
        PrecodeProfile(importance=LIB, S=0, H=10)
    with pytest.raises(ValueError):
        PrecodeProfile(importance=LIB, S=7, H=0)


def test_code_params_invariant_checks():
    good = standard_params(10)
    bad = dict(K=good.K, K_prime=good.K_prime, S=good.S, H=good.H, W=good.W,
               L=good.L, P=good.P, B=good.B, J=good.J, T=good.T, P1=good.P1)
    for field, value in [("L", good.L + 1), ("P", good.P + 1),
                         ("B", good.B - 1), ("T", 0), ("K", good.K_prime + 1)]:
        with pytest.raises(ValueError):
            CodeParams(**{**bad, field: value})
