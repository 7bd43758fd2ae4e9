"""Shared fixtures: recorded reference vectors and parameter builders."""

from __future__ import annotations

import json
from importlib import resources

import pytest

from raptorq_uep.codeparams import CodeParams, ImportanceClass


@pytest.fixture(scope="session")
def reference_cases():
    """The K'=10 vectors recorded from an independent RFC 6330 implementation."""
    text = resources.files("raptorq_uep").joinpath("data/reference_k10.json").read_text()
    return json.loads(text)["cases"]


@pytest.fixture(scope="session")
def params_from_case():
    def build(case):
        return CodeParams(K=case["K"], K_prime=case["Kprime"], S=case["S"],
                          H=case["H"], W=case["W"], L=case["L"], P=case["P"],
                          B=case["W"] - case["S"], J=case["J"], T=case["T"],
                          P1=case["P1"])
    return build


@pytest.fixture(scope="session")
def both_classes():
    return (ImportanceClass.LIB, ImportanceClass.MIB)
