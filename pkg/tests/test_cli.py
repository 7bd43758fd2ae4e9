"""Command-line interface: config handling, experiment dispatch, selftest."""

from __future__ import annotations

import csv

import pytest

from raptorq_uep import fieldmath
from raptorq_uep.cli import (ConfigError, ExperimentConfig, config_from_values,
                             main, parse_config, run, serialize_config)


def small_config(tmp_path, **overrides):
    base = dict(experiment="custom", k=10, trials=40, grid=(0.5,),
                out=str(tmp_path), plot=False, workers=1)
    base.update(overrides)
    return ExperimentConfig(**base)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_parse_config_reports_source_and_line():
    with pytest.raises(ConfigError, match="cfg:2: expected key=value"):
        parse_config("experiment=1\nbogus line\n", source="cfg")
    with pytest.raises(ConfigError, match="cfg:1: unknown key 'depth'"):
        parse_config("depth=3\n", source="cfg")


def test_parse_config_skips_comments_and_blanks():
    values = parse_config("# header\n\nexperiment=2  # canned\ntrials=10\n")
    assert values == {"experiment": "2", "trials": "10"}


def test_config_serialization_round_trips(tmp_path):
    cfg = small_config(tmp_path, grid=(0.25, 0.5), trials=77, plot=True,
                       seed=42, symbol_size=3)
    back = config_from_values(parse_config(serialize_config(cfg)))
    assert back == cfg


def test_value_coercions():
    cfg = config_from_values({"experiment": "custom", "k": "10",
                              "trials": "25", "grid": "0.1,0.9",
                              "plot": "false"})
    assert (cfg.k, cfg.trials, cfg.grid, cfg.plot) == (10, 25, (0.1, 0.9), False)
    for values in ({"experiment": "1", "trials": "many"},
                   {"experiment": "1", "grid": "a,b"},
                   {"experiment": "1", "plot": "maybe"},
                   {}):
        with pytest.raises(ConfigError):
            config_from_values(values)


@pytest.mark.parametrize("overrides,msg", [
    (dict(experiment="9"), "experiment must be one of"),
    (dict(experiment="custom", k=None), "needs k"),
    (dict(grid=(0.5, 1.5)), "grid values"),
    (dict(trials=0), "trials"),
    (dict(runs=10), "runs"),
    (dict(workers=0), "workers"),
    (dict(symbol_size=0), "symbol_size"),
])
def test_validate_rules(tmp_path, overrides, msg):
    cfg = small_config(tmp_path, **overrides)
    with pytest.raises(ConfigError, match=msg):
        cfg.validate()


def test_run_rejects_unsupported_block_size(tmp_path, capsys):
    assert run(small_config(tmp_path, k=77)) == 1
    assert "configuration error" in capsys.readouterr().err


def test_run_rejects_bad_config(tmp_path, capsys):
    assert run(small_config(tmp_path, experiment="9")) == 1
    assert "experiment must be one of" in capsys.readouterr().err


def test_custom_experiment_writes_outputs(tmp_path, capsys):
    cfg = small_config(tmp_path, grid=(0.3, 0.6), plot=True)
    assert run(cfg) == 0
    out = capsys.readouterr().out
    assert "p=0.30" in out and "p=0.60" in out
    rows = read_csv(tmp_path / "experiment_custom_k10.csv")
    assert len(rows) == 4  # two classes, two grid points
    assert {r["class"] for r in rows} == {"LIB", "MIB"}
    assert (tmp_path / "experiment_custom_k10_shortfall.csv").exists()
    assert (tmp_path / "experiment_custom_k10.png").exists()


def test_canned_experiment_accepts_overrides(tmp_path):
    cfg = small_config(tmp_path, experiment="1", grid=(0.5,))
    assert run(cfg) == 0
    rows = read_csv(tmp_path / "experiment1.csv")
    assert {r["K"] for r in rows} == {"10"}  # k flag replaced the canned 55
    assert {r["trials"] for r in rows} == {"40"}


def test_rank_experiment_writes_table_and_figure(tmp_path, capsys):
    cfg = ExperimentConfig(experiment="rank", out=str(tmp_path))
    assert run(cfg) == 0
    assert "H=1:" in capsys.readouterr().out
    rows = read_csv(tmp_path / "rank_analysis.csv")
    assert [r["H"] for r in rows] == [str(h) for h in range(1, 17)]
    assert (tmp_path / "rank_analysis.png").exists()


def test_timing_experiment_smoke(tmp_path, capsys):
    cfg = ExperimentConfig(experiment="5", k=10, runs=100, out=str(tmp_path),
                           plot=False)
    assert run(cfg) == 0
    assert "increase" in capsys.readouterr().out
    rows = read_csv(tmp_path / "experiment5_timing.csv")
    assert [r["class"] for r in rows] == ["LIB", "MIB"]
    assert float(rows[1]["pct_increase_ops"]) > 0.0


def test_main_flags_override_config_file(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("experiment=custom\nk=10\ntrials=30\ngrid=0.5\n")
    code = main(["run", "--config", str(cfg_file), "--trials", "60",
                 "--out", str(tmp_path), "--no-plot"])
    assert code == 0
    rows = read_csv(tmp_path / "experiment_custom_k10.csv")
    assert {r["trials"] for r in rows} == {"60"}
    assert not (tmp_path / "experiment_custom_k10.png").exists()


def test_main_reports_missing_config_file(tmp_path, capsys):
    code = main(["run", "--config", str(tmp_path / "nope.cfg")])
    assert code == 1
    assert "cannot read config file" in capsys.readouterr().err


def test_reruns_are_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    argv = ["run", "--experiment", "custom", "--k", "10", "--trials", "50",
            "--grid", "0.4,0.7", "--seed", "5", "--no-plot"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    name = "experiment_custom_k10.csv"
    assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    for name in ("fieldmath", "reference-fixtures", "systematic-roundtrip",
                 "rank-model"):
        assert "%s: PASS" % name in out


def test_selftest_catches_table_corruption(capsys):
    fieldmath.MUL_TABLE[3, 7] ^= 0x40
    try:
        assert main(["selftest"]) == 2
        assert "fieldmath: FAIL" in capsys.readouterr().out
    finally:
        fieldmath.MUL_TABLE[3, 7] ^= 0x40
