import json

import pytest
import yaml
from hypothesis import given, strategies as st

from shallow_ilw import cli
from shallow_ilw.config import ConfigError, defaults, loads, parse_config, resolve, serialize


def test_empty_file_gives_defaults(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("")
    assert parse_config(p) == defaults()


def test_negative_delta_range_error():
    with pytest.raises(ConfigError, match="delta ≥ 0"):
        resolve({"evolve": {"delta": -1}})


def test_unknown_keys_are_named():
    with pytest.raises(ConfigError, match="evolve.bogus"):
        resolve({"evolve": {"bogus": 1}})
    with pytest.raises(ConfigError, match="nosuch"):
        resolve({"nosuch": {}})


def test_odd_mode_count_rejected():
    with pytest.raises(ConfigError, match="even"):
        resolve({"converge": {"mode_count": 511}})


@given(st.floats(0, 10), st.integers(1, 10 ** 6), st.lists(st.floats(1e-6, 1.0), min_size=1, max_size=5),
       st.sampled_from(["KdV", "ScaledILW", "LowFrequency", "CoupledLowResidual"]))
def test_roundtrip(delta, seed, grid, kind):
    cfg = resolve({"run": {"seed": seed}, "evolve": {"delta": delta, "kind": kind},
                   "resonance": {"delta_grid": grid}})
    assert loads(serialize(cfg)) == cfg


def run(tmp_path, *args, config=None):
    tmp_path.mkdir(parents=True, exist_ok=True)
    argv = list(args) + ["--out", str(tmp_path / "out")]
    if config is not None:
        p = tmp_path / "c.yaml"
        p.write_text(yaml.safe_dump(config))
        argv += ["--config", str(p)]
    return cli.main(argv)


def test_selftest_exit_zero(tmp_path):
    assert run(tmp_path, "selftest") == 0
    m = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert m["command"] == "selftest" and "report.json" in m["outputs"]


def test_converge_kdv_only_exit_zero(tmp_path):
    cfg = {"converge": {"delta_grid": [0.0], "mode_count": 128, "box_length": 60.0, "dt": 0.01}}
    assert run(tmp_path, "converge", config=cfg) == 0
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    assert rep["measurements"][0]["E"] == 0.0


def test_instability_report_has_slope(tmp_path):
    code = run(tmp_path, "instability")
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    assert code in (0, 2) and "slope" in rep["fits"]


def test_config_error_exit_one(tmp_path):
    assert run(tmp_path, "evolve", config={"evolve": {"delta": -1}}) == 1


def test_verdict_failure_exit_two(tmp_path):
    cfg = {"converge": {"mode_count": 128, "box_length": 60.0, "dt": 0.01, "final_ratio": 1e-12}}
    assert run(tmp_path, "converge", config=cfg) == 2


def test_csv_has_full_precision(tmp_path):
    run(tmp_path, "converge", config={"converge": {"mode_count": 128, "box_length": 60.0, "dt": 0.01}})
    rows = (tmp_path / "out" / "measurements.csv").read_text().splitlines()[1:]
    for r in rows:
        mant = r.split(",")[1].split("e")[0].replace("-", "").replace(".", "")
        assert len(mant) >= 15


def test_deterministic_digests(tmp_path):
    cfg = {"evolve": {"mode_count": 128, "box_length": 60.0, "dt": 0.01, "horizon": 0.5, "kind": "ScaledILW",
                      "delta": 0.5, "record_every": 10}}
    run(tmp_path / "a", "evolve", config=cfg)
    run(tmp_path / "b", "evolve", config=cfg)
    da = json.loads((tmp_path / "a" / "out" / "manifest.json").read_text())["outputs"]
    db = json.loads((tmp_path / "b" / "out" / "manifest.json").read_text())["outputs"]
    assert da == db and "snapshots.npz" in da


def test_thread_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    run(tmp_path, "selftest", "--threads", "2")
    assert json.loads((tmp_path / "out" / "manifest.json").read_text())["threads"] == 3
