import csv
import dataclasses

import pytest

from orbitfed.cli import COMMANDS, main
from orbitfed.scenario import (
    ConstellationConfig,
    Scenario,
    ScenarioError,
    load_scenario,
    loads_scenario,
)

FAST = """
max_rounds = 2
[training]
local_epochs = 1
"""


@pytest.fixture
def fast_file(tmp_path):
    p = tmp_path / "fast.toml"
    p.write_text(FAST)
    return p


# -- scenario files -----------------------------------------------------------

def test_round_trip_is_identity():
    sc = Scenario(seed=11, partition="iid", constellation=ConstellationConfig(3, 6, 1.2e6, 60.0, 180.0, 2))
    assert loads_scenario(sc.dumps()) == sc
    assert loads_scenario(Scenario().dumps()) == Scenario()


def test_empty_file_gives_defaults():
    assert loads_scenario("") == Scenario()


def test_bundled_default_values():
    sc = load_scenario("paper_default")
    c = sc.constellation
    assert (c.num_orbits, c.sats_per_orbit) == (5, 8)
    assert c.num_orbits * c.sats_per_orbit == 40
    assert c.altitude_m == 1.5e6 and c.inclination_deg == 80.0
    assert sc.ground_station.name == "Rolla"
    assert sc.ground_station.min_elevation_deg == 10.0
    assert sc.training.local_epochs == 100
    assert sc.training.learning_rate == 0.001
    assert sc.training.batch_size == 32
    assert sc.link.data_rate_bps == 16e6
    assert sc == Scenario()


def test_bundled_fig3():
    sc = load_scenario("fig3")
    assert sc.horizon_s == 64800.0
    assert (sc.constellation.num_orbits, sc.constellation.sats_per_orbit) == (4, 4)


@pytest.mark.parametrize("text, needle", [
    ("[constellation]\nsats_per_orbit = 0\n", "K >= 1"),
    ("[constellation]\nnum_orbits = 0\n", "num_orbits"),
    ("[constellation]\nfoo = 1\n", "unknown key"),
    ("bogus = 1\n", "unknown top-level"),
    ("horizon_s = -1.0\n", "horizon_s"),
    ("[link]\nmode = \"magic\"\n", "link.mode"),
    ("[training]\nlocal_epochs = \"many\"\n", "integer"),
    ("partition = \"weird\"\n", "partition"),
    ("[ground_station]\nmin_elevation_deg = 95.0\n", "elevation"),
    ("seed = [\n", "TOML"),
])
def test_invalid_scenarios_rejected(text, needle):
    with pytest.raises(ScenarioError, match=needle):
        loads_scenario(text)


def test_with_overrides_revalidates():
    with pytest.raises(ScenarioError):
        Scenario().with_overrides(constellation=dataclasses.replace(Scenario().constellation, sats_per_orbit=0))


# -- command line -------------------------------------------------------------

def test_unknown_command_prints_usage(capsys, tmp_path):
    assert main(["launch", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "usage" in err
    assert not any(tmp_path.iterdir())


def test_bad_flag_is_usage_error(capsys):
    assert main(["windows", "--horizon", "soon"]) == 1
    assert "usage" in capsys.readouterr().err


def test_missing_and_invalid_scenario_exit_1(tmp_path, capsys):
    assert main(["windows", "--scenario", str(tmp_path / "nope.toml"), "--out", str(tmp_path)]) == 1
    bad = tmp_path / "bad.toml"
    bad.write_text("[constellation]\nsats_per_orbit = 0\n")
    assert main(["windows", "--scenario", str(bad), "--out", str(tmp_path)]) == 1
    assert "K >= 1" in capsys.readouterr().err


def test_runtime_failure_exit_2(tmp_path, capsys):
    p = tmp_path / "idx.toml"
    p.write_text('[dataset]\nsource = "idx"\nidx_images = "missing-images"\nidx_labels = "missing-labels"\n')
    assert main(["run-fedleo", "--scenario", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "failed" in capsys.readouterr().err


def test_windows_fig3(tmp_path):
    assert main(["windows", "--scenario", "fig3", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "windows.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows
    assert {(int(r["orbit"]), int(r["slot"])) for r in rows} <= {(l, k) for l in range(4) for k in range(4)}
    for r in rows:
        assert float(r["t_end_s"]) > float(r["t_start_s"]) >= 0.0
        assert float(r["t_end_s"]) <= 64800.0
        assert int(r["visit_index"]) >= 1


def test_env_overrides_out(tmp_path, monkeypatch):
    target = tmp_path / "env"
    monkeypatch.setenv("ORBITFED_OUT", str(target))
    assert main(["windows", "--scenario", "fig3", "--horizon", "7200", "--out", str(tmp_path / "flag")]) == 0
    assert (target / "windows.csv").exists()
    assert not (tmp_path / "flag").exists()


def test_partition_report(tmp_path):
    assert main(["partition-report", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "partition.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 40
    for r in rows:
        counts = [int(v) for k, v in r.items() if k.startswith("class_")]
        assert sum(counts) == int(r["samples"]) > 0


def test_run_commands_write_outputs(tmp_path, fast_file):
    for cmd in ("run-fedleo", "run-star"):
        out = tmp_path / cmd
        assert main([cmd, "--scenario", str(fast_file), "--out", str(out)]) == 0
        for name in ("windows.csv", "events.csv", "metrics.csv", "rounds.csv"):
            assert (out / name).stat().st_size > 0


def test_compare_is_byte_identical(tmp_path, fast_file, capsys):
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        assert main(["compare", "--scenario", str(fast_file), "--seed", "3", "--out", str(out)]) == 0
        outs.append(out)
    assert "speedup" in capsys.readouterr().out
    files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file())
    assert len(files) >= 8
    for rel in files:
        assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes()


def test_every_command_is_listed():
    assert set(COMMANDS) == {"windows", "run-fedleo", "run-star", "compare", "partition-report"}
