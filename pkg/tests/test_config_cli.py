import json
import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgfluid.cli import main
from sgfluid.config import (CSV_COLUMNS, SimConfig, checkpoint_dumps,
                            checkpoint_loads, read_csv)
from sgfluid.dynamics import FluidState, initial_state
from sgfluid.errors import ConfigError
from sgfluid.runner import fit_exponent, lifespan_run, simulate, summarize_lifespan, LifespanEntry


@pytest.mark.parametrize("bad", [
    {"resolution": 30}, {"resolution": 65}, {"omega0": 1.8}, {"epsilon": -0.1},
    {"dt": 0.0}, {"threads": 0}, {"lifespan_eps": [0.1, 0.0]},
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        SimConfig.from_dict(bad)


def test_config_unknown_key_and_modes(tmp_path):
    with pytest.raises(ConfigError, match="unknown"):
        SimConfig.from_dict({"resoluton": 64})
    cfg = SimConfig.from_dict({"f": {"2": [1, 0.5]}, "g": [[1, 0, 1]], "v0": [0.1, 0]})
    assert cfg.f == {2: 1 + 0.5j} and cfg.g == {1: 1j} and cfg.v0 == 0.1
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg.to_dict()))
    assert SimConfig.load(p).f == cfg.f
    p.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        SimConfig.load(p)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(st.tuples(finite, finite, finite, finite), min_size=16, max_size=16),
       finite)
@settings(max_examples=30, deadline=None)
def test_checkpoint_round_trip_is_bit_exact(rows, t):
    a = np.array(rows)
    s = FluidState(a[:, 0] + 1j * a[:, 1], a[:, 2] + 1j * a[:, 3], 0.3, t)
    r = checkpoint_loads(checkpoint_dumps(s))
    assert r.Z.tobytes() == s.Z.tobytes() and r.Zt.tobytes() == s.Zt.tobytes()
    assert r.t == s.t or (np.isnan(r.t) and np.isnan(s.t))


def test_checkpoint_rejects_garbage():
    with pytest.raises(ConfigError):
        checkpoint_loads('{"t": 0}')
    with pytest.raises(ConfigError):
        checkpoint_loads('{"t": 0, "omega0": 0, "N": 4, "Z": [[1, 0]], "Zt": [[1, 0]]}')


def test_simulate_writes_versioned_csv(tmp_path):
    cfg = SimConfig(resolution=32, dt=0.02, t_end=0.2, output_every=0.1)
    final, recs = simulate(cfg, out_dir=tmp_path)
    back = read_csv(tmp_path / "diagnostics.csv")
    assert len(back) == len(recs) == 3
    assert back[-1] == recs[-1]
    assert open(tmp_path / "diagnostics.csv").readline().startswith("# sgfluid-diagnostics v")
    assert open(tmp_path / "diagnostics.csv").readlines()[1].strip() == ",".join(CSV_COLUMNS)


def test_cli_simulate_restart_is_bit_compatible(tmp_path):
    base = {"resolution": 32, "dt": 0.02, "output_every": 0.1}
    c1, c2 = tmp_path / "a.json", tmp_path / "b.json"
    c1.write_text(json.dumps({**base, "t_end": 0.2}))
    c2.write_text(json.dumps({**base, "t_end": 0.4}))
    assert main(["simulate", "--config", str(c1), "--out", str(tmp_path / "r1")]) == 0
    assert main(["simulate", "--config", str(c2), "--out", str(tmp_path / "r2"),
                 "--restart", str(tmp_path / "r1" / "checkpoint_final.json")]) == 0
    assert main(["simulate", "--config", str(c2), "--out", str(tmp_path / "full")]) == 0
    a = (tmp_path / "r2" / "checkpoint_final.json").read_text()
    b = (tmp_path / "full" / "checkpoint_final.json").read_text()
    assert a == b
    assert (tmp_path / "full" / "diagnostics.png").exists()


def test_cli_verify_writes_report(tmp_path):
    rc = main(["verify", "--suite", "equilibrium", "--suite", "k", "--out", str(tmp_path)])
    assert rc == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    keys = {"check_name", "resolution", "epsilon", "omega0", "residual", "tolerance", "pass"}
    assert all(keys <= set(r) for r in rep)
    assert (tmp_path / "report.png").exists()


def test_cli_gravity_and_k(tmp_path):
    assert main(["gravity-check", "--resolution", "64", "--out", str(tmp_path)]) == 0
    assert main(["k-solve", "--resolution", "64", "--out", str(tmp_path)]) == 0
    k = json.loads((tmp_path / "k.json").read_text())
    assert k["residuals"][-1] < 1e-10


def test_cli_bad_input_exit_code(tmp_path, capsys):
    assert main(["simulate", "--resolution", "31", "--out", str(tmp_path)]) == 2
    assert main(["lifespan", "--eps", "0.1,0", "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_lifespan_cli_small(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"omega0": 0.0, "lifespan_resolution": 64,
                               "lifespan_dt": 0.05, "lifespan_t_max": 60.0}))
    rc = main(["lifespan", "--config", str(cfg), "--eps", "0.2,0.1", "--out", str(tmp_path)])
    summary = json.loads((tmp_path / "lifespan.json").read_text())
    assert rc == (0 if summary["monotone"] else 1)
    assert summary["entries"][0]["reached"]  # eps = 0.2 departs near t = 52
    assert summary["entries"][1]["reason"] == "t_max"
    assert (tmp_path / "lifespan.png").exists()


def test_lifespan_unresolved_initial_data_is_recorded():
    e = lifespan_run(0.2, 32, 0.0, 0.05, 1.0)
    assert e.error and not e.reached


def test_lifespan_doubling_rule_reaches_t_max():
    e = lifespan_run(0.1, 32, 0.0, 0.05, 5.0, rule="doubling")
    assert e.reason == "t_max" and not e.reached
    with pytest.raises(ValueError):
        lifespan_run(0.0, 32, 0.0, 0.05, 5.0)


def test_summary_and_fit():
    entries = [LifespanEntry(0.2, 10.0, True), LifespanEntry(0.1, 40.0, True),
               LifespanEntry(0.05, 160.0, True)]
    s = summarize_lifespan(entries)
    assert s["monotone"] and s["fit"]["p"] == pytest.approx(2.0)
    entries[2].t_star = 30.0
    assert not summarize_lifespan(entries)["monotone"]
    f = fit_exponent([0.2, 0.1, 0.05], [10, 41, 150])
    assert f["ci"][0] < f["p"] < f["ci"][1]
