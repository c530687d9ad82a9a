import json
import math

import numpy as np
import pytest

from holonomy_sim import experiments as E

PI = math.pi


def test_gate_time_curve_values():
    r = E.run_gate_time_curve(1.0, [0.0, PI / 2, PI])
    assert r.columns == ("gamma", "tau_asr", "tau_sr6")
    taus = r.column("tau_asr")
    assert abs(taus[0]) < 1e-12
    assert abs(taus[1] - (2 * PI / 3 + PI * math.sqrt(3))) < 1e-12
    assert abs(taus[2] - 3 * PI) < 1e-12
    assert all(abs(t - 4 * PI) < 1e-12 for t in r.column("tau_sr6"))
    assert abs(r.summary["ratio_at_pi"] - 0.75) < 1e-12
    with pytest.raises(ValueError):
        E.run_gate_time_curve(1.0, [4.0])


def test_scan_config_validation():
    with pytest.raises(ValueError):
        E.ScanConfig("nope")
    with pytest.raises(ValueError):
        E.ScanConfig("decoherence_curve", schemes=("bad",))
    with pytest.raises(ValueError):
        E.ScanConfig("robustness_grid", ranges={"epsilon": (0, 1, 1)})
    with pytest.raises(ValueError):
        E.ScanConfig("decoherence_curve", ranges={"k": (0, float("inf"), 3)})
    with pytest.raises(ValueError):
        E.ScanConfig("decoherence_curve", step=0.0)


def test_decoherence_curve_rows_and_order():
    r = E.run_decoherence_curve(("H", "T"), (0.0, 1e-2, 3), ["asr", "sr6"])
    assert len(r.rows) == 3 * 2 * 2
    zero = [row[-1] for row in r.rows if row[0] == 0.0]
    assert all(abs(f - 1) < 1e-8 for f in zero)
    for g in ("H", "T"):
        f = [row[-1] for row in r.rows if row[1] == g and row[2] == "asr"]
        assert f[0] > f[1] > f[2]


def test_scans_are_deterministic_across_jobs():
    a = E.run_robustness_grid("T", "asr", (-0.1, 0.1, 3), (-0.1, 0.1, 3), jobs=1)
    b = E.run_robustness_grid("T", "asr", (-0.1, 0.1, 3), (-0.1, 0.1, 3), jobs=2)
    assert a.to_csv() == b.to_csv()
    assert len(a.rows) == 9


def test_robustness_summary():
    r = E.run_robustness_grid("H", "asr", (-0.1, 0.1, 3), (-0.1, 0.1, 3))
    fs = r.column("fidelity")
    assert r.summary["min_fidelity"] == min(fs)
    centre = [row[-1] for row in r.rows if row[0] == 0.0 and row[1] == 0.0][0]
    assert centre > 1 - 1e-8


def test_write_outputs(tmp_path):
    r = E.run_decoherence_curve(("S",), (0.0, 5e-3, 2))
    paths = r.write(tmp_path, "dec", echo={"kind": "decoherence"})
    assert [p.name for p in paths] == ["dec.csv", "dec.json"]
    meta = json.loads(paths[1].read_text())
    for key in ("config", "provenance", "summary", "effective_config", "version"):
        assert key in meta
    assert {"step", "tolerances", "schedule_hashes"} <= set(meta["provenance"])
    lines = paths[0].read_text().splitlines()
    assert lines[0] == "kappa_over_omega,gate,scheme,fidelity" and len(lines) == 3


def test_schedule_hash_stable():
    from holonomy_sim.pulses import build_schedule, named_gate
    a = E.schedule_hash(build_schedule(named_gate("H"), "asr"))
    b = E.schedule_hash(build_schedule(named_gate("H"), "asr"))
    c = E.schedule_hash(build_schedule(named_gate("S"), "asr"))
    assert a == b != c and len(a) == 16


def test_fmt():
    assert E.fmt(0.1 + 0.2) == "0.3"
    assert E.fmt("H") == "H"


def test_trajectory_single_qubit():
    r = E.run_trajectory("X", points=50)
    assert r.columns == ("t", "pop_g", "pop_e", "pop_f", "pop_h")
    first = r.rows[0]
    assert first[0] == 0.0 and abs(first[1] - 0.5) < 1e-12 and abs(first[3] - 0.5) < 1e-12
    assert abs(r.rows[-1][0] - r.summary["gate_time"]) < 1e-9
    assert r.summary["state_fidelity"] > 0.99
    for row in r.rows:
        assert abs(sum(row[1:]) - 1) < 1e-9


def test_trajectory_effective_closed_reaches_target():
    from holonomy_sim.transmon import DragParams
    r = E.run_trajectory("Z", model="effective", drag=DragParams(), kappa=0.0, points=20)
    assert r.summary["state_fidelity"] > 1 - 1e-8


def test_trajectory_rejects_bad_state():
    with pytest.raises(ValueError):
        E.run_trajectory("X", initial_state=[1.0, 1.0])


def test_compare_schemes_small():
    rep = E.compare_schemes(("T",), kappa_over_omega=(5e-3,), grid=3)
    assert abs(rep["tau_ratio_at_pi"] - 0.75) < 1e-12
    t = rep["gates"]["T"]
    for s in ("asr", "sr6"):
        assert 3.5 < t[s]["error_order_slope"] < 4.5
    assert t["asr"]["decoherence"]["0.005"] > t["sr6"]["decoherence"]["0.005"]
    json.dumps(rep)
