import math
import os
from pathlib import Path

import pytest

import skyway

DATA = Path(os.environ.get("SKYWAY_DATA", Path(__file__).resolve().parents[2] / "data"))


def test_charge_time_calibration():
    assert skyway.charge_time(0.0, 0.99) == pytest.approx(2400.0)
    assert skyway.charge_time(0.90, 0.99) == pytest.approx(1200.0)
    with pytest.raises(skyway.InputError):
        skyway.charge_time(0.5, 1.0)


def test_relative_importance_sums_to_100():
    share = skyway.relative_importance()
    assert sum(share.values()) == pytest.approx(100.0)
    assert share["position"] == pytest.approx(40.85, abs=0.01)


def test_predict_ir_baseline():
    assert skyway.predict_ir([0, 0, 0, 0, 0]) == 1.0
    assert skyway.predict_ir([-1, 0, 0, 0, 0]) < 1.0


def test_simulate_fixture():
    rows = skyway.simulate(str(DATA / "network_5drone.json"), str(DATA / "fleet_5drone.json"))
    assert [r["drone_id"] for r in rows] == ["d1", "d2", "d3", "d4", "d5"]
    assert not any(r["faulted"] for r in rows)
    assert all(r["delivery_time_s"] > 0 for r in rows)


def test_missing_network_raises():
    with pytest.raises(skyway.InputError, match="network file not found"):
        skyway.simulate(str(DATA / "absent.json"), str(DATA / "fleet_5drone.json"))


def test_fit_pipeline(tmp_path):
    path = tmp_path / "dataset.csv"
    skyway.synthesize(str(path), pairs=300, seed=3)
    report = skyway.select_degrees(str(path), seed=3)
    assert report["degrees"]["position"] == 3
    assert report["degrees"]["separation"] == 4
    assert math.isfinite(report["intercept"])


def test_evaluate():
    m = skyway.evaluate([2.0, 4.0], [3.0, 5.0])
    assert m["mae"] == pytest.approx(1.0)
    assert m["mape"] == pytest.approx(37.5)
