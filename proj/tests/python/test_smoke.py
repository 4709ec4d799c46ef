import json
import math

import numpy as np
import pytest

import regobs


UNIT = regobs.Rectangle(0.0, 1.0, 0.0, 1.0)


def test_eigenvalues_and_values():
    assert regobs.eigenvalue(UNIT, regobs.Mode(0, 0)) == 0.0
    assert regobs.eigenvalue(UNIT, regobs.Mode(1, 0)) == pytest.approx(-math.pi**2)
    assert regobs.eigenfunction_value(UNIT, regobs.Mode(1, 0), regobs.Point(0.5, 0.3)) == (
        pytest.approx(0.0, abs=1e-15)
    )
    assert regobs.eigenfunction_value(UNIT, regobs.Mode(1, 0), regobs.Point(0.0, 0.0)) == (
        pytest.approx(math.sqrt(2.0))
    )


def test_mode_set_ordering():
    modes = regobs.build_mode_set(UNIT, 1, 1, 0.0)
    assert modes.size == 4
    first = modes.mode(0)
    assert (first.i, first.j) == (0, 0)
    second = modes.mode(1)
    assert (second.i, second.j) == (0, 1)  # lexicographic tie-break


def test_strategic_rank_condition():
    modes = regobs.build_mode_set(UNIT, 1, 1, 0.0)
    slow = regobs.SlowSpec.groups(2)
    single = [regobs.InteriorPointSensor(0.2, 0.3)]
    assert not regobs.check_strategic(single, modes, slow).strategic

    pair = [regobs.InteriorPointSensor(0.2, 0.3), regobs.InteriorPointSensor(0.7, 0.6)]
    report = regobs.check_strategic(pair, modes, slow)
    assert report.strategic
    assert report.margin > 1e-3


def test_observability_margin_closed_form():
    modes = regobs.build_mode_set(UNIT, 0, 0, 0.0)
    sensors = [regobs.InteriorPointSensor(0.4, 0.9)]
    assert regobs.observability_margin(sensors, modes, 1, 2.0) == pytest.approx(2.0)


def test_scalar_closed_loop():
    modes = regobs.build_mode_set(UNIT, 0, 0, 0.0)
    sensors = [regobs.InteriorPointSensor(0.5, 0.5)]
    system = regobs.make_modal_system(modes, sensors, regobs.SlowSpec.threshold(0.01))
    gain = regobs.design_gain_riccati(system, 1.0)
    assert gain[0, 0] == pytest.approx(1.0)
    est = regobs.build_identity_estimator(system, gain)
    traj = regobs.simulate(system, est, np.array([1.0]), np.array([0.0]), 3.0, 1e-3)
    err = traj.states[0, :] - traj.observers[0, :]
    t = np.asarray(traj.times)
    assert np.max(np.abs(err - np.exp(-t))) < 1e-5


def test_decay_fit():
    t = np.linspace(0.0, 5.0, 200)
    fit = regobs.fit_decay(list(t), list(2.5 * np.exp(-0.8 * t)), 0.5)
    assert fit.sigma == pytest.approx(0.8)
    assert fit.amplitude == pytest.approx(2.5)


def test_run_check_report_is_json():
    config = """
domain.x_max = 1
domain.y_max = 1
region.x_min = 0.25
region.x_max = 0.75
region.y_min = 0.25
region.y_max = 0.75
slow.sigma_min = 15
sensors.0.kind = point
sensors.0.x = 0.5
sensors.0.y = 0.5
"""
    report = json.loads(regobs.run_check(config))
    assert report["strategic"]["global"]["strategic"] is False
    assert report["strategic"]["global"]["max_multiplicity"] == 2


def test_counterexample_verdict_pair():
    config = regobs.builtin_counterexample_config()
    report = json.loads(regobs.run_check(config))
    assert report["strategic"]["global"]["strategic"] is False
    assert report["strategic"]["regional"]["strategic"] is True


def test_config_errors_surface_as_value_errors():
    with pytest.raises(ValueError):
        regobs.run_check("domain.x_min = banana\n")
