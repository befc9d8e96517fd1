import math

import pytest

import fibrosim as fs


def test_defaults_validate():
    params = fs.ModelParams.defaults()
    assert fs.validate_params(params) == []


def test_growth_rate_hand_value():
    params = fs.ModelParams.defaults()
    state = fs.VolumeState(0.0, 0.3, 0.0)
    assert fs.growth_rate(fs.Population.Healthy, state, params) == pytest.approx(-0.5)
    assert fs.matrix_rate(fs.VolumeState(0.0, 0.5, 0.5), params) == pytest.approx(-0.375)


def test_integrators_agree():
    params = fs.ModelParams.defaults()
    init = fs.VolumeState(0.1, 0.5, 0.25)
    rk = fs.integrate_rk(init, params, 1.0, 1e-3)
    pic = fs.integrate_picard(init, params, 1.0)
    a, b = rk.final(), pic.final()
    assert a.phi_H == pytest.approx(b.phi_H, abs=1e-5)
    assert a.phi_M == pytest.approx(b.phi_M, abs=1e-5)


def test_equilibria():
    params = fs.ModelParams.defaults()
    phys = fs.nontrivial_equilibrium(fs.Population.Healthy, params)
    assert phys.location.phi_H == pytest.approx(0.51, abs=1e-10)
    assert phys.location.phi_M == pytest.approx(0.25, abs=1e-10)
    assert phys.verdict == "unstable"
    path = fs.nontrivial_equilibrium(fs.Population.Tumor, params)
    assert path.location.phi_T == pytest.approx(0.56, abs=1e-10)
    assert path.verdict == "stable"


def test_nonexistence_raises():
    params = fs.ModelParams.defaults()
    params.set("kinetics_H.delta", "0.3")
    with pytest.raises(fs.FibrosimError):
        fs.nontrivial_equilibrium(fs.Population.Healthy, params)


def test_gamma_roots():
    lower, upper = fs.gamma_roots(fs.Population.Healthy, fs.ModelParams.defaults())
    assert lower == pytest.approx(17.0 / 90.0, abs=1e-5)
    assert upper == pytest.approx((0.8 + math.sqrt(0.6)) / 2.0, abs=1e-5)


def test_classify_and_scan():
    params = fs.ModelParams.defaults()
    assert fs.classify_initial(fs.VolumeState(0.0, 0.05, 0.02), params) == "E"
    ok, margin = fs.mixed_equilibrium_scan(params, 10)
    assert ok and margin > 1e-3


def test_run_scenario(tmp_path):
    scenario = fs.preset_scenario("physiological")
    scenario.t_end = 5.0
    scenario.out_dir = str(tmp_path)
    status, summary, artifacts = fs.run_scenario(scenario)
    assert status == 0
    assert "final state" in summary
    assert len(artifacts) == 1
    assert (tmp_path / "physiological_trajectory.csv").exists()
