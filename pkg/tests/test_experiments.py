import dataclasses
import json
import math

import numpy as np
import pytest

from sirfield import (
    ExperimentConfig,
    Field,
    Grid,
    State,
    bounds_table,
    convergence_table,
    cubature_error_row,
    cubature_error_study,
    empirical_critical_tau,
    error_norm,
    initial_state,
    intensity_integral_exact,
    run_simulation,
    step_bounds,
    write_bounds_csv,
    write_convergence_csv,
    write_cubature_csv,
)


def test_initial_state_layout(unit_grid):
    state = initial_state(unit_grid)
    assert np.all(state.s.values == 20.0)
    assert np.all(state.r.values == 0.0)
    assert np.all(state.i.values > 0.0)
    assert state.i.values.max() == pytest.approx(14.850611487589955, abs=1e-12)
    assert state.m_tilde() == pytest.approx(34.85061148758996, abs=1e-12)
    # the bump is symmetric about the domain center
    assert state.i.values[9, 9] == pytest.approx(state.i.values[10, 10], rel=1e-12)


def test_initial_state_custom_width():
    grid = Grid(11, 11, 0.1, 0.1)
    state = initial_state(grid, s0=5.0, sigma=0.2)
    assert np.all(state.s.values == 5.0)
    peak = 1.0 / (2.0 * math.pi * 0.04)
    assert state.i.values[5, 5] == pytest.approx(peak, rel=1e-12)


def make_states(diffs):
    grid = Grid(5, 5, 0.5, 0.25)
    base = State(Field.full(grid, 2.0), Field.full(grid, 1.0), Field.full(grid, 0.5))
    other = base.copy()
    for species, k, l, d in diffs:
        getattr(other, species).values[k, l] += d
    return base, other


def test_error_norm_zero_for_identical_states():
    a, b = make_states([])
    for p in (1, 2, math.inf):
        assert error_norm(a, b, p=p) == 0.0


def test_error_norm_single_entry():
    a, b = make_states([("i", 2, 3, 0.3)])
    area = 0.5 * 0.25
    assert error_norm(a, b, p=1) == pytest.approx(area * 0.3, rel=1e-14)
    assert error_norm(a, b, p=2) == pytest.approx(math.sqrt(area * 0.09), rel=1e-14)
    assert error_norm(a, b, p=math.inf) == pytest.approx(0.3, rel=1e-14)


def test_error_norm_sums_species():
    a, b = make_states([("s", 0, 0, 0.2), ("r", 4, 4, -0.1)])
    area = 0.5 * 0.25
    assert error_norm(a, b, p=1) == pytest.approx(area * 0.3, rel=1e-14)
    assert error_norm(a, b, p=math.inf) == pytest.approx(0.2, rel=1e-14)


def test_error_norm_validation():
    a, b = make_states([])
    with pytest.raises(ValueError):
        error_norm(a, b, p=3)
    grid = Grid(4, 4, 0.5, 0.5)
    c = State(Field.zeros(grid), Field.zeros(grid), Field.zeros(grid))
    with pytest.raises(ValueError):
        error_norm(a, c)


def test_config_round_trip(tmp_path):
    config = ExperimentConfig(a=150.0, delta=0.1, stepper="ssprk33", tau=0.25, snapshot_times=(1.0, 2.0))
    data = config.to_dict()
    clone = ExperimentConfig.from_dict(data)
    assert clone == config

    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    loaded = ExperimentConfig.from_json_file(path)
    assert loaded == config


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"a": 100.0, "viscosity": 1.0})


def test_config_builders():
    config = ExperimentConfig()
    grid = config.grid()
    assert grid.p1 == 20 and grid.h1 == pytest.approx(1.0 / 19.0)
    rule = config.rule()
    assert rule.kind == "product" and rule.n_radial == 20
    state = config.state0()
    assert state.m_tilde() == pytest.approx(34.85061148758996, abs=1e-12)


def test_default_step_is_the_improved_bound():
    config = ExperimentConfig(t_final=80.0)
    result = run_simulation(config)
    assert result.steps == 38
    assert result.state.t == 80.0

    rk_config = ExperimentConfig(t_final=80.0, stepper="ssprk104")
    rk_result = run_simulation(rk_config)
    assert rk_result.steps == 7


def small_config(**overrides):
    base = dict(
        p1=10,
        p2=10,
        rule_kind="product",
        n_radial=4,
        n_angular=8,
        t_final=2.0,
        stepper="fe",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_convergence_requires_halving_ladder():
    with pytest.raises(ValueError):
        convergence_table(small_config(), [0.4, 0.3])


def test_convergence_orders_follow_errors():
    rows = convergence_table(small_config(), [0.4, 0.2, 0.1])
    assert len(rows) == 3
    assert math.isnan(rows[0].order)
    for prev, row in zip(rows, rows[1:]):
        assert row.order == pytest.approx(math.log2(prev.error / row.error), rel=1e-12)
    again = convergence_table(small_config(), [0.4, 0.2, 0.1])
    assert [r.error for r in again] == [r.error for r in rows]


def test_convergence_csv(tmp_path):
    rows = convergence_table(small_config(), [0.4, 0.2])
    path = tmp_path / "conv.csv"
    write_convergence_csv(path, rows)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "tau,error,order"
    assert len(lines) == 3


def probe_config():
    return ExperimentConfig(
        a=400.0,
        b=0.01,
        c=0.01,
        delta=0.1,
        p1=16,
        p2=16,
        rule_kind="product",
        n_radial=8,
        t_final=30.0,
    )


def test_empirical_threshold_brackets_the_bound():
    config = probe_config()
    state = config.state0()
    bounds = step_bounds(state, config.kernel(), config.rule(), config.params(), config.interp())
    tau_e, valid = empirical_critical_tau(config, bounds.improved, hi_factor=4.0, rel_tol=1e-2)
    assert valid
    assert bounds.improved <= tau_e <= 2.0 * bounds.improved


def test_empirical_threshold_reports_open_bracket():
    config = small_config(a=1.0, t_final=5.0)
    tau_e, valid = empirical_critical_tau(config, 0.5, hi_factor=2.0, rel_tol=1e-2)
    assert not valid
    assert tau_e >= 1.0


def test_bounds_table_rows(tmp_path):
    config = ExperimentConfig(b=0.01, c=0.01)
    rows = bounds_table(config, "a", [50.0, 100.0], empirical=False)
    assert [row.value for row in rows] == [50.0, 100.0]
    for row in rows:
        assert 0.0 < row.tau_pessimistic <= row.tau_improved
        assert math.isnan(row.tau_empirical)
        assert not row.empirical_valid
    # stronger transmission forces a smaller admissible step
    assert rows[1].tau_improved < rows[0].tau_improved

    path = tmp_path / "bounds.csv"
    write_bounds_csv(path, "a", rows)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "a,t_tilde,tau_pessimistic,tau_improved,tau_empirical"
    assert len(lines) == 3


def test_bounds_table_rejects_unknown_parameter():
    with pytest.raises(ValueError):
        bounds_table(ExperimentConfig(), "b", [0.1], empirical=False)


def test_closed_form_intensity_integral():
    assert intensity_integral_exact(0.05) == pytest.approx(20.0747810401159, abs=1e-9)
    assert intensity_integral_exact(0.1) == pytest.approx(144.37560810785135, rel=1e-12)
    # cubic small-radius behavior: value ~ a * A * delta^3 / (6 sigma^2)
    tiny = intensity_integral_exact(0.001)
    assert tiny == pytest.approx(100.0 * 100.0 * 0.001**3 / (6.0 * 0.01), rel=1e-3)


def test_cubature_row_matches_closed_form():
    row = cubature_error_row("product", 8, 0.05)
    assert row.exact == pytest.approx(intensity_integral_exact(0.05), rel=1e-14)
    assert row.error == pytest.approx(abs(row.approx - row.exact), rel=1e-14)
    assert row.error <= 1e-12


def test_cubature_study_shape():
    rows = cubature_error_study(product_n=(4, 8), polar_deltas=(0.1, 0.05), polar_n=10)
    kinds = [row.kind for row in rows]
    assert kinds == ["product", "product", "polar", "polar"]
    product_rows = rows[:2]
    assert product_rows[1].error < product_rows[0].error
    polar_rows = rows[2:]
    assert polar_rows[0].delta == 0.1 and polar_rows[1].delta == 0.05
    assert polar_rows[1].error < polar_rows[0].error


def test_cubature_csv(tmp_path):
    rows = cubature_error_study(product_n=(4,), polar_deltas=(0.1,), polar_n=6)
    path = tmp_path / "cubature.csv"
    write_cubature_csv(path, rows)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "kind,n_radial,n_angular,delta,approx,exact,error"
    assert len(lines) == 3


def test_run_simulation_snapshots():
    config = small_config(tau=0.5, snapshot_times=(1.0,))
    result = run_simulation(config)
    assert set(result.snapshots) == {1.0}
    assert result.snapshots[1.0].t == 1.0
    assert result.state.t == 2.0
