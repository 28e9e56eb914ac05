import math

import numpy as np
import pytest

from sirfield import (
    Field,
    Grid,
    InterpMethod,
    Kernel,
    Params,
    State,
    TransmissionOperator,
    assemble_T,
    initial_state,
    polar_rule,
    product_rule,
    rhs,
)


def test_radial_kernel_values(default_params):
    kern = Kernel(alpha=0.0, beta=1.0)
    delta = default_params.delta
    assert kern.g1(0.0, default_params) == pytest.approx(5.0, abs=1e-14)
    assert kern.g1(delta / 2.0, default_params) == pytest.approx(2.5, abs=1e-14)
    assert kern.g1(delta, default_params) == 0.0
    assert kern.g1(2.0 * delta, default_params) == 0.0
    r = np.array([0.0, 0.04, 0.05, 0.2])
    assert np.allclose(kern.g1(r, default_params), [5.0, 1.0, 0.0, 0.0], atol=1e-13)


def test_angular_kernel_values():
    kern = Kernel(alpha=0.0, beta=1.0)
    assert kern.g2(0.0) == pytest.approx(1.0, abs=1e-15)
    assert kern.g2(math.pi / 2.0) == pytest.approx(2.0, abs=1e-15)
    assert kern.g2(-math.pi / 2.0) == pytest.approx(0.0, abs=1e-15)
    shifted = Kernel(alpha=math.pi / 2.0, beta=0.5)
    assert shifted.g2(0.0) == pytest.approx(1.0, abs=1e-15)


def test_kernel_caps(default_params):
    kern = Kernel(alpha=0.3, beta=2.0)
    assert kern.kappa1(default_params) == pytest.approx(5.0, abs=1e-14)
    assert kern.kappa2() == pytest.approx(4.0, abs=1e-14)


def test_parameter_validation():
    with pytest.raises(ValueError):
        Params(a=0.0, b=0.1, c=0.01, delta=0.05)
    with pytest.raises(ValueError):
        Params(a=100.0, b=-0.1, c=0.01, delta=0.05)
    with pytest.raises(ValueError):
        Params(a=100.0, b=0.1, c=0.01, delta=0.0)
    with pytest.raises(ValueError):
        Params(a=math.nan, b=0.1, c=0.01, delta=0.05)
    with pytest.raises(ValueError):
        Kernel(alpha=0.0, beta=0.0)


def test_state_total_and_peak_density(unit_grid):
    state = initial_state(unit_grid)
    assert np.all(state.s.values == 20.0)
    assert np.all(state.r.values == 0.0)
    total = state.total()
    assert total.shape == (20, 20)
    assert state.m_tilde() == pytest.approx(34.85061148758996, abs=1e-12)


def test_state_requires_matching_grids(unit_grid):
    other = Grid(10, 10, 0.1, 0.1)
    with pytest.raises(ValueError):
        State(Field.zeros(unit_grid), Field.zeros(other), Field.zeros(unit_grid))


def test_state_copy_is_independent(start_state):
    dup = start_state.copy()
    dup.s.values[0, 0] = -99.0
    assert start_state.s.values[0, 0] == 20.0


def test_constant_field_pressure_interior(unit_grid, default_params, default_kernel):
    """A spatially constant intensity sees the full kernel integral.

    The integral of g1 g2 over the disk factors into a * delta^3 / 6
    times 2 pi beta, so an interior node of a constant field I = 3
    must report exactly three times that.
    """
    exact = 100.0 * 0.05**3 / 6.0 * 2.0 * math.pi
    cases = (
        (product_rule(10, 0.05), 1e-12),
        (polar_rule(20, 0.05), 1e-3),
    )
    for rule, tol in cases:
        op = TransmissionOperator(unit_grid, rule, default_kernel, default_params)
        t_values = op(np.full((20, 20), 3.0))
        interior = t_values[2:-2, 2:-2]
        assert np.allclose(interior, 3.0 * exact, rtol=tol), rule.kind
        assert np.all(t_values >= 0.0)


def test_pressure_vanishes_for_zero_intensity(unit_grid, default_params, default_kernel, small_rule):
    op = TransmissionOperator(unit_grid, small_rule, default_kernel, default_params)
    assert np.all(op(np.zeros((20, 20))) == 0.0)


def test_linear_methods_are_linear(unit_grid, default_params, default_kernel, small_rule, rng):
    f = rng.uniform(0.0, 10.0, size=(20, 20))
    g = rng.uniform(0.0, 10.0, size=(20, 20))
    for method in (InterpMethod.BILINEAR, InterpMethod.CUBIC_SPLINE):
        op = TransmissionOperator(unit_grid, small_rule, default_kernel, default_params, method)
        combined = op(2.0 * f + 3.0 * g)
        split = 2.0 * op(f) + 3.0 * op(g)
        scale = np.abs(combined).max()
        assert np.allclose(combined, split, atol=1e-11 * max(scale, 1.0)), method


def test_limited_cubic_is_not_linear(unit_grid, default_params, default_kernel, small_rule, rng):
    # the slope limiter reacts to the data, so superposition must fail
    f = rng.uniform(0.0, 10.0, size=(20, 20))
    g = rng.uniform(0.0, 10.0, size=(20, 20))
    op = TransmissionOperator(
        unit_grid, small_rule, default_kernel, default_params, InterpMethod.MONOTONE_CUBIC
    )
    gap = np.abs(op(f + g) - op(f) - op(g)).max()
    assert gap > 1e-6


def test_pressure_nonnegative_for_positivity_methods(unit_grid, default_params, default_kernel, small_rule):
    rg = np.random.default_rng(7)
    for _ in range(5):
        values = rg.uniform(0.0, 15.0, size=(20, 20))
        values[rg.uniform(size=(20, 20)) < 0.4] = 0.0
        for method in (InterpMethod.BILINEAR, InterpMethod.MONOTONE_CUBIC):
            op = TransmissionOperator(unit_grid, small_rule, default_kernel, default_params, method)
            assert np.all(op(values) >= -1e-13), method


def test_operator_rejects_wrong_shapes(unit_grid, default_params, default_kernel, small_rule):
    op = TransmissionOperator(unit_grid, small_rule, default_kernel, default_params)
    with pytest.raises(ValueError):
        op(np.zeros((5, 5)))


def test_assemble_matches_operator(unit_grid, default_params, default_kernel, small_rule, start_state):
    op = TransmissionOperator(unit_grid, small_rule, default_kernel, default_params)
    one_shot = assemble_T(start_state.i, default_kernel, small_rule, default_params)
    assert np.array_equal(one_shot.values, op(start_state.i.values))


def test_rhs_components_cancel(start_state, default_kernel, small_rule, default_params):
    ds, di, dr = rhs(start_state, default_kernel, small_rule, default_params)
    residual = np.abs(ds.values + di.values + dr.values).max()
    assert residual < 1e-12
    # susceptibles can only decrease, recovered can only increase
    assert np.all(ds.values <= 0.0)
    assert np.all(dr.values >= 0.0)


def test_rhs_matches_manual_assembly(start_state, default_kernel, small_rule, default_params):
    op = TransmissionOperator(start_state.grid, small_rule, default_kernel, default_params)
    t_values = op(start_state.i.values)
    s = start_state.s.values
    i = start_state.i.values
    ds, di, dr = rhs(start_state, default_kernel, small_rule, default_params)
    assert np.allclose(ds.values, -s * t_values - default_params.c * s, atol=1e-14)
    assert np.allclose(di.values, s * t_values - default_params.b * i, atol=1e-14)
