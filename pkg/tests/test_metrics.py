import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqgde.core import RunTrace, SearchSpace, make_rng
from sqgde.metrics import (
    NormalizationUndefined,
    RseTarget,
    bnfv_curve,
    bnfv_on_grid,
    estimate_rse_target,
    expected_running_time,
)
from sqgde.testfuncs import FunctionDescriptor, custom_function, make_test_function


def _success_trace(at, value=0.0, t_max=1000):
    return RunTrace(((at, value),), t_max)


def _failure_trace(t_max=1000):
    return RunTrace(((1, 100.0),), t_max)


def test_ert_all_successes_is_mean_time():
    traces = [_success_trace(t) for t in (100, 200, 300)]
    res = expected_running_time(traces, 1.0, 1000)
    assert res.value == 200.0
    assert not res.lower_bound
    assert res.success_rate == 1.0
    assert (res.n_success, res.n_total) == (3, 3)


def test_ert_half_successes_adds_penalty():
    traces = [_success_trace(300), _failure_trace()]
    res = expected_running_time(traces, 1.0, 1000)
    assert res.value == 300.0 + (0.5 / 0.5) * 1000.0
    assert res.success_rate == 0.5


def test_ert_no_success_is_lower_bound():
    traces = [_failure_trace() for _ in range(100)]
    res = expected_running_time(traces, 1.0, 1000)
    assert res.lower_bound
    assert res.value == 100_000.0
    assert res.success_rate == 0.0
    assert res.n_success == 0


def test_ert_success_is_strict():
    trace = RunTrace(((10, 5.0),), 100)
    hit = expected_running_time([trace], 5.0, 100)
    assert hit.lower_bound  # equality does not cross the target
    assert expected_running_time([trace], 5.0 + 1e-9, 100).value == 10.0


def test_ert_rejects_empty_and_bad_budget():
    with pytest.raises(ValueError):
        expected_running_time([], 1.0, 100)
    with pytest.raises(ValueError):
        expected_running_time([_failure_trace()], 1.0, 0)


@given(
    st.lists(
        st.tuples(st.integers(min_value=1, max_value=999), st.floats(min_value=0, max_value=100)),
        min_size=1,
        max_size=20,
    ),
    st.floats(min_value=0, max_value=120),
    st.floats(min_value=0, max_value=50),
)
@settings(max_examples=120)
def test_ert_monotone_in_target(points, target, slack):
    traces = [RunTrace(((e, f),), 1000) for e, f in points]
    tight = expected_running_time(traces, target, 1000)
    loose = expected_running_time(traces, target + slack, 1000)
    assert loose.value <= tight.value
    assert loose.success_rate >= tight.success_rate


def test_rse_uniform_line_order_statistic():
    space = SearchSpace.box(1, 0.0, 1.0)
    fn = custom_function("line", space, lambda x: float(x[0]))
    target = estimate_rse_target(fn, budget=3, reps=20_000, seed=1)
    # E[min of 3 uniforms] = 1 / 4
    assert target.value == pytest.approx(0.25, abs=0.02)
    assert target.function_label == "line"
    assert (target.budget, target.reps) == (3, 20_000)


def test_rse_constant_function_is_exact():
    space = SearchSpace.box(2, -1.0, 1.0)
    fn = custom_function("const", space, lambda x: 7.25)
    assert estimate_rse_target(fn, 1, 50, seed=0).value == 7.25


def test_rse_deterministic_in_seed():
    fn = make_test_function(FunctionDescriptor(label="f", kind="rastrigin", seed=2), dim=5)
    a = estimate_rse_target(fn, 50, 20, seed=9)
    b = estimate_rse_target(fn, 50, 20, seed=9)
    assert a == b


def test_rse_validation():
    fn = custom_function("c", SearchSpace.box(1, 0.0, 1.0), lambda x: 0.0)
    with pytest.raises(ValueError):
        estimate_rse_target(fn, 0, 10, seed=0)
    with pytest.raises(ValueError):
        estimate_rse_target(fn, 10, 0, seed=0)


def test_bnfv_hand_values():
    trace = RunTrace(((100, 50.0), (400, 10.0)), 1000)
    target = RseTarget("f", 1000, 100, 25.0)
    assert bnfv_curve(trace, target) == [(100, 2.0), (400, 0.4)]


def test_bnfv_parity_and_zero():
    target = RseTarget("f", 1000, 100, 25.0)
    assert bnfv_curve(RunTrace(((10, 25.0),), 20), target) == [(10, 1.0)]
    assert bnfv_curve(RunTrace(((10, 0.0),), 20), target) == [(10, 0.0)]


def test_bnfv_zero_target_is_undefined():
    target = RseTarget("f", 1000, 100, 0.0)
    with pytest.raises(NormalizationUndefined):
        bnfv_curve(RunTrace(((10, 1.0),), 20), target)
    with pytest.raises(NormalizationUndefined):
        bnfv_on_grid(RunTrace(((10, 1.0),), 20), target, [10, 20])


def test_bnfv_on_grid_piecewise_constant():
    trace = RunTrace(((100, 50.0), (400, 10.0)), 1000)
    target = RseTarget("f", 1000, 100, 25.0)
    grid = [50, 100, 250, 400, 1000]
    values = bnfv_on_grid(trace, target, grid)
    assert values[0] == np.inf  # before the first recorded point
    np.testing.assert_allclose(values[1:], [2.0, 2.0, 0.4, 0.4])


def test_rse_noisy_function_sees_noise():
    clean_desc = FunctionDescriptor(label="f", kind="sphere", seed=4)
    noisy_desc = FunctionDescriptor(label="f", kind="sphere", noisy=True, seed=4)
    clean = estimate_rse_target(make_test_function(clean_desc, dim=3), 20, 200, seed=11)
    noisy = estimate_rse_target(make_test_function(noisy_desc, dim=3), 20, 200, seed=11)
    # the multiplicative factor is >= 1, so observed minima cannot improve
    assert noisy.value >= clean.value
