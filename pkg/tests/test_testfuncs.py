import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqgde.core import SearchSpace, make_rng
from sqgde.testfuncs import (
    BASE_FUNCTIONS,
    ComponentDescriptor,
    Composition,
    CompositionComponent,
    FunctionDescriptor,
    Transform,
    base_eval,
    compose_eval,
    composition_weights,
    custom_function,
    default_suite,
    load_suite,
    make_test_function,
    random_rotation,
    save_suite,
    suite_by_label,
)


# --- base landscapes ---------------------------------------------------


def test_base_optima_are_zero():
    for kind, base in BASE_FUNCTIONS.items():
        d = max(base.min_dim, 2)
        z = np.full(d, base.optimum_offset)
        assert base_eval(kind, z) == pytest.approx(0.0, abs=1e-10), kind


def test_sphere_hand_value():
    assert base_eval("sphere", [1.0, 2.0]) == 5.0


def test_rastrigin_hand_value():
    # 20 + (0.25 - 10 cos(pi)) + (0 - 10 cos(0)) = 20 + 10.25 - 10
    z = np.array([0.5, 0.0])
    expected = 10 * 2 + (0.25 - 10 * np.cos(np.pi)) + (0.0 - 10 * np.cos(0.0))
    assert base_eval("rastrigin", z) == pytest.approx(expected, rel=1e-15)
    assert base_eval("rastrigin", z) == pytest.approx(20.25, rel=1e-15)


def test_schwefel12_hand_value():
    # partial sums of (1, 2): 1^2 + 3^2
    assert base_eval("schwefel12", [1.0, 2.0]) == 10.0


def test_elliptic_hand_value():
    assert base_eval("elliptic", [1.0, 1.0]) == pytest.approx(1.0 + 1e6)


def test_rosenbrock_hand_value():
    # z = (0, 0): 100 (0 - 0)^2 + (0 - 1)^2
    assert base_eval("rosenbrock", [0.0, 0.0]) == 1.0


def test_griewank_matches_direct_formula():
    z = np.array([3.0, -4.0, 5.0])
    expected = np.sum(z ** 2) / 4000 - np.prod(np.cos(z / np.sqrt([1, 2, 3]))) + 1
    assert base_eval("griewank", z) == pytest.approx(expected, rel=1e-12)


def test_weierstrass_zero_exactly_at_origin():
    assert base_eval("weierstrass", np.zeros(4)) == 0.0


def test_weierstrass_matches_direct_sum():
    a, b, kmax = 0.5, 3.0, 20
    z = np.array([0.2, -0.3])
    total = 0.0
    for zi in z:
        for k in range(kmax + 1):
            total += a ** k * np.cos(2 * np.pi * b ** k * (zi + 0.5))
    total -= z.size * sum(a ** k * np.cos(np.pi * b ** k) for k in range(kmax + 1))
    assert base_eval("weierstrass", z) == pytest.approx(total, abs=1e-9)


def test_expanded_functions_cyclic_and_zero_at_optimum():
    assert base_eval("griewank_rosenbrock", np.ones(5)) == pytest.approx(0.0, abs=1e-12)
    assert base_eval("schaffer_f6", np.zeros(5)) == pytest.approx(0.0, abs=1e-12)
    # cyclic pairing: a rotation of the coordinates leaves the value unchanged
    z = np.array([0.3, -0.7, 1.1, 0.4])
    rolled = np.roll(z, 1)
    assert base_eval("schaffer_f6", z) == pytest.approx(base_eval("schaffer_f6", rolled), rel=1e-12)


def test_base_eval_rejects_unknown_kind_and_low_dim():
    with pytest.raises(ValueError):
        base_eval("not_a_function", [0.0])
    with pytest.raises(ValueError):
        base_eval("rosenbrock", [0.0])


def test_nonnegative_bases_stay_nonnegative():
    rng = make_rng(11)
    for kind in ("sphere", "rastrigin", "ackley", "griewank", "weierstrass"):
        for _ in range(50):
            z = rng.uniform(-5, 5, 6)
            assert base_eval(kind, z) >= 0.0, kind


# --- rotations ----------------------------------------------------------


def test_rotation_d1_is_sign():
    for seed in range(5):
        m = random_rotation(1, make_rng(seed))
        assert m.shape == (1, 1)
        assert abs(m[0, 0]) == pytest.approx(1.0, rel=1e-12)


def test_rotation_orthogonality():
    m = random_rotation(10, make_rng(0))
    npt.assert_allclose(m @ m.T, np.eye(10), atol=1e-10)


def test_rotation_preserves_norms():
    m = random_rotation(30, make_rng(1))
    rng = make_rng(2)
    for _ in range(100):
        x = rng.standard_normal(30)
        ratio = np.linalg.norm(m @ x) / np.linalg.norm(x)
        assert abs(ratio - 1.0) < 1e-9


@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=1000))
@settings(max_examples=40)
def test_rotation_orthogonality_property(dim, seed):
    m = random_rotation(dim, make_rng(seed))
    assert np.max(np.abs(m @ m.T - np.eye(dim))) < 1e-10


# --- instances from descriptors ------------------------------------------


def test_shifted_sphere_zero_at_shift():
    desc = FunctionDescriptor(label="f", kind="sphere", seed=5)
    fn = make_test_function(desc, dim=6)
    shift = fn.body.transform.shift
    assert fn.space.contains(shift)
    assert fn(shift) == pytest.approx(0.0, abs=1e-24)


def test_single_body_optimum_equals_bias():
    desc = FunctionDescriptor(label="f", kind="rastrigin", bias=7.5, seed=9)
    fn = make_test_function(desc, dim=4)
    assert fn(fn.body.transform.shift) == pytest.approx(7.5, abs=1e-12)


def test_same_descriptor_and_seed_reproduces_instance():
    desc = FunctionDescriptor(label="f", kind="ackley", rotated=True, seed=33)
    f1 = make_test_function(desc, dim=5)
    f2 = make_test_function(desc, dim=5)
    npt.assert_array_equal(f1.body.transform.shift, f2.body.transform.shift)
    npt.assert_array_equal(f1.body.transform.rotation, f2.body.transform.rotation)
    x = make_rng(1).uniform(-32, 32, 5)
    assert f1(x) == f2(x)


def test_optimum_on_bounds_pins_components():
    desc = FunctionDescriptor(label="f", kind="ackley", optimum_on_bounds=True, seed=21)
    fn = make_test_function(desc, dim=6)
    shift = fn.body.transform.shift
    lo, hi = fn.space.lower, fn.space.upper
    on_edge = (shift == lo) | (shift == hi)
    assert on_edge.any()
    assert fn.space.contains(shift)


def test_rotated_sphere_matches_unrotated():
    plain = make_test_function(FunctionDescriptor(label="f", kind="sphere", seed=13), dim=8)
    rotated = make_test_function(
        FunctionDescriptor(label="f", kind="sphere", rotated=True, seed=13), dim=8
    )
    # the shift is drawn before the rotation, so both instances share it
    npt.assert_array_equal(plain.body.transform.shift, rotated.body.transform.shift)
    rng = make_rng(4)
    for _ in range(20):
        x = plain.space.sample_uniform(rng)
        assert rotated(x) == pytest.approx(plain(x), rel=1e-9)


def test_default_bounds_follow_base_convention():
    cases = {"sphere": 100.0, "rastrigin": 5.0, "ackley": 32.0, "griewank": 600.0, "weierstrass": 0.5}
    for kind, half in cases.items():
        fn = make_test_function(FunctionDescriptor(label="f", kind=kind, seed=1), dim=3)
        assert fn.space.lower[0] == -half
        assert fn.space.upper[0] == half


def test_make_test_function_validation():
    with pytest.raises(ValueError):
        make_test_function(FunctionDescriptor(label="f", kind="sphere"))  # no seed
    with pytest.raises(ValueError):
        make_test_function(FunctionDescriptor(label="f", kind="sphere", seed=1))  # no dim
    with pytest.raises(ValueError):
        make_test_function(FunctionDescriptor(label="f", kind="nope", seed=1), dim=3)
    with pytest.raises(ValueError):
        make_test_function(FunctionDescriptor(label="f", seed=1), dim=3)  # neither kind nor composition
    with pytest.raises(ValueError):
        make_test_function(FunctionDescriptor(label="f", kind="rosenbrock", seed=1), dim=1)


def test_noise_never_reduces_nonnegative_values():
    desc = FunctionDescriptor(label="f", kind="sphere", noisy=True, seed=3)
    noisy = make_test_function(desc, dim=4)
    clean = make_test_function(FunctionDescriptor(label="f", kind="sphere", seed=3), dim=4)
    rng = make_rng(8)
    for _ in range(200):
        x = noisy.space.sample_uniform(rng)
        assert noisy(x, rng) >= clean(x)


def test_noisy_function_requires_rng():
    fn = make_test_function(FunctionDescriptor(label="f", kind="sphere", noisy=True, seed=3), dim=2)
    with pytest.raises(ValueError):
        fn(np.zeros(2))


def test_noise_multiplies_before_bias():
    desc = FunctionDescriptor(label="f", kind="sphere", noisy=True, bias=100.0, seed=3)
    fn = make_test_function(desc, dim=2)
    shift = fn.body.transform.shift
    # zero-normalized value at the optimum is 0, so noise has nothing to scale
    assert fn(shift, make_rng(0)) == pytest.approx(100.0, abs=1e-12)


def test_function_rejects_wrong_shape():
    fn = make_test_function(FunctionDescriptor(label="f", kind="sphere", seed=1), dim=3)
    with pytest.raises(ValueError):
        fn(np.zeros(4))


def test_custom_function_wraps_callable():
    space = SearchSpace.box(1, 0.0, 1.0)
    fn = custom_function("line", space, lambda x: float(x[0]))
    assert fn(np.array([0.25])) == 0.25
    assert fn.label == "line"


# --- compositions ---------------------------------------------------------


def _component(kind, shift, sigma=1.0, lam=1.0, bias=0.0):
    return CompositionComponent(kind, Transform(np.asarray(shift, dtype=float), None, bias), sigma, lam)


def test_composition_needs_two_components():
    with pytest.raises(ValueError):
        Composition((_component("sphere", [0.0, 0.0]),))


def test_weights_at_component_optimum_dominate():
    comp = Composition((
        _component("sphere", [4.0, 4.0], bias=3.0),
        _component("rastrigin", [-4.0, -4.0]),
    ))
    w = composition_weights(comp, np.array([4.0, 4.0]))
    assert w[0] > 0.99
    assert compose_eval(comp, np.array([4.0, 4.0])) == pytest.approx(3.0, abs=1e-5)


def test_identical_components_collapse_to_single_value():
    c = _component("rastrigin", [1.0, -2.0])
    comp = Composition((c, c))
    x = np.array([0.5, 0.5])
    assert compose_eval(comp, x) == pytest.approx(c.value(x), rel=1e-12)


def test_midpoint_weights_match_direct_formula():
    shifts = [np.array([2.0, 0.0]), np.array([-2.0, 0.0]), np.array([0.0, 3.0])]
    sigmas = [1.0, 2.0, 0.5]
    comp = Composition(tuple(
        _component("sphere", s, sigma=sg) for s, sg in zip(shifts, sigmas)
    ))
    x = np.array([0.0, 0.0])  # midpoint of the first two shifts
    raw = np.array([
        np.exp(-np.sum((x - s) ** 2) / (2 * 2 * sg ** 2)) for s, sg in zip(shifts, sigmas)
    ])
    npt.assert_allclose(composition_weights(comp, x), raw / raw.sum(), rtol=1e-12)


def test_weights_underflow_falls_back_to_nearest():
    comp = Composition((
        _component("sphere", [1e6, 1e6], sigma=1e-3),
        _component("sphere", [-1e6, -1e6], sigma=1e-3),
    ))
    w = composition_weights(comp, np.array([1.0, 1.0]))
    npt.assert_array_equal(w, [1.0, 0.0])


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=60)
def test_weights_form_a_simplex(seed):
    rng = make_rng(seed)
    n = int(rng.integers(2, 6))
    d = int(rng.integers(1, 8))
    comp = Composition(tuple(
        _component("sphere", rng.uniform(-5, 5, d), sigma=float(rng.uniform(0.1, 3.0)))
        for _ in range(n)
    ))
    w = composition_weights(comp, rng.uniform(-5, 5, d))
    assert np.all(w >= 0)
    assert abs(w.sum() - 1.0) < 1e-12


def test_composition_lambda_stretches_component():
    c = _component("sphere", [0.0], lam=2.0)
    # z = (x - o) / lam, so f(2) with lam=2 equals sphere(1)
    assert c.value(np.array([2.0])) == pytest.approx(1.0, rel=1e-12)


# --- descriptors and the default suite -------------------------------------


def test_descriptor_roundtrip():
    desc = FunctionDescriptor(
        label="f",
        composition=[ComponentDescriptor(kind="sphere", sigma=0.5, lam=2.0, bias=1.0)] * 2,
        dim=7,
        bounds=(-3.0, 4.0),
        rotated=True,
        noisy=True,
        bias=2.5,
        category="custom",
        seed=77,
    )
    again = FunctionDescriptor.from_dict(desc.to_dict())
    assert again == desc
    assert desc.to_dict()["composition"][0]["lambda"] == 2.0


def test_suite_roundtrip_through_file(tmp_path):
    suite = default_suite()
    path = tmp_path / "suite.json"
    save_suite(path, suite)
    again = load_suite(path)
    assert again == suite


def test_default_suite_structure():
    suite = default_suite()
    assert len(suite) == 17
    labels = [d.label for d in suite]
    assert len(set(labels)) == 17
    categories = {d.category for d in suite}
    assert categories == {"unimodal", "multimodal_basic", "multimodal_expanded", "multimodal_hybrid"}
    assert all(d.seed is not None for d in suite)
    assert suite_by_label()["shifted_rotated_rastrigin"].rotated


def test_default_suite_instances_build_and_evaluate():
    rng = make_rng(0)
    for desc in default_suite():
        fn = make_test_function(desc, dim=30)
        x = fn.space.sample_uniform(rng)
        assert np.isfinite(fn(x, rng))


def test_suite_single_body_optima_sit_at_bias():
    for desc in default_suite():
        if desc.composition is not None or desc.noisy:
            continue
        fn = make_test_function(desc, dim=10)
        shift = fn.body.transform.shift
        assert fn(shift) == pytest.approx(desc.bias, abs=1e-7), desc.label
