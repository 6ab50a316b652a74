import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lacvar import (
    GridFunction,
    NonPositiveWindow,
    TailTooLarge,
    UniformGrid,
    VariationSpec,
    average_fast,
    average_oracle,
    averages_at,
    default_eval_grid,
    oracle_averages_at,
    parse_sequence,
    scale_stack_at,
    tail_bound,
    variation,
    variation_at,
    vector_variation,
)
from lacvar.avgops import _compensated_power_sum, l1_norm


def _spec(**kw):
    kw.setdefault("s", 2.0)
    kw.setdefault("k_max", 1)
    kw.setdefault("enforce_tail", False)
    return VariationSpec(**kw)


# ------------------------------------------------------------ plain windows


def test_average_of_indicator_hand_value():
    f = GridFunction(0.0, 0.125, np.ones(8))  # indicator of [0, 1)
    # window [0, 2] sees mass 1 over width 2
    assert averages_at(f, 2.0, 2.0)[0] == pytest.approx(0.5, rel=1e-15)
    assert oracle_averages_at(f, 2.0, 2.0)[0] == pytest.approx(0.5, rel=1e-15)


def test_average_of_linear_function_is_exact():
    # step values at midpoints of y = x make cell-aligned window sums exact
    grid = UniformGrid(0.0, 0.5, 120)
    f = GridFunction(grid.x0, grid.h, grid.midpoints)
    got = averages_at(f, 10.0, 50.0)[0]
    assert got == pytest.approx(45.0, abs=1e-12)
    assert oracle_averages_at(f, 10.0, 50.0)[0] == pytest.approx(45.0, abs=1e-12)


def test_window_must_be_positive():
    f = GridFunction(0.0, 1.0, [1.0])
    with pytest.raises(NonPositiveWindow):
        averages_at(f, 0.0, 1.0)
    with pytest.raises(NonPositiveWindow):
        oracle_averages_at(f, -1.0, 1.0)


def test_average_vanishes_off_support():
    f = GridFunction(0.0, 0.25, np.ones(4))
    # window entirely right of the support, and entirely left
    assert averages_at(f, 1.0, 5.0)[0] == 0.0
    assert averages_at(f, 1.0, -3.0)[0] == 0.0


@given(
    st.integers(0, 2**32 - 1),
    st.integers(min_value=2, max_value=60),
    st.floats(min_value=0.01, max_value=50.0),
)
def test_fast_path_matches_oracle(seed, cells, window):
    rng = np.random.default_rng(seed)
    f = GridFunction(-1.0, 2.0 / cells, rng.uniform(-1.0, 1.0, size=cells))
    x = rng.uniform(-3.0, 4.0, size=64)
    a = averages_at(f, window, x)
    b = oracle_averages_at(f, window, x)
    denom = max(np.max(np.abs(b)), 1e-30)
    assert np.max(np.abs(a - b)) / denom <= 1e-12


def test_average_grid_variants_agree(dyadic13, step_fn):
    f = step_fn(seed=4)
    grid = default_eval_grid(f, dyadic13, 5)
    fa = average_fast(f, dyadic13.scales[3], grid)
    fo = average_oracle(f, dyadic13.scales[3], grid)
    assert fa.grid.n == fo.grid.n
    assert np.max(np.abs(fa.values - fo.values)) <= 1e-13


# --------------------------------------------------------------- variation


def test_variation_of_indicator_dyadic_hand_value():
    # A_{2^k} of the unit indicator at x = 1 is exactly 2^-k, so the squared
    # differences telescope to (1 - 4^-K) / 3
    f = GridFunction(0.0, 0.125, np.ones(8))
    seq = parse_sequence("geometric:1:2:13")
    for K in (1, 4, 12):
        got = variation_at(f, seq, _spec(k_max=K), 1.0)[0]
        assert got == pytest.approx(math.sqrt((1.0 - 4.0**-K) / 3.0), rel=1e-13)


def test_variation_s1_hand_value():
    f = GridFunction(0.0, 0.125, np.ones(8))
    seq = parse_sequence("geometric:1:2:13")
    got = variation_at(f, seq, _spec(s=1.0, k_max=12), 1.0)[0]
    assert got == pytest.approx(1.0 - 2.0**-12, rel=1e-14)


def test_variation_homogeneity(step_fn):
    f = step_fn(seed=9)
    g = GridFunction(f.x0, f.h, 7.25 * f.values)
    seq = parse_sequence("geometric:0.25:2:6")
    x = np.linspace(-0.5, 4.0, 37)
    vf = variation_at(f, seq, _spec(k_max=5), x)
    vg = variation_at(g, seq, _spec(k_max=5), x)
    assert np.allclose(vg, 7.25 * vf, rtol=1e-12, atol=1e-15)


def test_variation_translation_equivariance(step_fn):
    # shifting by an exact multiple of the cell width shifts the variation
    f = step_fn(seed=2, cells=16)
    shift = 5 * f.h
    g = GridFunction(f.x0 + shift, f.h, f.values)
    seq = parse_sequence("geometric:0.5:2:5")
    x = np.arange(29) * 0.125  # exactly representable, so x + shift is too
    vf = variation_at(f, seq, _spec(k_max=4), x)
    vg = variation_at(g, seq, _spec(k_max=4), x + shift)
    assert np.array_equal(vf, vg)


def test_variation_dilation_covariance(step_fn):
    # V(f(./2)) over doubled scales at 2x equals V(f) over the base scales
    f = step_fn(seed=6, cells=16)
    g = GridFunction(2.0 * f.x0, 2.0 * f.h, f.values)
    seq = parse_sequence("geometric:0.5:2:5")
    seq2 = parse_sequence("geometric:1:2:5")
    x = np.linspace(0.25, 2.5, 19)
    vf = variation_at(f, seq, _spec(k_max=4), x)
    vg = variation_at(g, seq2, _spec(k_max=4), 2.0 * x)
    assert np.allclose(vf, vg, rtol=1e-13, atol=1e-16)


@given(st.integers(0, 1000), st.floats(min_value=1.0, max_value=4.0), st.floats(min_value=1.0, max_value=4.0))
def test_variation_nesting_in_s(seed, s1, s2):
    lo, hi = sorted((s1, s2))
    rng = np.random.default_rng(seed)
    f = GridFunction(0.0, 0.25, rng.uniform(-1.0, 1.0, size=8))
    seq = parse_sequence("geometric:0.5:2:6")
    x = rng.uniform(-1.0, 4.0, size=16)
    v_lo = variation_at(f, seq, _spec(s=lo, k_max=5), x)
    v_hi = variation_at(f, seq, _spec(s=hi, k_max=5), x)
    assert np.all(v_hi <= v_lo * (1.0 + 1e-12) + 1e-15)


@given(st.integers(0, 1000))
def test_variation_subadditive(seed):
    rng = np.random.default_rng(seed)
    f = GridFunction(0.0, 0.25, rng.uniform(-1.0, 1.0, size=8))
    g = GridFunction(0.0, 0.25, rng.uniform(-1.0, 1.0, size=8))
    fg = GridFunction(0.0, 0.25, f.values + g.values)
    seq = parse_sequence("geometric:0.5:2:6")
    x = rng.uniform(-1.0, 4.0, size=16)
    spec = _spec(k_max=5)
    vf = variation_at(f, seq, spec, x)
    vg = variation_at(g, seq, spec, x)
    vfg = variation_at(fg, seq, spec, x)
    assert np.all(vfg <= vf + vg + 1e-12)


def test_scale_stack_shape(dyadic13, step_fn):
    f = step_fn(seed=1)
    stack = scale_stack_at(f, dyadic13, 6, np.linspace(0, 2, 11))
    assert stack.levels.shape == (7, 11)
    assert stack.scales == dyadic13.scales[:7]


def test_variation_grid_output(dyadic13, step_fn):
    f = step_fn(seed=3)
    spec = _spec(k_max=12)
    v = variation(f, dyadic13, spec)
    grid = default_eval_grid(f, dyadic13, 12)
    assert v.n == grid.n
    assert v.x0 == grid.x0
    # support + pad covers everything nonzero
    assert grid.x1 >= f.x1 + dyadic13.scales[12]


# -------------------------------------------------------------------- tail


def test_tail_bound_frozen_value():
    # unit-mass indicator, beta = 2, s = 2, top scale 2^20: the two bounds
    # coincide at 2 / (2^20 * sqrt(3))
    f = GridFunction(0.0, 0.125, np.ones(8))
    seq = parse_sequence("geometric:1:2:21")
    got = tail_bound(f, seq, 2.0, 20)
    assert got == pytest.approx(2.0 / (2.0**20 * math.sqrt(3.0)), rel=1e-14)


def test_tail_bound_scales_with_mass():
    f1 = GridFunction(0.0, 0.5, np.ones(2))
    f3 = GridFunction(0.0, 0.5, 3.0 * np.ones(2))
    seq = parse_sequence("geometric:1:2:6")
    assert tail_bound(f3, seq, 2.0, 5) == pytest.approx(3.0 * tail_bound(f1, seq, 2.0, 5))
    assert l1_norm(f3) == pytest.approx(3.0)


def test_tail_gate_raises_and_estimates_depth():
    f = GridFunction(0.0, 0.125, np.ones(8))
    seq = parse_sequence("geometric:1:2:30")
    tight = VariationSpec(s=2.0, k_max=4, tail_tol=1e-6)
    with pytest.raises(TailTooLarge) as exc:
        variation_at(f, seq, tight, np.array([0.5]))
    k_needed = exc.value.k_needed
    assert k_needed is not None and 4 < k_needed <= 29
    # the suggested depth satisfies the same tolerance
    relaxed = VariationSpec(s=2.0, k_max=k_needed, tail_tol=1e-6)
    variation_at(f, seq, relaxed, np.array([0.5]))


def test_tail_gate_waived_by_flag():
    f = GridFunction(0.0, 0.125, np.ones(8))
    seq = parse_sequence("geometric:1:2:30")
    spec = VariationSpec(s=2.0, k_max=2, tail_tol=1e-12, enforce_tail=False)
    variation_at(f, seq, spec, np.array([0.5]))  # must not raise


def test_spec_validation():
    with pytest.raises(ValueError):
        VariationSpec(s=0.5, k_max=1)
    with pytest.raises(ValueError):
        VariationSpec(s=2.0, k_max=0)
    with pytest.raises(ValueError):
        VariationSpec(s=2.0, k_max=1, tail_tol=0.0)
    spec = VariationSpec(s=2.0, k_max=9)
    with pytest.raises(ValueError):
        spec.check_seq(parse_sequence("geometric:1:2:5"))


# ------------------------------------------------------------------ vector


def test_vector_variation_single_function_reduces(step_fn):
    f = step_fn(seed=12)
    seq = parse_sequence("geometric:0.5:2:6")
    spec = _spec(k_max=5)
    grid = default_eval_grid(f, seq, 5)
    vv = vector_variation([f], seq, spec, 2.0, grid)
    v = variation(f, seq, spec, grid)
    assert np.allclose(vv.values, v.values, rtol=1e-14, atol=1e-300)


def test_vector_variation_monotone_in_rho(step_fn):
    fs = [step_fn(seed=s) for s in range(4)]
    seq = parse_sequence("geometric:0.5:2:6")
    spec = _spec(k_max=5)
    grid = default_eval_grid(fs[0], seq, 5)
    v15 = vector_variation(fs, seq, spec, 1.5, grid)
    v2 = vector_variation(fs, seq, spec, 2.0, grid)
    v3 = vector_variation(fs, seq, spec, 3.0, grid)
    assert np.all(v2.values <= v15.values * (1.0 + 1e-12))
    assert np.all(v3.values <= v2.values * (1.0 + 1e-12))


def test_vector_variation_rejects_mixed_grids(step_fn):
    f = step_fn(seed=0)
    g = step_fn(seed=0, cells=16)
    seq = parse_sequence("geometric:0.5:2:6")
    with pytest.raises(Exception):
        vector_variation([f, g], seq, _spec(k_max=5), 2.0)


# ----------------------------------------------------- compensated summing


@given(
    st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=40),
    st.sampled_from([1.0, 1.5, 2.0, 3.0]),
)
def test_compensated_power_sum_matches_fsum(diffs, s):
    col = np.asarray(diffs, dtype=np.float64).reshape(-1, 1)
    got = _compensated_power_sum(col, s)[0]
    want = math.fsum(float(d) ** s for d in diffs)
    assert got == pytest.approx(want, rel=1e-15, abs=1e-300)
