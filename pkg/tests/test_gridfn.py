import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lacvar import (
    Atom,
    BadParams,
    EmptyFamily,
    GridFunction,
    GridMismatch,
    Interval,
    IntervalTooSmall,
    UniformGrid,
    average_over,
    bmo_norm,
    lp_norm,
    make_atom,
    make_dyadic_family,
    make_family,
    read_function_csv,
    sup_norm,
    superlevel_measure,
    write_function_csv,
)


def test_grid_edges_and_midpoints():
    g = UniformGrid(1.0, 0.5, 3)
    assert np.array_equal(g.edges, [1.0, 1.5, 2.0, 2.5])
    assert np.array_equal(g.midpoints, [1.25, 1.75, 2.25])
    assert g.x1 == 2.5


def test_grid_rejects_bad_params():
    with pytest.raises(ValueError):
        UniformGrid(0.0, 0.0, 4)
    with pytest.raises(ValueError):
        UniformGrid(0.0, 1.0, 0)


def test_function_is_right_open_and_zero_extended():
    f = GridFunction(0.0, 1.0, [2.0, 3.0])
    assert f(np.array([-0.5, 0.0, 0.999, 1.0, 1.999, 2.0, 5.0])).tolist() == [
        0.0, 2.0, 2.0, 3.0, 3.0, 0.0, 0.0,
    ]


def test_function_values_are_read_only():
    f = GridFunction(0.0, 1.0, [1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0] = 9.0


def test_integral_handles_partial_cells():
    f = GridFunction(0.0, 1.0, [2.0, 4.0])
    assert f.integral(0.5, 1.5) == pytest.approx(1.0 + 2.0)
    assert f.integral(-3.0, 0.5) == pytest.approx(1.0)
    assert f.integral(1.5, 10.0) == pytest.approx(2.0)


def test_lp_norm_hand_value():
    f = GridFunction(0.0, 0.5, [1.0, 2.0, 3.0])
    assert lp_norm(f, 2.0) == pytest.approx(math.sqrt(0.5 * 14.0))
    assert lp_norm(f, 1.0) == pytest.approx(3.0)
    assert sup_norm(f) == 3.0


def test_lp_norm_weighted_hand_value():
    f = GridFunction(0.0, 0.5, [1.0, 2.0, 3.0])
    w = GridFunction(0.0, 0.5, [1.0, 1.0, 2.0])
    # int |f|^2 w = 0.5 * (1 + 4 + 18) = 11.5
    assert lp_norm(f, 2.0, w) == pytest.approx(math.sqrt(11.5))


def test_lp_norm_weight_grid_mismatch():
    f = GridFunction(0.0, 0.5, [1.0, 2.0])
    w = GridFunction(0.0, 0.25, [1.0, 1.0])
    with pytest.raises(GridMismatch):
        lp_norm(f, 2.0, w)
    with pytest.raises(GridMismatch):
        lp_norm(f, 2.0, np.ones(3))


def test_superlevel_measure_hand_value():
    f = GridFunction(0.0, 1.0, [0.2, 0.7, 1.3])
    assert superlevel_measure(f, 0.5) == 2.0
    assert superlevel_measure(f, 0.7) == 1.0  # strict inequality
    assert superlevel_measure(f, 2.0) == 0.0


@given(
    st.lists(st.floats(min_value=-5, max_value=5), min_size=1, max_size=30),
    st.floats(min_value=-6, max_value=6),
    st.floats(min_value=0, max_value=3),
)
def test_superlevel_monotone_in_lambda(vals, lam, bump):
    f = GridFunction(0.0, 0.25, vals)
    assert superlevel_measure(f, lam + bump) <= superlevel_measure(f, lam)


@given(
    st.lists(st.integers(-8000, 8000), min_size=1, max_size=40),
    st.lists(st.integers(-8000, 8000), min_size=1, max_size=40),
    st.floats(min_value=1.0, max_value=8.0),
)
def test_lp_triangle_and_homogeneity(a, b, p):
    n = min(len(a), len(b))
    av = np.asarray(a[:n], dtype=np.float64) * 0.125
    bv = np.asarray(b[:n], dtype=np.float64) * 0.125
    f = GridFunction(0.0, 0.5, av)
    g = GridFunction(0.0, 0.5, bv)
    fg = GridFunction(0.0, 0.5, av + bv)
    assert lp_norm(fg, p) <= lp_norm(f, p) + lp_norm(g, p) + 1e-9
    cf = GridFunction(0.0, 0.5, 3.5 * av)
    assert lp_norm(cf, p) == pytest.approx(3.5 * lp_norm(f, p), rel=1e-9, abs=1e-12)


# ---------------------------------------------------------------- families


def test_dyadic_family_counts_on_unit_pair():
    fam = make_dyadic_family(Interval(0.0, 2.0), 0.5)
    lens = sorted(i.length for i in fam)
    assert lens == [0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 2.0]
    assert all(i.lo >= 0.0 and i.hi <= 2.0 for i in fam)


def test_dyadic_family_shifts_add_intervals():
    plain = make_dyadic_family(Interval(0.0, 2.0), 0.5)
    shifted = make_dyadic_family(Interval(0.0, 2.0), 0.5, shifts=(0.0, 0.5))
    assert len(shifted) > len(plain)
    assert set(plain).issubset(set(shifted))


def test_dyadic_family_margin_and_outside():
    fam = make_dyadic_family(Interval(0.0, 1.0), 1.0, margin=1.0, inside_only=False)
    assert any(i.lo < 0.0 for i in fam)


def test_dyadic_family_empty_raises():
    with pytest.raises(EmptyFamily):
        make_dyadic_family(Interval(0.0, 1.0), 4.0)


def test_average_over_matches_integral():
    f = GridFunction(0.0, 1.0, [2.0, 4.0])
    I = Interval(0.5, 1.5)
    assert average_over(f, I) == pytest.approx(f.integral(0.5, 1.5) / 1.0)


def test_bmo_hand_value():
    f = GridFunction(0.0, 0.5, [1.0, 1.0, -1.0, -1.0])
    assert bmo_norm(f, (Interval(0.0, 2.0),)) == pytest.approx(1.0)
    # single-sign interval has no oscillation
    assert bmo_norm(f, (Interval(0.0, 1.0),)) == 0.0


def test_bmo_partial_cell_fragments():
    f = GridFunction(0.0, 1.0, [0.0, 2.0])
    # over (0.5, 1.5): avg = 1, |f - 1| = 1 throughout, osc = 1
    assert bmo_norm(f, (Interval(0.5, 1.5),)) == pytest.approx(1.0)


def test_bmo_empty_family_raises():
    with pytest.raises(EmptyFamily):
        bmo_norm(GridFunction(0.0, 1.0, [1.0]), ())


@given(st.lists(st.floats(min_value=-10, max_value=10), min_size=2, max_size=50), st.integers(0, 5))
def test_bmo_at_most_twice_sup(vals, seed):
    f = GridFunction(0.0, 1.0 / len(vals), vals)
    fam = make_dyadic_family(Interval(0.0, 1.0), 0.25, margin=1.0, inside_only=False)
    assert bmo_norm(f, fam) <= 2.0 * sup_norm(f) + 1e-9


# ------------------------------------------------------------------- atoms


def test_atom_frozen_shape():
    I = Interval(0.0, 2.0)
    atom = make_atom(I, seed=7, cells=16)
    assert isinstance(atom, Atom)
    assert atom.interval == I
    assert atom.fn.n == 16
    assert atom.fn.x0 == 0.0 and atom.fn.x1 == 2.0
    assert sup_norm(atom.fn) == pytest.approx(1.0 / I.length, rel=1e-15)
    assert abs(atom.fn.integral(I.lo, I.hi)) <= 1e-14 * sup_norm(atom.fn) * I.length


def test_atoms_at_different_scales_are_dilates():
    a = make_atom(Interval(0.0, 1.0), seed=3, cells=8)
    b = make_atom(Interval(0.0, 4.0), seed=3, cells=8)
    assert np.allclose(b.fn.values * 4.0, a.fn.values, rtol=1e-15)


def test_atom_needs_two_cells():
    with pytest.raises(IntervalTooSmall):
        make_atom(Interval(0.0, 1.0), seed=0, cells=1)


def test_family_indicator_and_spike():
    ind = make_family("indicator", {"scales": [1.0, 2.0]})
    assert [f.x1 for f in ind] == [1.0, 2.0]
    assert all(np.all(f.values == 1.0) for f in ind)
    spk = make_family("spike", {"epsilons": [0.25]})
    assert spk[0].values.tolist() == [4.0]
    assert lp_norm(spk[0], 1.0) == pytest.approx(1.0)


def test_family_haar_and_bump():
    haar = make_family("haar", {"scales": [2.0]})[0]
    assert haar.values.tolist() == [1.0, -1.0]
    assert haar.integral(0.0, 2.0) == 0.0
    bump = make_family("bump", {"scales": [1.0], "cells": 32})[0]
    assert np.all(bump.values >= 0.0)
    assert sup_norm(bump) <= 1.0


def test_family_random_step_seeded():
    a = make_family("random_step", {"count": 3, "seed": 5, "cells": 8})
    b = make_family("random_step", {"count": 3, "seed": 5, "cells": 8})
    for fa, fb in zip(a, b):
        assert np.array_equal(fa.values, fb.values)


def test_family_respects_origin_param():
    f = make_family("indicator", {"scales": [2.0], "x0": -1.0})[0]
    assert f.x0 == -1.0 and f.x1 == 1.0


def test_family_bad_params():
    with pytest.raises(BadParams):
        make_family("indicator", {})
    with pytest.raises(BadParams):
        make_family("random_step", {"count": 0})
    with pytest.raises(BadParams):
        make_family("nosuch", {})


# --------------------------------------------------------------------- CSV


def test_csv_round_trip_bit_exact():
    rng = np.random.default_rng(11)
    f = GridFunction(-0.375, 1.0 / 3.0, rng.standard_normal(9))
    buf = io.StringIO()
    write_function_csv(f, buf)
    buf.seek(0)
    g = read_function_csv(buf)
    assert g.x0 == f.x0 and g.h == f.h and g.n == f.n
    assert np.array_equal(g.values, f.values)


def test_csv_layout_metadata_then_header_then_left_edges():
    f = GridFunction(0.5, 0.25, [1.0, -2.0, 3.0])
    buf = io.StringIO()
    write_function_csv(f, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# x0=0.5 h=0.25 n=3"
    assert lines[1] == "x,value"
    assert len(lines) == 5
    assert lines[2].split(",")[0] == "0.5"
    assert lines[4].split(",")[0] == "1"


def test_csv_rejects_row_count_mismatch():
    text = "# x0=0 h=1 n=3\nx,value\n0,1\n1,2\n"
    with pytest.raises(ValueError):
        read_function_csv(io.StringIO(text))


def test_csv_rejects_bad_header():
    text = "# x0=0 h=1 n=1\nxx,value\n0,1\n"
    with pytest.raises(ValueError):
        read_function_csv(io.StringIO(text))


def test_csv_file_path_round_trip(tmp_path):
    f = GridFunction(0.0, 0.125, np.linspace(-1, 1, 16))
    path = str(tmp_path / "f.csv")
    write_function_csv(f, path)
    g = read_function_csv(path)
    assert np.array_equal(g.values, f.values)
