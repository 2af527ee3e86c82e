import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from alvs.attention import FieldSet
from alvs.frontend import rectify, smooth3x3
from alvs.lplc2 import quadrant_sums
from alvs.motion import MotionMaps, hrc_channel
from alvs.params import FRAME_WIDTH, ModelParams
from alvs.visuomotor import bearing, short_headings, summarize, wrap

pixels = st.floats(-255, 255, allow_nan=False, width=32)
small = st.tuples(st.integers(2, 7), st.integers(2, 7))


def _pair(shape):
    return st.tuples(arrays(np.float64, shape, elements=pixels), arrays(np.float64, shape, elements=pixels))


@given(small.flatmap(_pair), st.sampled_from("rldu"), st.integers(1, 4), st.integers(1, 2))
def test_hrc_matches_loop_reference(pair, direction, n, s):
    now, delayed = pair
    got = hrc_channel(now, delayed, direction, n, s)
    want = oracles.hrc(now, delayed, direction, n, s)
    assert np.allclose(got, want, atol=1e-6)


@given(small.flatmap(_pair), st.sampled_from("rldu"))
def test_hrc_time_reversal_flips_sign(pair, direction):
    now, delayed = pair
    assert np.allclose(hrc_channel(now, delayed, direction), -hrc_channel(delayed, now, direction), atol=1e-6)


@given(small.flatmap(lambda sh: arrays(np.float64, sh, elements=pixels)), st.sampled_from("rldu"))
def test_hrc_static_input_is_silent(m, direction):
    assert np.allclose(hrc_channel(m, m, direction), 0.0, atol=1e-6)


@given(small.flatmap(_pair))
def test_hrc_mirror_swaps_left_and_right(pair):
    now, delayed = pair
    right = hrc_channel(now, delayed, "r")
    left_of_mirror = hrc_channel(now[:, ::-1], delayed[:, ::-1], "l")
    assert np.allclose(right, left_of_mirror[:, ::-1], atol=1e-6)


@given(small.flatmap(_pair), st.floats(-3, 3, allow_nan=False))
def test_smoothing_is_linear_and_matches_reference(pair, k):
    a, b = pair
    assert np.allclose(smooth3x3(a + k * b), smooth3x3(a) + k * smooth3x3(b), atol=1e-6)
    assert np.allclose(smooth3x3(a), oracles.smooth(a), atol=1e-9)


@given(small.flatmap(lambda sh: arrays(np.float64, sh, elements=pixels)), st.floats(0.01, 4))
def test_rectify_reconstructs_difference(diff, w):
    pair = rectify(diff, w)
    assert (pair.on >= 0).all() and (pair.off >= 0).all()
    assert not (pair.on * pair.off).any()
    assert np.allclose(pair.on / w - pair.off, diff)


@given(st.floats(-1e4, 1e4, allow_nan=False))
def test_wrap_range_and_congruence(a):
    w = wrap(a)
    assert -180 < w <= 180
    assert math.isclose(math.remainder(w - a, 360.0), 0.0, abs_tol=1e-7)


@given(st.floats(0, FRAME_WIDTH - 1))
def test_short_headings_perpendicular_then_opposite(cx):
    alpha = ModelParams().alpha
    b = bearing(cx, alpha)
    t1, t2 = short_headings(cx, alpha)
    assert math.isclose(abs(t1 - b), 90.0, abs_tol=1e-9)
    assert abs(wrap(t2 - (b + 180.0))) < 1e-9


@given(st.lists(st.tuples(st.floats(0, 98), st.floats(0, 1e5)), min_size=1, max_size=5), st.floats(100, 1e4))
def test_summary_strength_and_centroid(entries, w_s):
    xs, vs = zip(*entries)
    s = summarize(xs, vs, w_s)
    assert math.isclose(s.strength, oracles.sigmoid(sum(vs), w_s), rel_tol=1e-12)
    assert 0.5 <= s.strength <= 1.0
    if s.raw_sum > 0:
        assert min(xs) - 1e-9 <= s.centroid_x <= max(xs) + 1e-9


@given(st.lists(st.tuples(st.integers(0, 98), st.integers(0, 71)), min_size=1, max_size=6))
def test_fusion_matches_sequential_scan(points):
    fs = FieldSet()
    for x, y in points:
        fs.add(x, y)
    fs.fuse()
    want = oracles.fuse([(i, x, y) for i, (x, y) in enumerate(points)], fs.half_side)
    assert [f.id for f in fs] == want


@given(
    st.integers(0, 98),
    st.integers(0, 71),
    st.integers(2, 40),
    st.integers(0, 2**31 - 1),
)
def test_quadrants_match_reference(cx, cy, half, seed):
    rng = np.random.default_rng(seed)
    maps = {v: rng.normal(size=(72, 99)) for v in "rldu"}
    fs = FieldSet(half_side=half)
    f = fs.add(cx, cy)
    got = quadrant_sums(f, MotionMaps(maps["r"], maps["l"], maps["d"], maps["u"])).as_tuple()
    want = oracles.quadrants(maps, cx, cy, half)
    assert np.allclose(got, want)


@given(st.integers(0, 2**31 - 1), st.floats(50, 500))
def test_spawn_matches_masked_argmax(seed, t_a):
    rng = np.random.default_rng(seed)
    sal = rng.integers(0, 400, size=(72, 99)).astype(float)
    fs = FieldSet()
    fs.add(int(rng.integers(0, 99)), int(rng.integers(0, 72)))
    squares = [(f.cx, f.cy, f.half_side) for f in fs]
    want = oracles.masked_argmax(sal, squares)
    got = fs.spawn(sal, t_a)
    if want is None or not want[2] > t_a:
        assert got is None
    else:
        assert (got.cx, got.cy) == want[:2]
