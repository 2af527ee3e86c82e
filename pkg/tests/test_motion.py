import numpy as np
import pytest

import oracles
from alvs.frontend import ChannelPair, rectify
from alvs.motion import DIRECTIONS, DelayLine, MotionMaps, compute_motion, hrc_channel, local_motion
from alvs.params import FRAME_SHAPE


def test_static_scene_cancels(rng):
    m = rng.uniform(0, 50, (12, 15))
    for v in DIRECTIONS:
        assert not hrc_channel(m, m, v, 3, 1).any()


def test_rightward_edge_hand_value():
    delayed = np.zeros((4, 12))
    now = np.zeros((4, 12))
    delayed[:, 5] = 10
    now[:, 6] = 10
    r = hrc_channel(now, delayed, "r", n=1, s=1)
    l = hrc_channel(now, delayed, "l", n=1, s=1)
    assert np.all(r[:, 5] == 100)
    assert np.all(l <= 0)


def test_unwarmed_gives_zero():
    assert not hrc_channel(np.ones((3, 3)), None, "r").any()


def test_unknown_direction():
    with pytest.raises(ValueError):
        hrc_channel(np.ones((3, 3)), np.ones((3, 3)), "x")


@pytest.mark.parametrize("n, s", [(1, 1), (3, 1), (2, 3)])
def test_sparse_channels_match_loop_oracle(rng, n, s):
    shape = (14, 17)
    now = np.where(rng.random(shape) < 0.2, rng.integers(0, 255, shape), 0)
    delayed = np.where(rng.random(shape) < 0.2, rng.integers(0, 255, shape), 0)
    for v in DIRECTIONS:
        assert np.array_equal(hrc_channel(now, delayed, v, n, s), oracles.hrc(now, delayed, v, n, s))


def test_local_motion_sums_channels(rng):
    t4 = {v: rng.normal(size=(3, 4)) for v in DIRECTIONS}
    zeros = {v: np.zeros((3, 4)) for v in DIRECTIONS}
    lm = local_motion(t4, zeros)
    for v in DIRECTIONS:
        assert np.array_equal(lm[v], t4[v])
    z = local_motion(zeros, zeros)
    assert not any(z[v].any() for v in DIRECTIONS)


def test_dark_bar_moving_right_prefers_r():
    def frame(x0):
        img = np.full(FRAME_SHAPE, 200.0)
        img[:, x0 : x0 + 4] = 30.0
        return img

    a, b, c = frame(40), frame(41), frame(42)
    prev_pair = rectify(b - a, 0.25)
    now_pair = rectify(c - b, 0.25)
    lm, _, _ = compute_motion(now_pair, prev_pair, 3, 1)
    hit = lm["r"] > 0
    assert hit.any()
    assert np.all(lm["l"][hit] <= 0)


def test_delay_line_ring_and_compact_roundtrip(rng):
    on = rng.integers(0, 256, (4, 5)) * 0.25
    off = rng.integers(0, 256, (4, 5)).astype(float)
    for compact in (False, True):
        line = DelayLine(2, compact)
        assert line.oldest() is None
        line.push(ChannelPair(on, off))
        assert not line.warm
        line.push(ChannelPair(on * 0, off * 0))
        old = line.oldest()
        assert np.array_equal(old.on, on) and np.array_equal(old.off, off)


def test_motion_maps_zeros():
    z = MotionMaps.zeros((2, 2))
    assert z["u"].shape == (2, 2) and not z.lm_r.any()
