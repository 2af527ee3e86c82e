"""Direction-selective local motion via Hassenstein-Reichardt correlation."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from alvs.frontend import ChannelPair

DIRECTIONS = ("r", "l", "d", "u")

# Q8.8 fixed point: channel values are multiples of 0.25 in [0, 255], so
# storing them this way is lossless.
_Q = 256.0


@dataclass(frozen=True)
class MotionMaps:
    lm_r: np.ndarray
    lm_l: np.ndarray
    lm_d: np.ndarray
    lm_u: np.ndarray

    def __getitem__(self, direction: str) -> np.ndarray:
        return getattr(self, "lm_" + direction)

    @classmethod
    def zeros(cls, shape) -> "MotionMaps":
        return cls(*(np.zeros(shape) for _ in DIRECTIONS))


def _slices(direction: str, k: int, shape):
    """(near, far) index pairs for a correlation offset of ``k`` pixels."""
    h, w = shape
    whole = slice(None)
    if direction == "r":
        return (whole, slice(0, w - k)), (whole, slice(k, w))
    if direction == "l":
        return (whole, slice(k, w)), (whole, slice(0, w - k))
    if direction == "d":
        return (slice(0, h - k), whole), (slice(k, h), whole)
    if direction == "u":
        return (slice(k, h), whole), (slice(0, h - k), whole)
    raise ValueError(f"unknown direction {direction!r}")


def hrc_channel(now, delayed, direction: str, n: int = 3, s: int = 1, undelayed: bool = False) -> np.ndarray:
    """Opponent correlation of one channel along one cardinal direction.

    For ``r``: ``sum_c delayed(x)*now(x+cs) - now(x)*delayed(x+cs)``.
    Partners that fall outside the frame contribute nothing. With
    ``undelayed=True`` the second product uses ``now`` for both factors.
    """
    now = np.asarray(now, dtype=np.float64)
    if delayed is None:
        return np.zeros_like(now)
    delayed = np.asarray(delayed, dtype=np.float64)
    if now.shape != delayed.shape:
        raise ValueError("channel shapes differ")
    out = np.zeros_like(now)
    extent = now.shape[1] if direction in "rl" else now.shape[0]
    for c in range(1, n + 1):
        k = c * s
        if k >= extent:
            break
        near, far = _slices(direction, k, now.shape)
        if undelayed:
            out[near] += now[far] * delayed[near] - now[near] * now[far]
        else:
            out[near] += delayed[near] * now[far] - now[near] * delayed[far]
    return out


def local_motion(t4: dict, t5: dict) -> MotionMaps:
    """ON and OFF detector outputs converge per direction."""
    return MotionMaps(*(t4[v] + t5[v] for v in DIRECTIONS))


class DelayLine:
    """Ring of the last ``c_d`` unsmoothed channel pairs.

    With ``compact=True`` entries are held as 16-bit fixed point.
    """

    def __init__(self, c_d: int, compact: bool = False):
        self.c_d = c_d
        self.compact = compact
        self._ring: deque = deque(maxlen=c_d)

    def __len__(self):
        return len(self._ring)

    @property
    def warm(self) -> bool:
        return len(self._ring) == self.c_d

    def oldest(self) -> ChannelPair | None:
        if not self.warm:
            return None
        on, off = self._ring[0]
        if self.compact:
            return ChannelPair(on.astype(np.float64) / _Q, off.astype(np.float64) / _Q)
        return ChannelPair(on, off)

    def push(self, pair: ChannelPair) -> None:
        if self.compact:
            self._ring.append((np.rint(pair.on * _Q).astype(np.uint16), np.rint(pair.off * _Q).astype(np.uint16)))
        else:
            self._ring.append((pair.on.copy(), pair.off.copy()))


def compute_motion(now: ChannelPair, delayed: ChannelPair | None, n: int, s: int, undelayed: bool = False):
    """Returns ``(MotionMaps, t4, t5)`` where t4/t5 map direction -> map."""
    if delayed is None:
        z = MotionMaps.zeros(now.on.shape)
        zeros = {v: z[v] for v in DIRECTIONS}
        return z, zeros, dict(zeros)
    t4 = {v: hrc_channel(now.on, delayed.on, v, n, s, undelayed) for v in DIRECTIONS}
    t5 = {v: hrc_channel(now.off, delayed.off, v, n, s, undelayed) for v in DIRECTIONS}
    return local_motion(t4, t5), t4, t5
