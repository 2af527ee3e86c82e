"""Retina and ON/OFF channel stage.

Maps are ``(rows, cols)`` numpy arrays; ``x`` indexes columns and ``y``
indexes rows with ``y`` growing downward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from alvs.params import FRAME_SHAPE


@dataclass(frozen=True)
class Frame:
    """One 8-bit luminance image plus its frame index."""

    data: np.ndarray
    index: int = 0

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ValueError(f"frame must be 2-D, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("frame values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ChannelPair:
    on: np.ndarray
    off: np.ndarray


def _pixels(x) -> np.ndarray:
    return x.data if isinstance(x, Frame) else np.asarray(x)


def check_frame_shape(frame) -> None:
    shape = _pixels(frame).shape
    if shape != FRAME_SHAPE:
        raise ValueError(f"expected a {FRAME_SHAPE[1]}x{FRAME_SHAPE[0]} frame, got {shape[1] if len(shape) > 1 else '?'}x{shape[0]}")


def retina_diff(prev, curr) -> np.ndarray:
    """Signed brightness change ``curr - prev`` per pixel."""
    a, b = _pixels(prev), _pixels(curr)
    if a.shape != b.shape:
        raise ValueError(f"frame shapes differ: {a.shape} vs {b.shape}")
    return b.astype(np.float64) - a.astype(np.float64)


def rectify(diff: np.ndarray, w: float) -> ChannelPair:
    """Half-wave rectification into a weighted ON and an OFF channel."""
    if not w > 0:
        raise ValueError("w must be > 0")
    diff = np.asarray(diff, dtype=np.float64)
    return ChannelPair(on=w * np.maximum(diff, 0.0), off=np.maximum(-diff, 0.0))


def smooth3x3(m: np.ndarray) -> np.ndarray:
    # zero padding, divisor fixed at 9 even at the border
    m = np.asarray(m, dtype=np.float64)
    p = np.pad(m, 1)
    h, w = m.shape
    acc = np.zeros_like(m)
    for dy in range(3):
        for dx in range(3):
            acc += p[dy : dy + h, dx : dx + w]
    return acc / 9.0


def smooth_pair(pair: ChannelPair) -> ChannelPair:
    return ChannelPair(on=smooth3x3(pair.on), off=smooth3x3(pair.off))
