"""Synthetic frame sequences: looming, receding and translating discs, bars.

Shapes are anti-aliased by 4x4 supersampling so sub-pixel motion yields
graded luminance changes. Sizes follow the equiangular camera geometry:
a disc of physical radius ``radius`` at distance ``D`` spans
``atan(radius / D)`` radians, i.e. that many ``pitch`` pixels.
"""

from __future__ import annotations

import math

import numpy as np

from alvs.frontend import Frame
from alvs.params import FRAME_HEIGHT, FRAME_WIDTH

PITCH = math.radians(70.0) / FRAME_WIDTH  # radians per pixel
_SS = 4
_SUB = (np.arange(_SS) + 0.5) / _SS


def _grid(shape=(FRAME_HEIGHT, FRAME_WIDTH)):
    h, w = shape
    ys = (np.arange(h)[:, None] + _SUB[None, :]).reshape(-1)
    xs = (np.arange(w)[:, None] + _SUB[None, :]).reshape(-1)
    return np.meshgrid(xs, ys)


_X, _Y = _grid()


def _downsample(mask: np.ndarray) -> np.ndarray:
    h, w = FRAME_HEIGHT, FRAME_WIDTH
    return mask.reshape(h, _SS, w, _SS).mean(axis=(1, 3))


def _compose(cover: np.ndarray, fg: float, bg: float, index: int) -> Frame:
    img = bg + (fg - bg) * cover
    return Frame(np.clip(np.rint(img), 0, 255).astype(np.uint8), index)


def disc_frame(cx: float, cy: float, radius_px: float, fg: float = 30.0, bg: float = 200.0, index: int = 0) -> Frame:
    """A disc centred at continuous pixel coordinates (cx, cy)."""
    inside = (_X - (cx + 0.5)) ** 2 + (_Y - (cy + 0.5)) ** 2 <= radius_px**2
    return _compose(_downsample(inside.astype(np.float64)), fg, bg, index)


def bar_frame(x0: float, width: float, fg: float = 30.0, bg: float = 200.0, index: int = 0, top: float = 0.0, bottom: float = FRAME_HEIGHT) -> Frame:
    """A vertical bar covering columns [x0, x0 + width) and rows [top, bottom)."""
    inside = (_X >= x0) & (_X < x0 + width) & (_Y >= top) & (_Y < bottom)
    return _compose(_downsample(inside.astype(np.float64)), fg, bg, index)


def static_frames(count: int, value: int = 128) -> list[Frame]:
    return [Frame(np.full((FRAME_HEIGHT, FRAME_WIDTH), value, np.uint8), i) for i in range(count)]


def angular_radius_px(radius: float, distance: float) -> float:
    return math.atan2(radius, distance) / PITCH


def looming_disc(
    frames: int = 45,
    radius: float = 4.0,
    start: float = 50.0,
    speed: float = 30.0,
    dt: float = 1 / 30,
    cx: float = 49.0,
    cy: float = 36.0,
    fg: float = 0.0,
    bg: float = 255.0,
) -> list[Frame]:
    """Disc approaching at constant speed; stops short of contact."""
    out = []
    for i in range(frames):
        d = max(start - speed * dt * i, radius * 1.05)
        out.append(disc_frame(cx, cy, angular_radius_px(radius, d), fg, bg, i))
    return out


def receding_disc(frames: int = 45, radius: float = 4.0, start: float = 50.0, speed: float = 30.0, **kw) -> list[Frame]:
    """Time reverse of the matching looming sequence."""
    seq = looming_disc(frames, radius, start, speed, **kw)[::-1]
    return [Frame(f.data, i) for i, f in enumerate(seq)]


def translating_disc(
    frames: int = 60,
    radius_px: float = 8.0,
    speed_px: float = 1.5,
    x0: float = 10.0,
    cy: float = 36.0,
    fg: float = 0.0,
    bg: float = 255.0,
) -> list[Frame]:
    return [disc_frame(x0 + speed_px * i, cy, radius_px, fg, bg, i) for i in range(frames)]


def moving_bar(frames: int = 30, width: float = 6.0, speed_px: float = 1.0, x0: float = 10.0, fg: float = 0.0, bg: float = 255.0) -> list[Frame]:
    return [bar_frame(x0 + speed_px * i, width, fg, bg, i) for i in range(frames)]


LIBRARY = {
    "looming": looming_disc,
    "receding": receding_disc,
    "translating": translating_disc,
    "bar": moving_bar,
    "static": static_frames,
}


def generate(kind: str, frames: int | None = None) -> list[Frame]:
    if kind not in LIBRARY:
        raise KeyError(f"unknown stimulus {kind!r}; choose from {', '.join(sorted(LIBRARY))}")
    fn = LIBRARY[kind]
    if kind == "static":
        return fn(frames or 30)
    return fn() if frames is None else fn(frames=frames)
