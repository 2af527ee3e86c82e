"""Per-field looming integration: quadrant sums and the LPLC2 gate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from alvs.attention import AttentionField
from alvs.motion import MotionMaps


@dataclass(frozen=True)
class QuadrantSums:
    q1: float
    q2: float
    q3: float
    q4: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.q1, self.q2, self.q3, self.q4)


@dataclass(frozen=True)
class Lplc2Response:
    value: float
    gated: bool


def quadrant_sums(f: AttentionField, lm: MotionMaps) -> QuadrantSums:
    """Sum each quadrant's two preferred (outward) motion maps.

    Quadrants are split at the centroid with y growing downward, so q1 is
    upper-right. Pixels on a dividing line belong to no quadrant.
    """
    shape = lm.lm_r.shape
    x0, x1, y0, y1 = f.bounds(shape)
    xs = np.arange(x0, x1)
    ys = np.arange(y0, y1)
    right = xs > f.cx
    left = xs < f.cx
    up = ys < f.cy
    down = ys > f.cy
    win = (slice(y0, y1), slice(x0, x1))
    r, l, d, u = lm.lm_r[win], lm.lm_l[win], lm.lm_d[win], lm.lm_u[win]

    def total(m, rows, cols):
        return float(m[np.ix_(rows, cols)].sum())

    return QuadrantSums(
        q1=total(r + u, up, right),
        q2=total(l + u, up, left),
        q3=total(l + d, down, left),
        q4=total(r + d, down, right),
    )


def lplc2_response(q: QuadrantSums, nonzero: bool = False) -> Lplc2Response:
    """Gate on all four quadrants being strictly positive.

    ``nonzero=True`` gates whenever no quadrant is exactly zero instead.
    """
    vals = q.as_tuple()
    gated = all(v != 0 for v in vals) if nonzero else all(v > 0 for v in vals)
    return Lplc2Response(value=float(sum(vals)) if gated else 0.0, gated=gated)
