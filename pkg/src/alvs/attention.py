"""Bottom-up attention fields: spawn, centroid tracking, fusion, pruning."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np


def saliency(on_smooth: np.ndarray, off_smooth: np.ndarray) -> np.ndarray:
    return np.asarray(on_smooth, dtype=np.float64) + np.asarray(off_smooth, dtype=np.float64)


@dataclass
class AttentionField:
    id: int
    cx: float
    cy: float
    half_side: int
    history: deque = field(default_factory=deque)
    age: int = 0

    def bounds(self, shape) -> tuple[int, int, int, int]:
        """Inclusive-exclusive ``(x0, x1, y0, y1)`` of the clipped square."""
        h, w = shape
        x0 = max(0, math.ceil(self.cx - self.half_side))
        x1 = min(w, math.floor(self.cx + self.half_side) + 1)
        y0 = max(0, math.ceil(self.cy - self.half_side))
        y1 = min(h, math.floor(self.cy + self.half_side) + 1)
        return x0, x1, y0, y1

    def contains(self, x: float, y: float) -> bool:
        return abs(x - self.cx) <= self.half_side and abs(y - self.cy) <= self.half_side

    def record(self, response: float) -> None:
        self.history.append(float(response))
        self.age += 1

    def recent_mean(self) -> float:
        return sum(self.history) / len(self.history) if self.history else 0.0

    @property
    def last_response(self) -> float:
        return self.history[-1] if self.history else 0.0


class FieldSet:
    """Ordered collection of attention fields with stable ids."""

    def __init__(self, half_side: int = 36, window: int = 4):
        self.half_side = half_side
        self.window = window
        self.fields: list[AttentionField] = []
        self.next_id = 0

    def __len__(self):
        return len(self.fields)

    def __iter__(self):
        return iter(self.fields)

    def add(self, cx: float, cy: float) -> AttentionField:
        f = AttentionField(self.next_id, float(cx), float(cy), self.half_side, deque(maxlen=self.window))
        self.next_id += 1
        self.fields.append(f)
        return f

    def coverage(self, shape) -> np.ndarray:
        mask = np.zeros(shape, dtype=bool)
        for f in self.fields:
            x0, x1, y0, y1 = f.bounds(shape)
            mask[y0:y1, x0:x1] = True
        return mask

    def spawn(self, sal: np.ndarray, t_a: float) -> AttentionField | None:
        """One spawn attempt at the strongest uncovered saliency peak.

        Ties go to the smallest row-major index.
        """
        masked = np.where(self.coverage(sal.shape), -np.inf, sal)
        idx = int(np.argmax(masked))
        y, x = divmod(idx, sal.shape[1])
        if not masked[y, x] > t_a:
            return None
        return self.add(x, y)

    def update_centroids(self, sal: np.ndarray) -> None:
        for f in self.fields:
            x0, x1, y0, y1 = f.bounds(sal.shape)
            patch = sal[y0:y1, x0:x1]
            mass = patch.sum()
            if mass == 0:
                continue
            xs = np.arange(x0, x1, dtype=np.float64)
            ys = np.arange(y0, y1, dtype=np.float64)
            f.cx = float((patch.sum(axis=0) * xs).sum() / mass)
            f.cy = float((patch.sum(axis=1) * ys).sum() / mass)

    def fuse(self) -> list[AttentionField]:
        """Drop fields whose centroid lies inside an older surviving field.

        Returns the removed fields.
        """
        kept, removed = [], []
        for f in sorted(self.fields, key=lambda g: g.id):
            if any(k.contains(f.cx, f.cy) for k in kept):
                removed.append(f)
            else:
                kept.append(f)
        self.fields = kept
        return removed

    def prune(self, t_d: float, d: int) -> list[AttentionField]:
        """Remove mature fields whose mean response over ``d`` frames is below ``t_d``.

        The set never becomes empty this way: if every field would go, the
        one with the highest recent mean (oldest on ties) stays.
        """
        doomed = [f for f in self.fields if f.age >= d and f.recent_mean() < t_d]
        if doomed and len(doomed) == len(self.fields):
            best = max(doomed, key=lambda f: (f.recent_mean(), -f.id))
            doomed.remove(best)
        ids = {f.id for f in doomed}
        self.fields = [f for f in self.fields if f.id not in ids]
        return doomed
