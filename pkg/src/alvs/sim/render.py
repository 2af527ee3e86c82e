"""Egocentric grayscale view by per-column raycasting.

The camera is equiangular in both axes: every pixel spans the same angle
(70 deg / 99 columns by default). Body silhouettes and wall edges get
exact fractional pixel coverage, and a small optical blur is applied
before quantising to 8 bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from alvs.frontend import Frame
from alvs.params import FRAME_HEIGHT, FRAME_WIDTH
from alvs.sim.world import WorldState


class Texture:
    """Wall texture sampled at (perimeter position u, height v) in cm."""

    def sample(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(Texture):
    value: float = 220.0

    def sample(self, u, v):
        return np.full(np.broadcast(u, v).shape, float(self.value))


@dataclass(frozen=True)
class Checker(Texture):
    size: float = 5.0
    low: float = 60.0
    high: float = 230.0

    def sample(self, u, v):
        parity = (np.floor(u / self.size) + np.floor(v / self.size)) % 2
        return np.where(parity == 0, float(self.high), float(self.low))


class ImageTexture(Texture):
    """An 8-bit image tiled along the wall; ``cm_per_px`` sets its scale."""

    def __init__(self, image: np.ndarray, cm_per_px: float = 0.5, name: str = "image"):
        if image.ndim != 2 or image.shape[0] < 1 or image.shape[1] < 1:
            raise ValueError("texture image must be a non-empty 2-D array")
        if cm_per_px <= 0:
            raise ValueError("cm_per_px must be > 0")
        self.image = np.asarray(image, dtype=np.float64)
        self.cm_per_px = cm_per_px
        self.name = name

    def sample(self, u, v):
        h, w = self.image.shape
        col = np.floor(u / self.cm_per_px).astype(np.int64) % w
        row = np.floor(v / self.cm_per_px).astype(np.int64) % h
        return self.image[h - 1 - row, col]


@dataclass(frozen=True)
class CameraModel:
    fov: float = 70.0  # horizontal, degrees
    width: int = FRAME_WIDTH
    height: int = FRAME_HEIGHT
    mount_height: float = 5.0  # cm above the floor
    robot_height: float = 7.0  # cm, visual height of other robots
    blur: bool = True

    def __post_init__(self):
        if not 0 < self.fov < 180:
            raise ValueError("fov must lie in (0, 180)")

    @property
    def pitch(self) -> float:
        """Radians per pixel, identical horizontally and vertically."""
        return math.radians(self.fov) / self.width

    @property
    def vfov(self) -> float:
        return math.degrees(self.pitch * self.height)

    def column_angles(self) -> np.ndarray:
        """Horizontal angle (rad, positive right) of each column centre."""
        return (np.arange(self.width) + 0.5 - self.width / 2.0) * self.pitch


def _coverage(top: np.ndarray, bottom: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Fraction of each pixel row covered by [top, bottom] (continuous rows)."""
    r0 = rows[:, None]
    return np.clip(np.minimum(bottom[None, :], r0 + 1.0) - np.maximum(top[None, :], r0), 0.0, 1.0)


def _row_of(height_above_cam, dist, cam: CameraModel):
    return cam.height / 2.0 - np.arctan2(height_above_cam, dist) / cam.pitch


def _blur(img: np.ndarray) -> np.ndarray:
    p = np.pad(img, 1, mode="edge")
    img = 0.25 * p[1:-1, :-2] + 0.5 * p[1:-1, 1:-1] + 0.25 * p[1:-1, 2:]
    p = np.pad(img, ((1, 1), (0, 0)), mode="edge")
    return 0.25 * p[:-2] + 0.5 * p[1:-1] + 0.25 * p[2:]


def _wall_hits(ox, oy, dx, dy, arena):
    """Distance to the arena boundary and perimeter coordinate along each ray."""
    with np.errstate(divide="ignore", invalid="ignore"):
        tx = np.where(dx > 0, (arena.width - ox) / dx, np.where(dx < 0, -ox / dx, np.inf))
        ty = np.where(dy > 0, (arena.height - oy) / dy, np.where(dy < 0, -oy / dy, np.inf))
    t = np.maximum(np.minimum(tx, ty), 1e-6)
    hx = np.clip(ox + t * dx, 0.0, arena.width)
    hy = np.clip(oy + t * dy, 0.0, arena.height)
    w, h = arena.width, arena.height
    on_x = tx <= ty  # hit a vertical wall (x = 0 or x = w)
    u = np.where(
        on_x,
        np.where(dx > 0, w + hy, 2 * w + h + (h - hy)),
        np.where(dy < 0, hx, w + h + (w - hx)),
    )
    return t, u


def _background(world: WorldState, obs, cam: CameraModel, ang: np.ndarray) -> np.ndarray:
    arena = world.arena
    hc = cam.mount_height
    dx, dy = np.cos(ang), np.sin(ang)
    t_wall, u = _wall_hits(obs.x, obs.y, dx, dy, arena)
    top = _row_of(arena.wall_height - hc, t_wall, cam)
    base = _row_of(-hc, t_wall, cam)

    img = np.empty((cam.height, cam.width))
    r0 = max(0, int(math.floor(top.min())))
    r1 = min(cam.height, int(math.ceil(base.max())))
    img[:r0] = arena.sky_value
    img[r1:] = arena.floor_value
    if r1 > r0:
        rows = np.arange(r0, r1, dtype=np.float64)
        cov_wall = _coverage(top, base, rows)
        cov_sky = np.clip(top[None, :] - rows[:, None], 0.0, 1.0)
        cov_floor = np.clip(1.0 - cov_wall - cov_sky, 0.0, 1.0)
        if arena.texture is None:
            wall_lum = 220.0
        else:
            v = hc + t_wall[None, :] * np.tan((cam.height / 2.0 - (rows[:, None] + 0.5)) * cam.pitch)
            v = np.clip(v, 0.0, arena.wall_height - 1e-9)
            wall_lum = arena.texture.sample(np.broadcast_to(u[None, :], v.shape), v)
        img[r0:r1] = cov_sky * arena.sky_value + cov_wall * wall_lum + cov_floor * arena.floor_value
    return img


def render_view(world: WorldState, observer_id: int, camera: CameraModel | None = None) -> Frame:
    """Render what ``observer_id`` sees.

    Other robots are upright cylinders. Their horizontal extent is the exact
    angular interval subtended by the body, converted to per-column coverage
    fractions; their vertical extent in each column follows the distance to
    the body surface. Bodies are composited far to near.
    """
    cam = camera or CameraModel()
    obs = world.robot(observer_id)
    rel = cam.column_angles()
    img = _background(world, obs, cam, math.radians(obs.heading) + rel)

    hc = cam.mount_height
    bodies = []
    for r in world.robots:
        if r.id == observer_id:
            continue
        dist = math.hypot(r.x - obs.x, r.y - obs.y)
        bodies.append((dist, r))
    bodies.sort(key=lambda b: -b[0])
    half_px = cam.pitch / 2.0
    lo_col, hi_col = rel - half_px, rel + half_px
    for dist, r in bodies:
        if dist <= r.radius:
            img[:] = world.arena.robot_value
            continue
        centre = math.atan2(r.y - obs.y, r.x - obs.x) - math.radians(obs.heading)
        centre = (centre + math.pi) % (2 * math.pi) - math.pi
        half = math.asin(r.radius / dist)
        cov_x = np.clip(np.minimum(hi_col, centre + half) - np.maximum(lo_col, centre - half), 0.0, None) / cam.pitch
        cols = np.nonzero(cov_x > 0)[0]
        if cols.size == 0:
            continue
        # distance to the body surface along each column ray (tangent length at the rim)
        off = np.clip(np.abs(rel[cols] - centre), 0.0, half)
        along = dist * np.cos(off)
        t = np.maximum(along - np.sqrt(np.maximum(r.radius**2 - (dist * np.sin(off)) ** 2, 0.0)), 1e-3)
        top = _row_of(cam.robot_height - hc, t, cam)
        bottom = _row_of(-hc, t, cam)
        cov = _coverage(top, bottom, np.arange(cam.height, dtype=np.float64)) * cov_x[cols][None, :]
        img[:, cols] = img[:, cols] * (1.0 - cov) + world.arena.robot_value * cov

    if cam.blur:
        img = _blur(img)
    return Frame(np.clip(np.rint(img), 0, 255).astype(np.uint8), world.frame)
