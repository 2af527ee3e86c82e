"""Builders for the standard experiment scenarios.

The bundled ``scenarios/*.ini`` files are generated from these builders
(``python -m alvs.sim.library DIR``) and tests check the two stay in sync.
"""

from __future__ import annotations

import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from alvs.sim.scenario import ArenaSpec, RobotSpec, ScenarioConfig, dump_scenario

OBSERVER_POSE = (50.0, 80.0, -90.0)  # facing the far wall
APPROACH_SPEED = 15.0  # cm/s
EVASION_SPEED = 25.0
START_DISTANCE = 60.0
SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"
SWEEP_ANGLES = tuple(-35.0 + 8.75 * k for k in range(9))
MULTI_BEARINGS = {2: (-20.0, 20.0), 3: (-28.0, 0.0, 28.0)}
MULTI_STOP = {2: 8.0, 3: 10.0}  # keeps the approachers clear of each other


def _observer(motors: bool = False, **kw) -> RobotSpec:
    x, y, h = OBSERVER_POSE
    return RobotSpec("observer", "alvs", x, y, h, motors=motors, fixed=True, **kw)


def _point(bearing: float, distance: float) -> tuple[float, float]:
    x, y, h = OBSERVER_POSE
    a = math.radians(h + bearing)
    return _round((x + distance * math.cos(a), y + distance * math.sin(a)))


def _round(p) -> tuple[float, float]:
    # scenario files store 4 decimals; rounding here keeps builders and files identical
    return round(p[0], 4) + 0.0, round(p[1], 4) + 0.0


def _line(name: str, start, end, speed: float, start_frame: int = 0) -> RobotSpec:
    return RobotSpec(name, "scripted", start[0], start[1], 0.0, waypoints=[end], speed=speed, start_frame=start_frame, fixed=True)


def approach(bearing: float = 0.0, speed: float = APPROACH_SPEED, name: str = "approach_head_on", motors: bool = False, frames: int = 150) -> ScenarioConfig:
    target = _line("threat", _point(bearing, START_DISTANCE), _point(bearing, 0.0), speed)
    return ScenarioConfig(name=name, frames=frames, robots=[_observer(motors, wander_speed=0.0 if motors else None), target])


def translation(distance: float = 15.0, speed: float = APPROACH_SPEED, frames: int = 150) -> ScenarioConfig:
    # a straight pass perpendicular to the line of sight, left to right, spanning +-45 deg
    half = distance * math.tan(math.radians(45.0))
    x, y, h = OBSERVER_POSE
    cx, cy = _point(0.0, distance)
    right = (math.cos(math.radians(h + 90)), math.sin(math.radians(h + 90)))
    start = _round((cx - half * right[0], cy - half * right[1]))
    end = _round((cx + half * right[0], cy + half * right[1]))
    return ScenarioConfig(name="translation_pass", frames=frames, robots=[_observer(), _line("mover", start, end, speed)])


def receding(speed: float = APPROACH_SPEED, frames: int = 150) -> ScenarioConfig:
    target = _line("leaver", _point(0.0, 8.0), _point(0.0, 8.0 + speed * frames / 30.0), speed)
    return ScenarioConfig(name="receding", frames=frames, robots=[_observer(), target])


def multi_approach(count: int, speed: float = APPROACH_SPEED, frames: int = 150) -> ScenarioConfig:
    names = {2: "double_approach", 3: "triple_approach"}
    robots = [_observer()]
    for k, b in enumerate(MULTI_BEARINGS[count]):
        robots.append(_line(f"threat{k + 1}", _point(b, START_DISTANCE), _point(b, MULTI_STOP[count]), speed))
    return ScenarioConfig(name=names[count], frames=frames, robots=robots)


def evasion(bearing: float, speed: float = EVASION_SPEED, frames: int = 150) -> ScenarioConfig:
    tag = f"{bearing:+.2f}".replace("+", "p").replace("-", "m").replace(".", "_")
    return approach(bearing, speed, name=f"evasion_{tag}", motors=True, frames=frames)


def dual_threat(seed: int, ratio: float = 2.0, slow_speed: float = 10.0, frames: int = 180) -> ScenarioConfig:
    """Two approachers, the faster one ``ratio`` times quicker, random bearings."""
    rng = np.random.default_rng(seed)
    fast_b = float(rng.uniform(-25.0, 25.0))
    gap = float(rng.uniform(25.0, 40.0))
    slow_b = fast_b - gap if fast_b > 0 else fast_b + gap
    fast = _line("fast", _point(fast_b, START_DISTANCE), _point(fast_b, 0.0), slow_speed * ratio)
    slow = _line("slow", _point(slow_b, START_DISTANCE), _point(slow_b, 0.0), slow_speed)
    obs = _observer(True, wander_speed=0.0)
    return ScenarioConfig(name="dual_threat", frames=frames, seed=seed, robots=[obs, fast, slow])


BACKGROUNDS = ("uniform", "checker", "image")
# arena walls share one light mean; textured ones swing +-15 around it
WALL_MEAN = 215.0
WALL_SWING = 15.0


def arena(background: str = "uniform", controller: str = "alvs", seed: int = 0, frames: int = 3600) -> ScenarioConfig:
    spec = ArenaSpec(
        background=background,
        wall_value=WALL_MEAN,
        checker_low=WALL_MEAN - WALL_SWING,
        checker_high=WALL_MEAN + WALL_SWING,
        image="texture.pgm" if background == "image" else None,
    )
    robots = [RobotSpec(f"r{k}", controller) for k in range(3)]
    return ScenarioConfig(
        name=f"arena_{background}", frames=frames, seed=seed, random_placement=True, arena=spec, robots=robots, base_dir=SCENARIO_DIR
    )


def bundled() -> dict[str, ScenarioConfig]:
    out = {
        "approach_head_on": approach(),
        "translation_pass": translation(),
        "receding": receding(),
        "double_approach": multi_approach(2),
        "triple_approach": multi_approach(3),
        "dual_threat": dual_threat(0),
    }
    for b in SWEEP_ANGLES:
        cfg = evasion(b)
        out[cfg.name] = cfg
    for bg in BACKGROUNDS:
        out[f"arena_{bg}"] = arena(bg)
    out["arena_uniform_blind"] = replace(arena("uniform", "blind"), name="arena_uniform_blind")
    return out


def texture_image(size: int = 64, seed: int = 7) -> np.ndarray:
    """Deterministic blob texture used as the 'natural image' background."""
    rng = np.random.default_rng(seed)
    img = rng.uniform(0, 1, (size, size))
    for _ in range(3):
        img = (img + np.roll(img, 1, 0) + np.roll(img, -1, 0) + np.roll(img, 1, 1) + np.roll(img, -1, 1)) / 5.0
    img = (img - img.min()) / (img.max() - img.min())
    return np.rint(WALL_MEAN - WALL_SWING + 2 * WALL_SWING * img).astype(np.uint8)


def write_bundled(directory) -> None:
    from alvs.pgm import write_pgm

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, cfg in bundled().items():
        (directory / f"{name}.ini").write_text(dump_scenario(cfg))
    write_pgm(directory / "texture.pgm", texture_image())


if __name__ == "__main__":
    write_bundled(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "scenarios")
