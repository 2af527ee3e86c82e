"""Scenario configuration: data model, text format, and bundled scenarios.

File format
-----------
Plain text, one ``key = value`` per line, ``#`` starts a comment. Sections:

``[scenario]``
    ``name``, ``frames`` (>= 0), ``seed``, ``mode`` (escape | spin),
    ``random_placement`` (bool: scatter every robot not marked ``fixed``),
    any model/controller parameter override (e.g. ``t_s = 9000``).
``[arena]``
    ``width``, ``height``, ``wall_height`` (cm); ``background`` is
    ``uniform``, ``checker`` or ``image``; ``wall_value`` (uniform),
    ``checker_size``, ``checker_low``, ``checker_high``, ``image`` (PGM path,
    relative to the scenario file), ``image_scale`` (cm per texel);
    ``floor_value``, ``sky_value``, ``robot_value``.
``[camera]``
    ``fov``, ``mount_height``, ``robot_height``, ``blur``.
``[robot <name>]``
    ``controller`` (alvs | scripted | blind), ``x``, ``y``, ``heading``,
    ``diameter``, ``motors`` (on | off; off = perceive only),
    ``wander_speed``; scripted robots add ``waypoints`` (``x,y; x,y; ...``),
    ``speed`` (cm/s) and ``start_frame``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from alvs.params import FsmConfig, ModelParams, apply_overrides, known_keys
from alvs.pgm import read_pgm_array
from alvs.sim.render import CameraModel, Checker, ImageTexture, Uniform
from alvs.sim.world import CONTROLLERS, Arena


class ConfigError(ValueError):
    def __init__(self, message: str, path=None, line: int | None = None):
        where = f"{path}:{line}: " if path is not None and line is not None else (f"{path}: " if path else "")
        super().__init__(where + message)
        self.line = line


@dataclass
class RobotSpec:
    name: str
    controller: str = "alvs"
    x: float = 50.0
    y: float = 50.0
    heading: float = 0.0
    diameter: float = 4.0
    motors: bool = True
    wander_speed: float | None = None
    waypoints: list[tuple[float, float]] = field(default_factory=list)
    speed: float = 0.0
    start_frame: int = 0
    fixed: bool = False


@dataclass
class ArenaSpec:
    width: float = 100.0
    height: float = 100.0
    wall_height: float = 10.0
    background: str = "uniform"
    wall_value: float = 120.0
    checker_size: float = 5.0
    checker_low: float = 40.0
    checker_high: float = 220.0
    image: str | None = None
    image_scale: float = 0.25
    floor_value: float = 240.0
    sky_value: float = 200.0
    robot_value: float = 30.0

    def build(self, base_dir: Path | None = None) -> Arena:
        if self.background == "uniform":
            tex = Uniform(self.wall_value)
        elif self.background == "checker":
            tex = Checker(self.checker_size, self.checker_low, self.checker_high)
        elif self.background == "image":
            if not self.image:
                raise ValueError("background = image needs an image path")
            path = Path(self.image)
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            tex = ImageTexture(read_pgm_array(path), self.image_scale, name=path.name)
        else:
            raise ValueError(f"unknown background {self.background!r}")
        return Arena(self.width, self.height, self.wall_height, tex, self.floor_value, self.sky_value, self.robot_value)


@dataclass
class ScenarioConfig:
    name: str = "scenario"
    frames: int = 300
    seed: int = 0
    mode: str = "escape"
    random_placement: bool = False
    arena: ArenaSpec = field(default_factory=ArenaSpec)
    camera: CameraModel = field(default_factory=CameraModel)
    robots: list[RobotSpec] = field(default_factory=list)
    overrides: dict[str, str] = field(default_factory=dict)
    base_dir: Path | None = None

    def validate(self) -> None:
        if not self.robots:
            raise ConfigError("scenario needs at least one robot")
        if self.frames < 0:
            raise ConfigError("frames must be >= 0")
        if self.mode not in ("escape", "spin"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        names = [r.name for r in self.robots]
        if len(set(names)) != len(names):
            raise ConfigError("robot names must be unique")
        for r in self.robots:
            if r.controller not in CONTROLLERS:
                raise ConfigError(f"robot {r.name}: unknown controller {r.controller!r}")
            if r.controller == "scripted" and r.waypoints and r.speed <= 0:
                raise ConfigError(f"robot {r.name}: scripted robots need speed > 0")
        self.model_config()

    def model_config(self) -> tuple[ModelParams, FsmConfig]:
        try:
            return apply_overrides(ModelParams(), FsmConfig(mode=self.mode), self.overrides)
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def with_controller(self, old: str, new: str) -> "ScenarioConfig":
        robots = [replace(r, controller=new) if r.controller == old else r for r in self.robots]
        return replace(self, robots=robots)


# -- text format -----------------------------------------------------------

_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def _num(raw: str, kind=float):
    return kind(raw)


def _waypoints(raw: str) -> list[tuple[float, float]]:
    pts = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        x, y = chunk.split(",")
        pts.append((float(x), float(y)))
    return pts


_ARENA_KEYS = {f: t for f, t in ArenaSpec.__annotations__.items()}
_CAMERA_KEYS = {"fov": float, "mount_height": float, "robot_height": float, "blur": "bool"}
_ROBOT_KEYS = {
    "controller": str,
    "x": float,
    "y": float,
    "heading": float,
    "diameter": float,
    "motors": "bool",
    "wander_speed": float,
    "waypoints": _waypoints,
    "speed": float,
    "start_frame": int,
    "fixed": "bool",
}


def _convert(kind, raw: str):
    if kind == "bool":
        low = raw.lower()
        if low not in _BOOL:
            raise ValueError(f"not a boolean: {raw!r}")
        return _BOOL[low]
    if kind in ("float", "float | None"):
        return float(raw)
    if kind in ("str", "str | None"):
        return raw
    if kind == "int":
        return int(raw)
    return kind(raw)


def parse_scenario(text: str, path=None) -> ScenarioConfig:
    """Parse the key-value format; errors name the offending line."""
    cfg = ScenarioConfig(robots=[])
    arena: dict = {}
    camera: dict = {}
    robots: dict[str, RobotSpec] = {}
    section = None
    current_robot = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw_line.strip()!r}", path, lineno)
            head = line[1:-1].strip()
            parts = head.split(None, 1)
            if parts and parts[0] == "robot":
                if len(parts) != 2:
                    raise ConfigError("robot sections need a name: [robot NAME]", path, lineno)
                name = parts[1].strip()
                if name in robots:
                    raise ConfigError(f"duplicate robot {name!r}", path, lineno)
                current_robot = robots[name] = RobotSpec(name)
                section = "robot"
            elif head in ("scenario", "arena", "camera"):
                section = head
            else:
                raise ConfigError(f"unknown section [{head}]", path, lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw_line.strip()!r}", path, lineno)
        if section is None:
            raise ConfigError("key outside of any section", path, lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if section == "scenario":
                if key == "name":
                    cfg.name = value
                elif key == "frames":
                    cfg.frames = int(value)
                elif key == "seed":
                    cfg.seed = int(value)
                elif key == "mode":
                    cfg.mode = value
                elif key == "random_placement":
                    cfg.random_placement = _convert("bool", value)
                elif key in known_keys():
                    cfg.overrides[key] = value
                    apply_overrides(ModelParams(), FsmConfig(), {key: value})
                else:
                    raise KeyError(key)
            elif section == "arena":
                arena[key] = _convert(_ARENA_KEYS[key], value)
            elif section == "camera":
                camera[key] = _convert(_CAMERA_KEYS[key], value)
            else:
                setattr(current_robot, key, _convert(_ROBOT_KEYS[key], value))
        except KeyError:
            raise ConfigError(f"unknown key {key!r} in [{section}]", path, lineno) from None
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", path, lineno) from None
    try:
        cfg.arena = ArenaSpec(**arena)
        cfg.camera = replace(ScenarioConfig().camera, **camera)
    except ValueError as exc:
        raise ConfigError(str(exc), path) from None
    cfg.robots = list(robots.values())
    try:
        cfg.validate()
    except ConfigError as exc:
        raise ConfigError(str(exc), path) from None
    return cfg


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    cfg = parse_scenario(path.read_text(), path)
    cfg.base_dir = path.parent
    return cfg


def _g(v: float) -> str:
    # shortest text that parses back to the same float
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def dump_scenario(cfg: ScenarioConfig) -> str:
    """Serialise back to the text format (used to write bundled files)."""
    out = ["[scenario]", f"name = {cfg.name}", f"frames = {cfg.frames}", f"seed = {cfg.seed}", f"mode = {cfg.mode}"]
    if cfg.random_placement:
        out.append("random_placement = true")
    out += [f"{k} = {v}" for k, v in cfg.overrides.items()]
    out.append("")
    out.append("[arena]")
    defaults = ArenaSpec()
    for k in _ARENA_KEYS:
        v = getattr(cfg.arena, k)
        if v != getattr(defaults, k):
            out.append(f"{k} = {v}")
    cam_defaults = ScenarioConfig().camera
    cam_lines = [f"{k} = {getattr(cfg.camera, k)}" for k in _CAMERA_KEYS if getattr(cfg.camera, k) != getattr(cam_defaults, k)]
    if cam_lines:
        out += ["", "[camera]"] + cam_lines
    rd = RobotSpec("_")
    for r in cfg.robots:
        out += ["", f"[robot {r.name}]", f"controller = {r.controller}"]
        out += [f"x = {_g(r.x)}", f"y = {_g(r.y)}", f"heading = {_g(r.heading)}"]
        for k in ("diameter", "wander_speed", "speed", "start_frame"):
            if getattr(r, k) != getattr(rd, k):
                out.append(f"{k} = {_g(getattr(r, k))}")
        if not r.motors:
            out.append("motors = off")
        if r.fixed:
            out.append("fixed = true")
        if r.waypoints:
            out.append("waypoints = " + "; ".join(f"{_g(x)},{_g(y)}" for x, y in r.waypoints))
    return "\n".join(out) + "\n"


# -- scripted trajectories -------------------------------------------------


def scripted_pose(spec: RobotSpec, frame: int, dt: float) -> tuple[float, float, float]:
    """Pose on the waypoint polyline after ``frame`` steps at constant speed."""
    pts = [(spec.x, spec.y)] + list(spec.waypoints)
    heading = spec.heading
    if len(pts) < 2:
        return spec.x, spec.y, heading
    travel = max(0, frame - spec.start_frame) * dt * spec.speed
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        seg = math.hypot(x1 - x0, y1 - y0)
        if seg == 0:
            continue
        heading = math.degrees(math.atan2(y1 - y0, x1 - x0))
        if travel <= seg:
            f = travel / seg
            return x0 + f * (x1 - x0), y0 + f * (y1 - y0), heading
        travel -= seg
    return pts[-1][0], pts[-1][1], heading


def place_randomly(cfg: ScenarioConfig, rng: np.random.Generator, margin: float = 10.0, min_gap: float = 20.0) -> list[RobotSpec]:
    """Scatter non-fixed robots uniformly with a minimum spacing."""
    placed: list[RobotSpec] = [r for r in cfg.robots if r.fixed]
    out = []
    for r in cfg.robots:
        if r.fixed:
            out.append(r)
            continue
        for _ in range(1000):
            x = rng.uniform(margin, cfg.arena.width - margin)
            y = rng.uniform(margin, cfg.arena.height - margin)
            if all(math.hypot(x - p.x, y - p.y) >= min_gap for p in placed):
                break
        nr = replace(r, x=float(x), y=float(y), heading=float(rng.uniform(-180.0, 180.0)))
        placed.append(nr)
        out.append(nr)
    return out
