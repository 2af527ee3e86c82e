"""World state, unicycle kinematics and collision episodes.

World coordinates are centimetres with ``y`` pointing "down" on a top-down
plot, so a positive heading change is a right (clockwise) turn and matches
the robot's egocentric sign convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from alvs.visuomotor import MotorCommand, wrap

CONTROLLERS = ("alvs", "scripted", "blind")


@dataclass
class RobotBody:
    id: int
    x: float
    y: float
    heading: float = 0.0
    controller: str = "alvs"
    diameter: float = 4.0

    def __post_init__(self):
        if self.diameter <= 0:
            raise ValueError("diameter must be > 0")
        if self.controller not in CONTROLLERS:
            raise ValueError(f"unknown controller {self.controller!r}")
        self.heading = wrap(self.heading)

    @property
    def radius(self) -> float:
        return self.diameter / 2.0


@dataclass
class Arena:
    width: float = 100.0
    height: float = 100.0
    wall_height: float = 10.0
    texture: object = None  # a render.Texture; uniform when None
    floor_value: float = 240.0
    sky_value: float = 200.0
    robot_value: float = 30.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.wall_height <= 0:
            raise ValueError("arena dimensions must be positive")

    def wall_distance(self, x: float, y: float) -> float:
        return min(x, y, self.width - x, self.height - y)


@dataclass
class WorldState:
    arena: Arena
    robots: list[RobotBody]
    frame: int = 0

    def robot(self, rid: int) -> RobotBody:
        for r in self.robots:
            if r.id == rid:
                return r
        raise KeyError(rid)


def step_world(world: WorldState, commands: dict[int, MotorCommand], dt: float) -> WorldState:
    """Advance every commanded robot by one step, clamping at the walls.

    Robots without a command keep their pose. Mutates and returns ``world``.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    a = world.arena
    for r in sorted(world.robots, key=lambda b: b.id):
        cmd = commands.get(r.id)
        if cmd is None:
            continue
        h = math.radians(r.heading)
        x = r.x + cmd.linear * math.cos(h) * dt
        y = r.y + cmd.linear * math.sin(h) * dt
        r.x = min(max(x, r.radius), a.width - r.radius)
        r.y = min(max(y, r.radius), a.height - r.radius)
        r.heading = wrap(r.heading + cmd.angular * dt)
    world.frame += 1
    return world


def at_wall(world: WorldState, r: RobotBody, slack: float = 1e-9) -> bool:
    return world.arena.wall_distance(r.x, r.y) <= r.radius + slack


@dataclass(frozen=True)
class CollisionEvent:
    frame: int
    kind: str  # "robot" or "wall"
    a: int
    b: int  # -1 for walls
    x: float
    y: float


def contacts(world: WorldState, diameter: float | None = None) -> dict[tuple, tuple[float, float]]:
    """Current contacts keyed by ``("robot", i, j)`` (i < j) or ``("wall", i, -1)``."""
    out = {}
    robots = sorted(world.robots, key=lambda b: b.id)
    for i, r in enumerate(robots):
        dia = diameter or r.diameter
        if world.arena.wall_distance(r.x, r.y) < dia:
            out[("wall", r.id, -1)] = (r.x, r.y)
        for s in robots[i + 1 :]:
            dia2 = diameter or max(r.diameter, s.diameter)
            if math.hypot(r.x - s.x, r.y - s.y) < dia2:
                out[("robot", r.id, s.id)] = ((r.x + s.x) / 2, (r.y + s.y) / 2)
    return out


@dataclass
class CollisionMonitor:
    """Emits one event per contact episode; an episode ends on separation."""

    diameter: float | None = None
    active: set = field(default_factory=set)

    def update(self, world: WorldState) -> list[CollisionEvent]:
        now = contacts(world, self.diameter)
        events = [
            CollisionEvent(world.frame, kind, a, b, pos[0], pos[1])
            for (kind, a, b), pos in sorted(now.items())
            if (kind, a, b) not in self.active
        ]
        self.active = set(now)
        return events


def detect_collisions(world: WorldState, diameter: float | None = None) -> list[CollisionEvent]:
    """Stateless variant: every contact present in this snapshot."""
    return [CollisionEvent(world.frame, k, a, b, p[0], p[1]) for (k, a, b), p in sorted(contacts(world, diameter).items())]
