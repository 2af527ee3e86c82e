"""Lock-step trial loop and its on-disk log."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from alvs.pgm import write_pgm
from alvs.pipeline import FrameTrace, Pipeline
from alvs.sim.render import render_view
from alvs.sim.scenario import ScenarioConfig, place_randomly, scripted_pose
from alvs.sim.world import CollisionEvent, CollisionMonitor, RobotBody, WorldState, step_world
from alvs.visuomotor import LONG, SHORT, MotorCommand, wrap

STATES = ("wander", "long_takeoff", "short_takeoff", "escape", "spin")
REFLEX_STATE = "wall_reflex"


@dataclass
class WallReflex:
    """Short-range wall proximity reflex shared by every self-driven robot.

    Within ``distance`` of a wall, a command that would drive the robot
    into it is replaced: reversing is stopped (the turn is kept), and
    driving forward starts an on-the-spot turn toward a randomised heading
    pointing back into the arena, held until that heading is reached.
    """

    distance: float = 7.0
    turn_rate: float = 360.0
    spread: float = 60.0
    target: float | None = None

    def _inward(self, body: RobotBody, world: WorldState) -> tuple[int, int]:
        a = world.arena
        nx = (body.x < self.distance) - (body.x > a.width - self.distance)
        ny = (body.y < self.distance) - (body.y > a.height - self.distance)
        return nx, ny

    def filter(self, cmd: MotorCommand, body: RobotBody, world: WorldState, rng: np.random.Generator, dt: float) -> MotorCommand | None:
        """The command to execute instead of ``cmd``, or None to keep it."""
        if self.target is None:
            nx, ny = self._inward(body, world)
            if nx == 0 and ny == 0 or cmd.linear == 0:
                return None
            h = math.radians(body.heading)
            into = (math.cos(h) * nx + math.sin(h) * ny) * math.copysign(1.0, cmd.linear) < 0
            if not into:
                return None
            if cmd.linear < 0:
                return MotorCommand(0.0, cmd.angular)
            self.target = wrap(math.degrees(math.atan2(ny, nx)) + rng.uniform(-self.spread, self.spread))
        err = wrap(self.target - body.heading)
        if abs(err) <= 1e-6:
            self.target = None
            return None
        rate = max(-self.turn_rate, min(self.turn_rate, err / dt))
        return MotorCommand(0.0, rate)


@dataclass
class TrialLog:
    name: str
    robot_names: list[str]
    controllers: list[str]
    frames: int = 0
    trajectories: list[tuple] = field(default_factory=list)  # frame, id, x, y, heading
    events: list[CollisionEvent] = field(default_factory=list)
    behavior: list[tuple] = field(default_factory=list)
    attention: list[tuple] = field(default_factory=list)  # frame, id, af_id, cx, cy, resp, gated
    quadrants: list[tuple] = field(default_factory=list)  # frame, id, af_id, q1..q4
    gated: dict[int, list[bool]] = field(default_factory=dict)  # per perceiving robot, per frame
    takeoffs: Counter = field(default_factory=Counter)  # (id, state) entries
    overrides: dict[str, str] = field(default_factory=dict)
    seed: int = 0
    mode: str = "escape"
    traces: list | None = None  # per-frame {robot id: FrameTrace}, only when requested

    # -- statistics ------------------------------------------------------

    def perceiving(self) -> list[int]:
        return sorted(self.gated)

    def episodes(self, rid: int | None = None) -> int:
        if rid is None:
            return len(self.events)
        return sum(1 for e in self.events if rid in (e.a, e.b))

    def opportunities(self, rid: int | None = None) -> int:
        """Contiguous runs of frames with a gated response."""
        ids = self.perceiving() if rid is None else [rid]
        total = 0
        for i in ids:
            g = self.gated.get(i, [])
            total += sum(1 for k, v in enumerate(g) if v and (k == 0 or not g[k - 1]))
        return total

    def success_rate(self) -> float | None:
        ids = [i for i in self.perceiving() if self.controllers[i] == "alvs"]
        if not ids:
            return None
        opp = sum(self.opportunities(i) for i in ids)
        if opp == 0:
            return None
        eps = sum(1 for e in self.events if e.a in ids or e.b in ids)
        return max(0.0, 1.0 - eps / opp)

    def state_counts(self) -> Counter:
        return Counter((row[1], row[2]) for row in self.behavior)

    def summary_text(self) -> str:
        lines = [f"scenario: {self.name}", f"frames: {self.frames}", f"seed: {self.seed}", f"mode: {self.mode}"]
        lines.append("overrides: " + (", ".join(f"{k}={v}" for k, v in sorted(self.overrides.items())) or "none"))
        walls = sum(1 for e in self.events if e.kind == "wall")
        lines.append(f"collision_episodes: {len(self.events)} (robot-robot {len(self.events) - walls}, wall {walls})")
        lines.append(f"avoidance_opportunities: {self.opportunities()}")
        rate = self.success_rate()
        lines.append("success_rate: " + ("n/a" if rate is None else f"{rate:.4f}"))
        lines.append(f"takeoff_events: {sum(self.takeoffs.values())}")
        lines.append(f"long_takeoff_entries: {sum(v for (i, s), v in self.takeoffs.items() if s == LONG)}")
        lines.append(f"short_takeoff_entries: {sum(v for (i, s), v in self.takeoffs.items() if s == SHORT)}")
        counts = self.state_counts()
        for rid, name in enumerate(self.robot_names):
            if rid not in self.gated:
                lines.append(f"robot {rid} ({name}, {self.controllers[rid]}): episodes {self.episodes(rid)}")
                continue
            per = ", ".join(f"{s}={counts.get((rid, s), 0)}" for s in STATES + (REFLEX_STATE,))
            lines.append(
                f"robot {rid} ({name}, {self.controllers[rid]}): episodes {self.episodes(rid)}, "
                f"gated_frames {sum(self.gated[rid])}, opportunities {self.opportunities(rid)}, states: {per}"
            )
        return "\n".join(lines) + "\n"

    # -- serialisation ---------------------------------------------------

    def csv_texts(self, quadrants: bool = False) -> dict[str, str]:
        def render(header, rows):
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
            return buf.getvalue()

        out = {
            "trajectories.csv": render(["frame", "robot_id", "x", "y", "heading"], [(f, i, _f(x), _f(y), _f(h)) for f, i, x, y, h in self.trajectories]),
            "events.csv": render(
                ["frame", "kind", "robot_a", "robot_b", "x", "y"], [(e.frame, e.kind, e.a, e.b, _f(e.x), _f(e.y)) for e in self.events]
            ),
            "behavior.csv": render(
                ["frame", "robot_id", "state", "raw_sum", "strength", "centroid_x", "target_heading", "linear", "angular"],
                [tuple(_f(v) if isinstance(v, float) else ("" if v is None else v) for v in row) for row in self.behavior],
            ),
            "attention.csv": render(
                ["frame", "robot_id", "af_id", "cx", "cy", "resp"], [(f, i, a, _f(x), _f(y), _f(r)) for f, i, a, x, y, r, _ in self.attention]
            ),
        }
        if quadrants:
            out["quadrants.csv"] = render(
                ["frame", "robot_id", "af_id", "q1", "q2", "q3", "q4"], [(f, i, a, *map(_f, q)) for f, i, a, *q in self.quadrants]
            )
        return out

    def write(self, out_dir, quadrants: bool = False) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        texts = self.csv_texts(quadrants)
        texts["summary.txt"] = self.summary_text()
        for name, text in texts.items():
            p = out_dir / name
            p.write_text(text)
            paths.append(p)
        return paths


def _f(v: float) -> str:
    s = f"{v:.4f}"
    return "0.0000" if s == "-0.0000" else s


def build_world(cfg: ScenarioConfig, rng: np.random.Generator) -> WorldState:
    specs = place_randomly(cfg, rng) if cfg.random_placement else cfg.robots
    bodies = []
    for i, s in enumerate(specs):
        x, y, h = scripted_pose(s, 0, 1.0) if s.controller == "scripted" else (s.x, s.y, s.heading)
        bodies.append(RobotBody(i, x, y, h, s.controller, s.diameter))
    return WorldState(cfg.arena.build(cfg.base_dir), bodies)


def run_trial(
    cfg: ScenarioConfig,
    *,
    compact: bool = False,
    quadrants: bool = False,
    views_dir=None,
    keep_traces: bool = False,
    on_frame=None,
) -> TrialLog:
    """Run one scenario to completion.

    ``on_frame(frame, world, traces)`` is called after perception and
    before the world steps; ``traces`` maps robot id to its FrameTrace.
    Invalid configurations raise before anything is simulated.
    """
    cfg.validate()
    params, fsm_cfg = cfg.model_config()
    dt = params.t_i
    rng = np.random.default_rng(cfg.seed)
    world = build_world(cfg, rng)
    specs = cfg.robots
    perceivers = {}
    for r in world.robots:
        if r.controller == "alvs":
            ws = specs[r.id].wander_speed
            perceivers[r.id] = Pipeline(params, fsm_cfg if ws is None else replace(fsm_cfg, wander_speed=ws), compact)
    reflexes = {r.id: WallReflex(turn_rate=fsm_cfg.max_turn_rate) for r in world.robots if r.controller != "scripted" and specs[r.id].motors}
    monitor = CollisionMonitor()
    log = TrialLog(cfg.name, [s.name for s in specs], [s.controller for s in specs], cfg.frames, overrides=dict(cfg.overrides), seed=cfg.seed, mode=cfg.mode)
    log.gated = {rid: [] for rid in perceivers}
    if views_dir is not None:
        views_dir = Path(views_dir)
        views_dir.mkdir(parents=True, exist_ok=True)
    last_state = {rid: "wander" for rid in perceivers}
    if keep_traces:
        log.traces = []

    for t in range(cfg.frames):
        for r in world.robots:
            log.trajectories.append((t, r.id, r.x, r.y, r.heading))
        commands: dict[int, MotorCommand] = {}
        traces: dict[int, FrameTrace] = {}
        for rid, pipe in perceivers.items():
            body = world.robot(rid)
            view = render_view(world, rid, cfg.camera)
            if views_dir is not None:
                write_pgm(views_dir / f"robot{rid}_{t:06d}.pgm", view.data)
            cmd, tr = pipe.process_frame(view, body.heading)
            traces[rid] = tr
            st = tr.state
            if st.name in (LONG, SHORT) and last_state[rid] != st.name:
                log.takeoffs[(rid, st.name)] += 1
            last_state[rid] = st.name
            log.gated[rid].append(tr.summary.gated)
            for fr in tr.fields:
                log.attention.append((t, rid, fr.id, fr.cx, fr.cy, fr.response.value, fr.response.gated))
                if quadrants:
                    log.quadrants.append((t, rid, fr.id, *fr.quadrants.as_tuple()))
            state_name = st.name
            if specs[rid].motors:
                override = reflexes[rid].filter(cmd, body, world, rng, dt)
                if override is not None:
                    cmd, state_name = override, REFLEX_STATE
            else:
                cmd = MotorCommand(0.0, 0.0)
            commands[rid] = cmd
            log.behavior.append(
                (t, rid, state_name, tr.summary.raw_sum, tr.summary.strength, tr.summary.centroid_x, st.target, cmd.linear, cmd.angular)
            )
        for r in world.robots:
            if r.controller == "blind" and specs[r.id].motors:
                speed = specs[r.id].wander_speed if specs[r.id].wander_speed is not None else fsm_cfg.wander_speed
                cruise = MotorCommand(speed, 0.0)
                commands[r.id] = reflexes[r.id].filter(cruise, r, world, rng, dt) or cruise
        if keep_traces:
            log.traces.append(traces)
        if on_frame is not None:
            on_frame(t, world, traces)
        step_world(world, commands, dt)
        for r in world.robots:
            if r.controller == "scripted":
                r.x, r.y, h = scripted_pose(specs[r.id], t + 1, dt)
                r.heading = wrap(h)
        log.events.extend(monitor.update(world))
    return log
