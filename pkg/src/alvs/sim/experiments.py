"""Measurements taken from trial logs: selectivity, attention, evasion, arena."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import permutations

from alvs.sim.render import CameraModel
from alvs.sim.scenario import ScenarioConfig
from alvs.sim.trial import TrialLog, run_trial
from alvs.visuomotor import ESCAPE, LONG, SHORT, wrap

FINAL_WINDOW = 30  # one second of frames


def first_contact(log: TrialLog, rid: int) -> int | None:
    """Frame index of the first world state in which ``rid`` touches anything."""
    frames = [e.frame for e in log.events if rid in (e.a, e.b)]
    return min(frames) if frames else None


def pose(log: TrialLog, frame: int, rid: int) -> tuple[float, float, float]:
    n = len(log.robot_names)
    f, i, x, y, h = log.trajectories[frame * n + rid]
    assert (f, i) == (frame, rid)
    return x, y, h


def states(log: TrialLog, rid: int) -> list[str]:
    return [row[2] for row in log.behavior if row[1] == rid]


def bearing(src: tuple[float, float], dst: tuple[float, float]) -> float:
    return math.degrees(math.atan2(dst[1] - src[1], dst[0] - src[0]))


# -- looming selectivity ---------------------------------------------------


@dataclass
class Selectivity:
    gated: list[bool]
    contact: int | None

    def final_fraction(self, window: int = 10) -> float:
        """Gated share of the last ``window`` frames perceived before contact."""
        end = self.contact if self.contact is not None else len(self.gated)
        seg = self.gated[max(0, end - window) : end]
        return sum(seg) / len(seg) if seg else 0.0

    @property
    def overall_fraction(self) -> float:
        return sum(self.gated) / len(self.gated) if self.gated else 0.0


def selectivity(cfg: ScenarioConfig, observer: int = 0) -> Selectivity:
    log = run_trial(cfg)
    return Selectivity(log.gated[observer], first_contact(log, observer))


# -- multi-target attention ------------------------------------------------


def target_centres(world, observer: int, camera: CameraModel) -> list[tuple[float, float]]:
    """Pixel centre of every other robot's silhouette (clipped to the frame)."""
    obs = world.robot(observer)
    out = []
    for r in world.robots:
        if r.id == observer:
            continue
        d = math.hypot(r.x - obs.x, r.y - obs.y)
        rel = math.radians(wrap(bearing((obs.x, obs.y), (r.x, r.y)) - obs.heading))
        if abs(rel) > math.radians(camera.fov) / 2 + math.asin(min(1.0, r.radius / max(d, r.radius))):
            continue
        x = camera.width / 2.0 + rel / camera.pitch - 0.5
        top = camera.height / 2.0 - math.atan2(camera.robot_height - camera.mount_height, d) / camera.pitch
        bottom = camera.height / 2.0 + math.atan2(camera.mount_height, d) / camera.pitch
        y = (max(top, 0.0) + min(bottom, camera.height)) / 2.0 - 0.5
        out.append((x, y))
    return out


def _matched(fields, targets, tol: float) -> bool:
    if len(fields) > len(targets):
        return False
    for perm in permutations(targets, len(fields)):
        if all(math.hypot(f.cx - t[0], f.cy - t[1]) <= tol for f, t in zip(fields, perm)):
            return True
    return False


@dataclass
class AttentionScore:
    frames: list[int]
    gated_counts: list[int]
    matched: list[bool]

    @property
    def fraction(self) -> float:
        return sum(self.matched) / len(self.matched) if self.matched else 0.0


def multi_target(cfg: ScenarioConfig, count: int, observer: int = 0, tol: float = 15.0) -> AttentionScore:
    """Share of final-approach frames with exactly ``count`` gated fields,
    each within ``tol`` pixels of a distinct rendered target centre.

    The final approach second ends when the scripted approachers stop (or
    at the observer's first contact, if earlier).
    """
    dt = cfg.model_config()[0].t_i
    movers = [s for s in cfg.robots if s.controller == "scripted"]
    end = 0
    for s in movers:
        length = sum(math.dist(a, b) for a, b in zip([(s.x, s.y)] + s.waypoints, s.waypoints))
        end = max(end, s.start_frame + math.ceil(length / (s.speed * dt)))
    end = min(end, cfg.frames)
    centres: dict[int, list] = {}
    log = run_trial(cfg, keep_traces=True, on_frame=lambda t, w, tr: centres.__setitem__(t, target_centres(w, observer, cfg.camera)))
    contact = first_contact(log, observer)
    if contact is not None:
        end = min(end, contact)
    frames = list(range(max(0, end - FINAL_WINDOW), end))
    counts, matched = [], []
    for t in frames:
        gated = [f for f in log.traces[t][observer].fields if f.response.gated]
        counts.append(len(gated))
        matched.append(len(gated) == count and _matched(gated, centres[t], tol))
    return AttentionScore(frames, counts, matched)


# -- evasion ---------------------------------------------------------------


@dataclass
class EscapeRecord:
    threat_bearing: float  # world bearing of the threat when the takeoff began
    takeoff: str | None
    trigger_frame: int | None
    entry_frame: int | None
    heading: float | None  # observer heading at escape entry

    @property
    def error(self) -> float | None:
        if self.heading is None:
            return None
        return wrap(self.heading - (self.threat_bearing + 180.0))

    def passed(self, tol: float) -> bool:
        return self.error is not None and abs(self.error) <= tol


def escape_record(log: TrialLog, cfg: ScenarioConfig, threat: int, observer: int = 0) -> EscapeRecord:
    seq = states(log, observer)
    trigger = next((i for i, s in enumerate(seq) if s in (LONG, SHORT)), None)
    entry = next((i for i, s in enumerate(seq) if s == ESCAPE), None)
    ref = trigger if trigger is not None else 0
    ox, oy, _ = pose(log, ref, observer)
    tx, ty, _ = pose(log, ref, threat)
    heading = pose(log, entry, observer)[2] if entry is not None else None
    return EscapeRecord(bearing((ox, oy), (tx, ty)), seq[trigger] if trigger is not None else None, trigger, entry, heading)


def evasion(cfg: ScenarioConfig, threat_name: str = "threat") -> EscapeRecord:
    log = run_trial(cfg)
    names = log.robot_names
    return escape_record(log, cfg, names.index(threat_name))


# -- arena navigation ------------------------------------------------------


@dataclass
class ArenaOutcome:
    background: str
    controller: str
    episodes: list[int]
    opportunities: list[int]

    @property
    def total(self) -> int:
        return sum(self.episodes)

    @property
    def success_rate(self) -> float | None:
        opp = sum(self.opportunities)
        return None if opp == 0 else max(0.0, 1.0 - self.total / opp)


def arena_outcome(cfg: ScenarioConfig, seeds, frames: int | None = None) -> ArenaOutcome:
    eps, opps = [], []
    for seed in seeds:
        run = replace(cfg, seed=seed, frames=cfg.frames if frames is None else frames)
        log = run_trial(run)
        eps.append(len(log.events))
        opps.append(log.opportunities())
    ctrl = sorted({r.controller for r in cfg.robots})
    return ArenaOutcome(cfg.arena.background, "+".join(ctrl), eps, opps)
