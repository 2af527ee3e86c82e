"""Threat summary, escape headings and the wander/takeoff/escape state machine.

Angles are degrees in (-180, 180]; positive means to the right of the
robot's current heading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from alvs.params import CENTER_COLUMN, FsmConfig, ModelParams


def wrap(angle: float) -> float:
    a = math.fmod(angle, 360.0)
    if a > 180.0:
        a -= 360.0
    elif a <= -180.0:
        a += 360.0
    return a


@dataclass(frozen=True)
class ThreatSummary:
    strength: float
    raw_sum: float
    centroid_x: float | None = None
    gated: bool = False

    @classmethod
    def quiet(cls) -> "ThreatSummary":
        return cls(strength=0.5, raw_sum=0.0)


@dataclass(frozen=True)
class MotorCommand:
    linear: float  # cm/s, negative reverses
    angular: float  # deg/s, positive turns right


def summarize(centroids_x, values, w_s: float, gated=None) -> ThreatSummary:
    values = [float(v) for v in values]
    raw = sum(values)
    strength = 1.0 / (1.0 + math.exp(-raw / w_s))
    cx = sum(x * v for x, v in zip(centroids_x, values)) / raw if raw > 0 else None
    any_gated = any(gated) if gated is not None else raw > 0
    return ThreatSummary(strength=strength, raw_sum=raw, centroid_x=cx, gated=any_gated)


def bearing(centroid_x: float, alpha: float) -> float:
    return alpha * (centroid_x - CENTER_COLUMN)


def long_heading(centroid_x: float, alpha: float) -> float:
    return wrap(bearing(centroid_x, alpha) + 180.0)


def short_headings(centroid_x: float, alpha: float) -> tuple[float, float]:
    b = bearing(centroid_x, alpha)
    theta1 = b - 90.0 if b >= 0 else b + 90.0
    theta2 = theta1 - 90.0 if theta1 < 0 else theta1 + 90.0
    return theta1, wrap(theta2)


WANDER, LONG, SHORT, ESCAPE, SPIN = "wander", "long_takeoff", "short_takeoff", "escape", "spin"


@dataclass(frozen=True)
class FsmState:
    """Active behaviour plus whatever that behaviour latched on entry.

    Headings stored here are absolute (world) headings.
    """

    name: str = WANDER
    target: float | None = None
    phase: int = 0
    theta1: float | None = None
    theta2: float | None = None
    threat: float | None = None
    remaining: int = 0


def _turn_towards(target: float, heading: float, cfg: FsmConfig, dt: float) -> float:
    err = wrap(target - heading)
    limit = cfg.max_turn_rate
    return max(-limit, min(limit, err / dt))


def _enter_short(summary: ThreatSummary, heading: float, params: ModelParams) -> FsmState:
    b = bearing(summary.centroid_x, params.alpha)
    t1, t2 = short_headings(summary.centroid_x, params.alpha)
    return FsmState(SHORT, target=wrap(heading + t1), phase=1, theta1=wrap(heading + t1), theta2=wrap(heading + t2), threat=wrap(heading + b))


def fsm_step(state: FsmState, summary: ThreatSummary, heading: float, params: ModelParams, cfg: FsmConfig) -> tuple[FsmState, MotorCommand]:
    """Advance one frame and return the new state with this frame's command."""
    dt = params.t_i
    escape_mode = cfg.mode == "escape"

    if escape_mode and summary.raw_sum > params.t_s and state.name != SHORT and summary.centroid_x is not None:
        state = _enter_short(summary, heading, params)
    elif state.name == WANDER and summary.gated and summary.raw_sum > 0:
        if escape_mode:
            state = FsmState(LONG, target=wrap(heading + long_heading(summary.centroid_x, params.alpha)))
        else:
            state = FsmState(SPIN, remaining=cfg.spin_frames)

    if state.name == LONG and abs(wrap(state.target - heading)) <= cfg.heading_tol:
        state = FsmState(ESCAPE, target=state.target, remaining=cfg.escape_frames)

    if state.name == SHORT:
        if state.phase == 1 and abs(wrap(heading - state.threat)) >= 90.0 - cfg.heading_tol:
            state = replace(state, phase=2, target=state.theta2)
        if state.phase == 2 and abs(wrap(heading - (state.threat + 180.0))) <= cfg.heading_tol:
            state = FsmState(ESCAPE, target=state.theta2, remaining=cfg.escape_frames)

    if state.name == WANDER:
        return state, MotorCommand(cfg.wander_speed, 0.0)
    if state.name == SPIN:
        nxt = FsmState() if state.remaining <= 1 else replace(state, remaining=state.remaining - 1)
        return nxt, MotorCommand(0.0, cfg.max_turn_rate)
    if state.name == LONG:
        return state, MotorCommand(0.0, _turn_towards(state.target, heading, cfg, dt))
    if state.name == SHORT:
        if state.phase == 1:
            return state, MotorCommand(-cfg.retreat_speed, _turn_towards(state.theta1, heading, cfg, dt))
        return state, MotorCommand(summary.strength * cfg.max_speed, _turn_towards(state.theta2, heading, cfg, dt))
    # escape
    nxt = FsmState() if state.remaining <= 1 else replace(state, remaining=state.remaining - 1)
    return nxt, MotorCommand(summary.strength * cfg.max_speed, 0.0)
