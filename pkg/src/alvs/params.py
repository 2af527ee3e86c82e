"""Model and controller configuration.

Defaults for the neural network come from the published parameter table;
the controller constants are tuning choices for the simulated robot.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

FRAME_HEIGHT = 72
FRAME_WIDTH = 99
FRAME_SHAPE = (FRAME_HEIGHT, FRAME_WIDTH)
CENTER_COLUMN = 49


@dataclass(frozen=True)
class ModelParams:
    w: float = 0.25  # ON-channel weight
    n: int = 3  # correlated neighbours per HRC
    r_af: int = 36  # attention field half-side, pixels
    t_a: float = 100.0  # spawn threshold
    t_d: float = 5000.0  # prune threshold
    d: int = 4  # response window, frames
    w_s: float = 4000.0  # sigmoid scale for escape strength
    alpha: float = 0.707  # degrees per pixel column
    t_s: float = 7000.0  # short-takeoff threshold
    t_i: float = 1.0 / 30.0  # inter-frame interval, seconds
    c_d: int = 1  # HRC delay, frames
    s: int = 1  # HRC sampling step, pixels
    compat_eq6: bool = False  # HRC without delay on the far/near product
    compat_eq9: bool = False  # gate on "no quadrant equals zero"

    def __post_init__(self):
        for name in ("t_a", "t_d", "t_s", "w", "w_s", "t_i", "alpha"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= self.r_af <= 49:
            raise ValueError("r_af must lie in [1, 49]")
        if self.c_d < 1 or self.s < 1 or self.d < 1:
            raise ValueError("c_d, s and d must be >= 1")


@dataclass(frozen=True)
class FsmConfig:
    mode: str = "escape"  # or "spin"
    wander_speed: float = 10.0  # cm/s
    max_speed: float = 20.0  # cm/s
    retreat_speed: float = 20.0  # cm/s
    max_turn_rate: float = 360.0  # deg/s
    heading_tol: float = 5.0  # deg
    escape_frames: int = 30
    spin_frames: int = 15

    def __post_init__(self):
        if self.mode not in ("escape", "spin"):
            raise ValueError(f"unknown behaviour mode {self.mode!r}")
        if self.max_speed <= 0 or self.max_turn_rate <= 0:
            raise ValueError("max_speed and max_turn_rate must be > 0")
        if abs(self.wander_speed) > self.max_speed or abs(self.retreat_speed) > self.max_speed:
            raise ValueError("wander/retreat speed exceeds max_speed")
        if self.heading_tol <= 0 or self.escape_frames < 1 or self.spin_frames < 1:
            raise ValueError("heading_tol, escape_frames and spin_frames must be positive")


def _coerce(field: dataclasses.Field, raw: str):
    kind = field.type if isinstance(field.type, type) else {"int": int, "float": float, "bool": bool, "str": str}[field.type]
    if kind is bool:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return kind(raw.strip())


def known_keys() -> set[str]:
    return {f.name for f in dataclasses.fields(ModelParams)} | {f.name for f in dataclasses.fields(FsmConfig)}


def apply_overrides(params: ModelParams, fsm: FsmConfig, overrides: dict[str, str]) -> tuple[ModelParams, FsmConfig]:
    """Apply ``key=value`` string overrides to either config object.

    Unknown keys raise ``KeyError``; malformed values raise ``ValueError``.
    """
    p_fields = {f.name: f for f in dataclasses.fields(ModelParams)}
    f_fields = {f.name: f for f in dataclasses.fields(FsmConfig)}
    p_changes, f_changes = {}, {}
    for key, raw in overrides.items():
        if key in p_fields:
            p_changes[key] = _coerce(p_fields[key], raw)
        elif key in f_fields:
            f_changes[key] = _coerce(f_fields[key], raw)
        else:
            raise KeyError(f"unknown parameter {key!r}")
    return dataclasses.replace(params, **p_changes), dataclasses.replace(fsm, **f_changes)


def parse_override(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise ValueError(f"override must look like key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()
