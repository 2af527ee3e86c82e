"""Per-robot perception-action pipeline with a fixed stage order."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

import numpy as np

from alvs.attention import FieldSet, saliency
from alvs.frontend import ChannelPair, Frame, check_frame_shape, rectify, retina_diff, smooth_pair
from alvs.lplc2 import Lplc2Response, QuadrantSums, lplc2_response, quadrant_sums
from alvs.motion import DelayLine, MotionMaps, compute_motion
from alvs.params import FRAME_SHAPE, FsmConfig, ModelParams
from alvs.visuomotor import FsmState, MotorCommand, ThreatSummary, fsm_step, summarize


@dataclass
class FieldRecord:
    id: int
    cx: float
    cy: float
    quadrants: QuadrantSums
    response: Lplc2Response


@dataclass
class FrameTrace:
    """Every intermediate of one processed frame (testing and dumps only)."""

    index: int
    diff: np.ndarray
    channels: ChannelPair
    smoothed: ChannelPair
    saliency: np.ndarray
    t4: dict
    t5: dict
    motion: MotionMaps
    fields: list[FieldRecord]
    summary: ThreatSummary
    state: FsmState
    command: MotorCommand
    spawned: int | None = None
    warm: bool = False
    image: np.ndarray | None = None  # the input frame


class Pipeline:
    def __init__(self, params: ModelParams | None = None, fsm: FsmConfig | None = None, compact: bool = False):
        self.params = params or ModelParams()
        self.fsm_cfg = fsm or FsmConfig()
        self.compact = compact
        self.prev: np.ndarray | None = None
        self.delay = DelayLine(self.params.c_d, compact=compact)
        self.fields = FieldSet(self.params.r_af, self.params.d)
        self.state = FsmState()
        self.frame_count = 0

    def process_frame(self, frame, heading: float = 0.0) -> tuple[MotorCommand, FrameTrace]:
        """Run one frame through every stage and step the state machine.

        A frame of the wrong size raises ``ValueError`` and leaves the
        pipeline untouched.
        """
        check_frame_shape(frame)
        img = frame.data if isinstance(frame, Frame) else np.asarray(frame, dtype=np.uint8)
        p = self.params

        prev = img if self.prev is None else self.prev
        diff = retina_diff(prev, img)
        channels = rectify(diff, p.w)
        smoothed = smooth_pair(channels)
        sal = saliency(smoothed.on, smoothed.off)

        self.fields.update_centroids(sal)
        self.fields.fuse()
        new = self.fields.spawn(sal, p.t_a)

        delayed = self.delay.oldest()
        motion, t4, t5 = compute_motion(channels, delayed, p.n, p.s, p.compat_eq6)
        self.delay.push(channels)

        records = []
        for f in self.fields:
            q = quadrant_sums(f, motion)
            resp = lplc2_response(q, p.compat_eq9)
            f.record(resp.value)
            records.append(FieldRecord(f.id, f.cx, f.cy, q, resp))
        self.fields.prune(p.t_d, p.d)

        summary = summarize([r.cx for r in records], [r.response.value for r in records], p.w_s, [r.response.gated for r in records])
        self.state, cmd = fsm_step(self.state, summary, heading, p, self.fsm_cfg)

        self.prev = img.copy()
        trace = FrameTrace(
            index=self.frame_count,
            diff=diff,
            channels=channels,
            smoothed=smoothed,
            saliency=sal,
            t4=t4,
            t5=t5,
            motion=motion,
            fields=records,
            summary=summary,
            state=self.state,
            command=cmd,
            spawned=None if new is None else new.id,
            warm=delayed is not None,
            image=self.prev,
        )
        self.frame_count += 1
        return cmd, trace


@dataclass
class BudgetReport:
    mode: str
    buffers: dict[str, int]
    scratch: dict[str, int]
    timings_ms: list[float] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.buffers.values())

    @property
    def scratch_total(self) -> int:
        return sum(self.scratch.values())

    def timing_stats(self) -> dict[str, float] | None:
        if not self.timings_ms:
            return None
        return {
            "frames": len(self.timings_ms),
            "min_ms": min(self.timings_ms),
            "mean_ms": statistics.fmean(self.timings_ms),
            "max_ms": max(self.timings_ms),
        }

    def table(self) -> str:
        lines = [f"persistent state ({self.mode})"]
        width = max(len(k) for k in list(self.buffers) + list(self.scratch)) + 2
        for k, v in self.buffers.items():
            lines.append(f"  {k:<{width}}{v:>10d} B")
        lines.append(f"  {'total':<{width}}{self.total:>10d} B")
        lines.append(f"per-frame scratch ({self.mode}, not persistent)")
        for k, v in self.scratch.items():
            lines.append(f"  {k:<{width}}{v:>10d} B")
        lines.append(f"  {'total':<{width}}{self.scratch_total:>10d} B")
        lines.append(f"reference: about 70 KB reported for the MCU build; persistent/70KB = {self.total / 70_000:.2f}")
        stats = self.timing_stats()
        if stats:
            lines.append(
                f"latency over {stats['frames']} frames: min {stats['min_ms']:.3f} ms, mean {stats['mean_ms']:.3f} ms, "
                f"max {stats['max_ms']:.3f} ms; budget 33.33 ms, margin x{33.33 / stats['mean_ms']:.1f}"
            )
        return "\n".join(lines)

    def csv_rows(self) -> list[tuple[str, str, int]]:
        rows = [("persistent", k, v) for k, v in self.buffers.items()]
        rows.append(("persistent", "total", self.total))
        rows += [("scratch", k, v) for k, v in self.scratch.items()]
        rows.append(("scratch", "total", self.scratch_total))
        return rows


# field record: id u16, centroid 2 x f32, age u16, history d x f32
def _field_bytes(d: int) -> int:
    return 2 + 8 + 2 + 4 * d


def budget_report(pipeline: Pipeline, timings_ms=None, compact: bool | None = None, max_fields: int = 8) -> BudgetReport:
    """Itemise persistent buffers for the compact (8/16-bit) or float layout."""
    compact = pipeline.compact if compact is None else compact
    p = pipeline.params
    px = FRAME_SHAPE[0] * FRAME_SHAPE[1]
    chan = 2 if compact else 8
    real = 4 if compact else 8
    buffers = {
        "previous_frame": px,  # 8-bit luminance in both layouts
        "delay_line_on": p.c_d * px * chan,
        "delay_line_off": p.c_d * px * chan,
        "attention_fields": max_fields * _field_bytes(p.d),
        "fsm_state": 7 * 4,
        "model_params": 12 * 4,
    }
    scratch = {
        "channels_on_off": 2 * px * chan,
        "smoothed_on_off": 2 * px * chan,
        "saliency": px * chan,
        "local_motion_4dir": 4 * px * real,
    }
    return BudgetReport("compact" if compact else "float", buffers, scratch, list(timings_ms or []))
