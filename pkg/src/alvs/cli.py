"""Command-line entry point.

Exit status: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import shutil
import sys
import tempfile
import time
from dataclasses import replace
from pathlib import Path

from alvs.params import FsmConfig, ModelParams, apply_overrides, parse_override

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _overrides(args) -> dict[str, str]:
    out = {}
    for item in args.set or []:
        try:
            key, value = parse_override(item)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        out[key] = value
    if getattr(args, "compat_eq6", False):
        out["compat_eq6"] = "true"
    if getattr(args, "compat_eq9", False):
        out["compat_eq9"] = "true"
    if getattr(args, "mode", None):
        out["mode"] = args.mode
    try:
        apply_overrides(ModelParams(), FsmConfig(), out)
    except KeyError as exc:
        raise UsageError(f"unknown parameter in --set: {exc.args[0]}") from None
    except ValueError as exc:
        raise UsageError(f"bad --set value: {exc}") from None
    return out


def _configure(cfg, args):
    """Apply CLI overrides, seed and frame count to a scenario."""
    overrides = _overrides(args)
    mode = overrides.pop("mode", None)
    cfg = replace(cfg, overrides={**cfg.overrides, **overrides})
    if mode:
        cfg = replace(cfg, mode=mode)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "frames", None) is not None:
        if args.frames < 0:
            raise UsageError("--frames must be >= 0")
        cfg = replace(cfg, frames=args.frames)
    cfg.validate()
    return cfg


def _load(path):
    from alvs.sim.scenario import load_scenario

    if not Path(path).is_file():
        raise FileNotFoundError(f"scenario file not found: {path}")
    return load_scenario(path)


def _publish(tmp: Path, out: Path) -> None:
    """Move finished outputs into place so failed runs leave nothing behind."""
    out.mkdir(parents=True, exist_ok=True)
    for item in sorted(tmp.iterdir()):
        dest = out / item.name
        if dest.is_dir():
            shutil.rmtree(dest)
        shutil.move(str(item), str(dest))


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# -- subcommands -----------------------------------------------------------


def cmd_run(args) -> int:
    from alvs.sim.trial import run_trial

    cfg = _configure(_load(args.scenario), args)
    out = Path(args.out)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        log = run_trial(cfg, compact=args.compact, quadrants=args.quadrants, views_dir=tmp / "views" if args.views else None)
        log.write(tmp, quadrants=args.quadrants)
        _publish(tmp, out)
    print(log.summary_text(), end="")
    return EXIT_OK


def _angles(text: str | None) -> list[float]:
    from alvs.sim.library import SWEEP_ANGLES

    if text is None:
        return list(SWEEP_ANGLES)
    try:
        return [float(a) for a in text.replace(";", ",").split(",") if a.strip()]
    except ValueError:
        raise UsageError(f"--angles must be a comma-separated list of numbers, got {text!r}") from None


def _fmt(v) -> str:
    return "" if v is None else f"{v:.2f}"


def cmd_sweep(args) -> int:
    from alvs.sim import experiments as ex
    from alvs.sim import library as lib

    angles = _angles(args.angles)
    if args.dual_trials < 0:
        raise UsageError("--dual-trials must be >= 0")
    if args.ratio < 1:
        raise UsageError("--ratio must be >= 1")
    rows, table = [], []
    for a in angles:
        cfg = _configure(lib.evasion(a, speed=args.speed), args)
        rec = ex.evasion(cfg)
        ok = rec.passed(args.tolerance)
        rows.append((f"{a:.2f}", _fmt(rec.threat_bearing), rec.takeoff or "", rec.entry_frame if rec.entry_frame is not None else "", _fmt(rec.heading), _fmt(wrap_opposite(rec.threat_bearing)), _fmt(rec.error), "pass" if ok else "fail"))
        table.append(f"angle {a:+7.2f}  error {_fmt(rec.error) or 'no escape':>9}  {'pass' if ok else 'FAIL'}")
    dual_rows = []
    base_seed = args.seed or 0
    for k in range(args.dual_trials):
        cfg = _configure(lib.dual_threat(base_seed + k, ratio=args.ratio), args)
        cfg = replace(cfg, seed=base_seed + k)
        from alvs.sim.trial import run_trial

        log = run_trial(cfg)
        fast = ex.escape_record(log, cfg, log.robot_names.index("fast"))
        slow = ex.escape_record(log, cfg, log.robot_names.index("slow"))
        ok = fast.passed(args.dual_tolerance)
        dual_rows.append((base_seed + k, _fmt(fast.threat_bearing), _fmt(slow.threat_bearing), fast.entry_frame if fast.entry_frame is not None else "", _fmt(fast.heading), _fmt(fast.error), "pass" if ok else "fail"))
        table.append(f"dual seed {base_seed + k:4d}  error vs faster {_fmt(fast.error) or 'no escape':>9}  {'pass' if ok else 'FAIL'}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "sweep.csv", ["angle", "threat_bearing", "takeoff", "entry_frame", "escape_heading", "opposite_bearing", "error", "result"], rows)
    if args.dual_trials:
        _write_csv(out / "dual_threat.csv", ["seed", "fast_bearing", "slow_bearing", "entry_frame", "escape_heading", "error", "result"], dual_rows)
    passed = sum(r[-1] == "pass" for r in rows)
    table.append(f"directional evasion: {passed}/{len(rows)} within +-{args.tolerance:g} deg")
    if args.dual_trials:
        table.append(f"dual threat: {sum(r[-1] == 'pass' for r in dual_rows)}/{len(dual_rows)} within +-{args.dual_tolerance:g} deg")
    (out / "sweep_summary.txt").write_text("\n".join(table) + "\n")
    print("\n".join(table))
    return EXIT_OK


def wrap_opposite(b: float | None) -> float | None:
    from alvs.visuomotor import wrap

    return None if b is None else wrap(b + 180.0)


def cmd_stimuli(args) -> int:
    from alvs.pgm import write_pgm
    from alvs.stimuli import LIBRARY, generate

    if args.kind not in LIBRARY:
        raise UsageError(f"unknown stimulus {args.kind!r}; choose from {', '.join(sorted(LIBRARY))}")
    if args.frames is not None and args.frames < 1:
        raise UsageError("--frames must be >= 1")
    frames = generate(args.kind, args.frames)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for f in frames:
        write_pgm(out / f"frame_{f.index:04d}.pgm", f.data)
    print(f"wrote {len(frames)} frames to {out}")
    return EXIT_OK


def _parse_range(text: str, count: int) -> range:
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"--range must look like A:B or N, got {text!r}") from None
    if not (0 <= lo <= hi < count):
        raise UsageError(f"frame range {text} outside the valid range 0:{count - 1}")
    return range(lo, hi + 1)


def _inspect_traces(args):
    """Full pipeline traces for the chosen input source, plus a label."""
    from alvs.pipeline import Pipeline

    if args.scenario:
        from alvs.sim.trial import run_trial

        cfg = _configure(_load(args.scenario), args)
        log = run_trial(cfg, keep_traces=True, compact=args.compact)
        perceivers = log.perceiving()
        if not perceivers:
            raise UsageError("scenario has no perceiving (alvs) robot")
        rid = perceivers[0] if args.robot is None else args.robot
        if rid not in perceivers:
            raise UsageError(f"robot {rid} does not run the pipeline; choose from {perceivers}")
        return [tr[rid] for tr in log.traces]
    params, fsm = apply_overrides(ModelParams(), FsmConfig(), _overrides(args))
    if args.frames_dir:
        from alvs.pgm import read_frame

        paths = sorted(Path(args.frames_dir).glob("*.pgm"))
        if not paths:
            raise FileNotFoundError(f"no .pgm frames in {args.frames_dir}")
        frames = [read_frame(p, i) for i, p in enumerate(paths)]
    else:
        from alvs.stimuli import LIBRARY, generate

        if args.stimulus not in LIBRARY:
            raise UsageError(f"unknown stimulus {args.stimulus!r}; choose from {', '.join(sorted(LIBRARY))}")
        frames = generate(args.stimulus)
    pipe = Pipeline(params, fsm, args.compact)
    return [pipe.process_frame(f)[1] for f in frames]


def cmd_inspect(args) -> int:
    from alvs.pgm import dump_map, write_pgm

    sources = [bool(args.scenario), bool(args.frames_dir), bool(args.stimulus)]
    if sum(sources) != 1:
        raise UsageError("inspect needs exactly one of --scenario, --frames-dir, --stimulus")
    traces = _inspect_traces(args)
    if not traces:
        raise UsageError("input has no frames")
    wanted = _parse_range(args.range or f"0:{len(traces) - 1}", len(traces))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    att, quad, stats = [], [], []
    for t in wanted:
        tr = traces[t]
        d = out / f"frame_{t:04d}"
        d.mkdir(exist_ok=True)
        write_pgm(d / "p_layer.pgm", tr.image)
        layers = {
            "l_layer": tr.channels.on + tr.channels.off,
            "saliency": tr.saliency,
            "dir_r": tr.motion.lm_r,
            "dir_l": tr.motion.lm_l,
            "dir_d": tr.motion.lm_d,
            "dir_u": tr.motion.lm_u,
        }
        for name, m in layers.items():
            dump_map(d / f"{name}.pgm", m)
            stats.append((t, name, f"{m.min():.4f}", f"{m.max():.4f}", int((m != 0).sum()), int((m > 0).sum())))
        for f in tr.fields:
            att.append((t, f.id, f"{f.cx:.4f}", f"{f.cy:.4f}", f"{f.response.value:.4f}"))
            quad.append((t, f.id, *(f"{q:.4f}" for q in f.quadrants.as_tuple())))
    _write_csv(out / "attention.csv", ["frame", "af_id", "cx", "cy", "resp"], att)
    _write_csv(out / "quadrants.csv", ["frame", "af_id", "q1", "q2", "q3", "q4"], quad)
    _write_csv(out / "layers.csv", ["frame", "layer", "min", "max", "nonzero", "positive"], stats)
    print(f"dumped frames {wanted.start}:{wanted.stop - 1} to {out}")
    return EXIT_OK


def _bench_frames(args, count: int):
    from alvs.sim.library import arena
    from alvs.sim.render import render_view
    from alvs.sim.trial import build_world

    import numpy as np

    cfg = _load(args.scenario) if args.scenario else arena("checker")
    world = build_world(cfg, np.random.default_rng(args.seed or 0))
    rid = next((r.id for r in world.robots if r.controller == "alvs"), world.robots[0].id)
    frames = []
    body = world.robot(rid)
    for i in range(count):
        # sweep the view slowly so every frame carries motion
        body.heading += 1.5
        frames.append(render_view(world, rid, cfg.camera))
    return frames


def cmd_bench(args) -> int:
    from alvs.pipeline import Pipeline, budget_report

    if args.frames < 1:
        raise UsageError("--frames must be >= 1")
    params, fsm = apply_overrides(ModelParams(), FsmConfig(), _overrides(args))
    frames = _bench_frames(args, args.frames)
    pipe = Pipeline(params, fsm, args.compact)
    timings = []
    for f in frames:
        t0 = time.perf_counter()
        pipe.process_frame(f)
        timings.append((time.perf_counter() - t0) * 1000.0)
    rep = budget_report(pipe, timings)
    s = rep.timing_stats()
    text = (
        f"frames {s['frames']}  min {s['min_ms']:.3f} ms  mean {s['mean_ms']:.3f} ms  max {s['max_ms']:.3f} ms\n"
        f"real-time budget 33.33 ms per frame: mean margin x{33.33 / s['mean_ms']:.1f}, worst-case margin x{33.33 / s['max_ms']:.1f}\n"
    )
    print(text, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "bench.csv", ["frame", "ms"], [(i, f"{v:.4f}") for i, v in enumerate(timings)])
        (out / "bench.txt").write_text(text)
    return EXIT_OK


def cmd_report(args) -> int:
    from alvs.pipeline import Pipeline, budget_report

    modes = [True] if args.compact else [False] if args.float else [True, False]
    reports = [budget_report(Pipeline(compact=c)) for c in modes]
    if args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["mode", "section", "buffer", "bytes"])
        for r in reports:
            w.writerows((r.mode, *row) for row in r.csv_rows())
    else:
        print("\n\n".join(r.table() for r in reports))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "budget.csv", ["mode", "section", "buffer", "bytes"], [(r.mode, *row) for r in reports for row in r.csv_rows()])
        (out / "budget.txt").write_text("\n\n".join(r.table() for r in reports) + "\n")
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def _model_flags(p, frames=True):
    p.add_argument("--seed", type=int, default=None, help="random seed (overrides the scenario's)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="parameter override, repeatable")
    if frames:
        p.add_argument("--frames", type=int, default=None, help="trial length in frames")
    p.add_argument("--compat-eq6", action="store_true", help="HRC variant with an undelayed far-arm product")
    p.add_argument("--compat-eq9", action="store_true", help="gate on 'no quadrant sum equals zero'")
    p.add_argument("--mode", choices=("escape", "spin"), default=None)
    p.add_argument("--compact", action="store_true", help="16-bit channel storage")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alvs", description="Attention-driven LPLC2 looming detection and escape simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run one scenario and write its logs")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--views", action="store_true", help="also write every rendered view as PGM")
    p.add_argument("--quadrants", action="store_true", help="also write per-field quadrant sums")
    _model_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="directional evasion sweep and dual-threat trials")
    p.add_argument("--out", required=True)
    p.add_argument("--angles", default=None, help="comma-separated approach bearings in degrees (default: nine angles -35..35)")
    p.add_argument("--speed", type=float, default=25.0, help="threat speed, cm/s")
    p.add_argument("--tolerance", type=float, default=10.0)
    p.add_argument("--dual-trials", type=int, default=10)
    p.add_argument("--ratio", type=float, default=2.0, help="speed ratio of the dual-threat approachers")
    p.add_argument("--dual-tolerance", type=float, default=25.0)
    _model_flags(p, frames=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stimuli", help="write a synthetic stimulus sequence as PGM frames")
    p.add_argument("--kind", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--frames", type=int, default=None)
    p.set_defaults(func=cmd_stimuli)

    p = sub.add_parser("inspect", help="dump intermediate layers for a frame range")
    p.add_argument("--scenario")
    p.add_argument("--frames-dir")
    p.add_argument("--stimulus")
    p.add_argument("--range", default=None, help="A:B inclusive, or a single frame")
    p.add_argument("--robot", type=int, default=None)
    p.add_argument("--out", required=True)
    _model_flags(p)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("bench", help="per-frame latency over rendered frames")
    p.add_argument("--frames", type=int, default=1000)
    p.add_argument("--scenario")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--compact", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="itemised memory budget")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--compact", action="store_true", help="compact layout only")
    g.add_argument("--float", action="store_true", help="float layout only")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    from alvs.sim.scenario import ConfigError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"alvs {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, FileNotFoundError, ValueError, OSError) as exc:
        print(f"alvs {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
