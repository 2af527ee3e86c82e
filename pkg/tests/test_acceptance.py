"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[criterion N] PASS|FAIL ...`` line straight to
the terminal (bypassing capture) so a plain ``pytest -v`` run shows them.
The arena test runs 60 two-minute trials and takes well over ten minutes.
"""

import csv
import math
import time
from dataclasses import replace

import numpy as np
import pytest

import oracles
from alvs.attention import FieldSet
from alvs.cli import main
from alvs.lplc2 import quadrant_sums
from alvs.motion import MotionMaps, hrc_channel
from alvs.params import FRAME_SHAPE, ModelParams
from alvs.sim import experiments as ex
from alvs.sim import library as lib
from alvs.sim.scenario import load_scenario
from alvs.sim.trial import run_trial
from alvs.visuomotor import long_heading, short_headings, summarize

SCENARIOS = lib.SCENARIO_DIR


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} {detail}")

    return emit


def _scenario(name):
    return load_scenario(SCENARIOS / f"{name}.ini")


# 1 -------------------------------------------------------------------------


def _inputs(rng, integer):
    if integer:
        return rng.integers(-255, 256, size=FRAME_SHAPE).astype(np.float64)
    return rng.normal(0.0, 80.0, size=FRAME_SHAPE)


def _close(a, b, integer):
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if integer:
        return np.array_equal(a, b)
    return bool(np.allclose(a, b, rtol=1e-9, atol=0.0))


def test_criterion_1_oracle_equivalence(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    counts = {"hrc": 0, "spawn": 0, "centroid": 0, "quadrants": 0}
    failures = []
    for k in range(40):
        integer = k % 2 == 0
        now, delayed = _inputs(rng, integer), _inputs(rng, integer)
        for v in "rldu":
            if not _close(hrc_channel(now, delayed, v), oracles.hrc(now, delayed, v), integer):
                failures.append(("hrc", k, v))
        counts["hrc"] += 1

        sal = np.abs(_inputs(rng, integer))
        fs = FieldSet()
        for _ in range(int(rng.integers(0, 3))):
            fs.add(int(rng.integers(0, 99)), int(rng.integers(0, 72)))
        want = oracles.masked_argmax(sal, [(f.cx, f.cy, f.half_side) for f in fs])
        got = fs.spawn(sal, 0.0)
        if want is None or not want[2] > 0:
            ok = got is None
        else:
            ok = got is not None and (got.cx, got.cy) == want[:2]
        if not ok:
            failures.append(("spawn", k))
        counts["spawn"] += 1

        fs = FieldSet()
        cx, cy = float(rng.uniform(0, 98)), float(rng.uniform(0, 71))
        f = fs.add(cx, cy)
        want = oracles.centroid(sal, cx, cy, f.half_side)
        fs.update_centroids(sal)
        if not _close((f.cx, f.cy), want, integer):
            failures.append(("centroid", k))
        counts["centroid"] += 1

        maps = {v: _inputs(rng, integer) for v in "rldu"}
        qx = int(rng.integers(0, 99)) if integer else float(rng.uniform(0, 98))
        qy = int(rng.integers(0, 72)) if integer else float(rng.uniform(0, 71))
        field = FieldSet().add(qx, qy)
        got = quadrant_sums(field, MotionMaps(maps["r"], maps["l"], maps["d"], maps["u"])).as_tuple()
        if not _close(got, oracles.quadrants(maps, qx, qy, field.half_side), integer):
            failures.append(("quadrants", k))
        counts["quadrants"] += 1
    elapsed = time.perf_counter() - t0
    ok = not failures and min(counts.values()) >= 20 and elapsed < 60
    report(1, ok, f"{counts} random 72x99 inputs (half integer, half float), mismatches {failures[:5]}, {elapsed:.1f} s")
    assert ok


# 2 -------------------------------------------------------------------------


def test_criterion_2_looming_selectivity(report):
    t0 = time.perf_counter()
    loom = ex.selectivity(_scenario("approach_head_on"))
    trans = ex.selectivity(_scenario("translation_pass"))
    rec = ex.selectivity(_scenario("receding"))
    elapsed = time.perf_counter() - t0
    ok = loom.final_fraction(10) >= 0.8 and trans.overall_fraction <= 0.05 and rec.overall_fraction <= 0.05 and elapsed < 120
    report(
        2,
        ok,
        f"approach final-10 gated {loom.final_fraction(10):.0%}, translation {trans.overall_fraction:.1%}, "
        f"receding {rec.overall_fraction:.1%}, {elapsed:.1f} s",
    )
    assert ok


# 3 -------------------------------------------------------------------------


def test_criterion_3_multi_target_attention(report):
    scores = {n: ex.multi_target(_scenario(name), n) for n, name in ((2, "double_approach"), (3, "triple_approach"))}
    ok = all(s.fraction >= 0.5 for s in scores.values())
    detail = ", ".join(f"{n} targets: {s.fraction:.0%} of final-second frames matched (gated counts {sorted(set(s.gated_counts))})" for n, s in scores.items())
    report(3, ok, detail)
    assert ok


# 4 -------------------------------------------------------------------------


def test_criterion_4_directional_evasion(report):
    errors = []
    for angle in lib.SWEEP_ANGLES:
        name = lib.evasion(angle).name
        errors.append(ex.evasion(_scenario(name)).error)
    passed = sum(e is not None and abs(e) <= 10.0 for e in errors)
    worst = max((abs(e) for e in errors if e is not None), default=float("nan"))
    report(4, passed == 9, f"{passed}/9 angles within +-10 deg, worst error {worst:.2f} deg")
    assert passed == 9


# 5 -------------------------------------------------------------------------


def test_criterion_5_dual_threat(report):
    passed = 0
    errors = []
    for seed in range(10):
        cfg = replace(lib.dual_threat(seed, ratio=2.0), seed=seed)
        log = run_trial(cfg)
        rec = ex.escape_record(log, cfg, log.robot_names.index("fast"))
        errors.append(rec.error)
        passed += rec.passed(25.0)
    report(5, passed >= 8, f"{passed}/10 escapes oppose the faster robot within +-25 deg")
    assert passed >= 8


# 6 -------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_6_arena_navigation(report):
    seeds = range(10)
    lines, ok = [], True
    for bg in lib.BACKGROUNDS:
        cfg = _scenario(f"arena_{bg}")
        alvs = ex.arena_outcome(cfg, seeds)
        blind = ex.arena_outcome(cfg.with_controller("alvs", "blind"), seeds)
        ratio = alvs.total / blind.total if blind.total else math.inf
        ok &= alvs.total <= 0.5 * blind.total
        rate = alvs.success_rate
        lines.append(
            f"{bg}: ALVS {alvs.total} vs blind {blind.total} episodes (ratio {ratio:.2f}), "
            f"success rate {'n/a' if rate is None else f'{rate:.1%}'}"
        )
    report(6, ok, "; ".join(lines) + " (real robots: 93.7% / 96.1%)")
    assert ok


# 7 -------------------------------------------------------------------------


def test_criterion_7_visuomotor_formulas(report):
    p = ModelParams()
    t1, t2 = short_headings(98, p.alpha)
    checks = [
        summarize([], [], p.w_s).strength == 0.5,
        abs(summarize([49], [4000 * math.log(3)], p.w_s).strength - 0.75) <= 1e-9,
        long_heading(49, p.alpha) == 180.0,
        abs(long_heading(0, p.alpha) - 145.36) <= 0.01,
        abs(t1 - -55.36) <= 0.01 and abs(t2 - -145.36) <= 0.01,
    ]
    report(7, all(checks), f"{sum(checks)}/5 formula values; long_heading(0) = {long_heading(0, p.alpha):.3f}, short_headings(98) = ({t1:.3f}, {t2:.3f})")
    assert all(checks)


# 8 -------------------------------------------------------------------------


def test_criterion_8_budget_and_timing(report, tmp_path, capsys):
    assert main(["report", "--out", str(tmp_path)]) == 0
    assert main(["bench", "--frames", "1000", "--out", str(tmp_path)]) == 0
    capsys.readouterr()
    rows = list(csv.DictReader(open(tmp_path / "budget.csv")))
    totals = {r["mode"]: int(r["bytes"]) for r in rows if r["section"] == "persistent" and r["buffer"] == "total"}
    items = {r["mode"] for r in rows if r["section"] == "persistent" and r["buffer"] != "total"}
    ms = [float(r["ms"]) for r in csv.DictReader(open(tmp_path / "bench.csv"))]
    mean = sum(ms) / len(ms)
    ok = totals["compact"] <= 100_000 and items == {"compact", "float"} and len(ms) == 1000 and mean < 33.33
    report(
        8,
        ok,
        f"compact state {totals['compact']} B (float {totals['float']} B; reference figure about 70 KB), "
        f"mean latency {mean:.2f} ms over {len(ms)} frames (margin x{33.33 / mean:.0f}), max {max(ms):.2f} ms",
    )
    assert ok


# 9 -------------------------------------------------------------------------


def test_criterion_9_determinism(report):
    names = sorted(p.stem for p in SCENARIOS.glob("*.ini"))
    differing = []
    for name in names:
        cfg = _scenario(name)
        a = run_trial(cfg, quadrants=True).csv_texts(quadrants=True)
        b = run_trial(cfg, quadrants=True).csv_texts(quadrants=True)
        if a != b:
            differing.append(name)
    report(9, not differing, f"{len(names) - len(differing)}/{len(names)} bundled scenarios byte-identical on re-run")
    assert not differing
