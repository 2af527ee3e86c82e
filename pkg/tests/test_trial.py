from dataclasses import replace

import numpy as np
import pytest

from alvs.sim import library
from alvs.sim.experiments import first_contact, selectivity
from alvs.sim.scenario import ConfigError, RobotSpec, ScenarioConfig
from alvs.sim.trial import TrialLog, WallReflex, run_trial
from alvs.sim.world import Arena, RobotBody, WorldState
from alvs.visuomotor import MotorCommand


def test_zero_frame_trial():
    log = run_trial(replace(library.approach(), frames=0))
    assert log.trajectories == [] and log.events == [] and log.behavior == []
    texts = log.csv_texts()
    assert texts["trajectories.csv"] == "frame,robot_id,x,y,heading\n"


def test_invalid_config_rejected_before_running():
    with pytest.raises(ConfigError):
        run_trial(ScenarioConfig(robots=[]))
    with pytest.raises(ConfigError):
        run_trial(ScenarioConfig(robots=[RobotSpec("a")], overrides={"t_a": "-1"}))


def test_approach_is_gated_before_contact():
    sel = selectivity(library.approach())
    assert sel.contact is not None
    assert any(sel.gated[: sel.contact])


def test_translation_rarely_gated():
    sel = selectivity(library.translation())
    assert sel.overall_fraction <= 0.05


def test_trial_is_deterministic(tmp_path):
    cfg = replace(library.arena("checker", seed=5), frames=60)
    a = run_trial(cfg).csv_texts(quadrants=True)
    b = run_trial(cfg).csv_texts(quadrants=True)
    assert a == b


def test_write_outputs(tmp_path):
    cfg = replace(library.approach(), overrides={"t_s": "8000"})
    log = run_trial(cfg, quadrants=True)
    names = sorted(p.name for p in log.write(tmp_path, quadrants=True))
    assert names == ["attention.csv", "behavior.csv", "events.csv", "quadrants.csv", "summary.txt", "trajectories.csv"]
    summary = (tmp_path / "summary.txt").read_text()
    assert "overrides: t_s=8000" in summary and "collision_episodes" in summary
    assert "-0.0000" not in (tmp_path / "trajectories.csv").read_text()


def test_blind_robots_cruise():
    cfg = replace(library.arena("uniform", "blind", seed=1), frames=30)
    log = run_trial(cfg)
    assert log.gated == {} and log.success_rate() is None
    n = 3
    start = log.trajectories[:n]
    end = log.trajectories[-n:]
    moved = [np.hypot(a[2] - b[2], a[3] - b[3]) for a, b in zip(start, end)]
    assert all(m > 5 for m in moved)


def test_observer_without_motors_stays_put():
    log = run_trial(library.approach())
    xs = {(row[2], row[3]) for row in log.trajectories if row[1] == 0}
    assert xs == {(50.0, 80.0)}


def test_opportunities_and_success_rate():
    log = TrialLog("t", ["a", "b"], ["alvs", "alvs"])
    log.gated = {0: [False, True, True, False, True], 1: [True, False]}
    assert log.opportunities(0) == 2 and log.opportunities() == 3
    assert log.success_rate() == 1.0


def test_wall_reflex_blocks_reverse_and_turns_away():
    w = WorldState(Arena(), [RobotBody(0, 50, 4, -90, "blind")])
    reflex = WallReflex()
    rng = np.random.default_rng(0)
    r = w.robot(0)
    out = reflex.filter(MotorCommand(10, 0), r, w, rng, 1 / 30)
    assert out.linear == 0 and out.angular != 0
    r.heading = 90.0  # facing away, reversing into the wall
    fresh = WallReflex()
    assert fresh.filter(MotorCommand(-10, 30), r, w, rng, 1 / 30) == MotorCommand(0.0, 30)
    assert fresh.filter(MotorCommand(10, 0), r, w, rng, 1 / 30) is None


def test_first_contact_on_approach():
    log = run_trial(library.approach())
    assert first_contact(log, 0) == min(e.frame for e in log.events)
