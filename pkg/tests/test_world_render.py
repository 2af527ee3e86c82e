import math

import numpy as np
import pytest

from alvs.sim.render import CameraModel, Checker, ImageTexture, Uniform, render_view
from alvs.sim.world import Arena, CollisionMonitor, RobotBody, WorldState, at_wall, detect_collisions, step_world
from alvs.visuomotor import MotorCommand


def _world(*robots, texture=None):
    return WorldState(Arena(texture=texture), list(robots))


def test_step_still():
    w = _world(RobotBody(0, 50, 50, 30))
    step_world(w, {0: MotorCommand(0, 0)}, 1 / 30)
    r = w.robot(0)
    assert (r.x, r.y, r.heading) == (50, 50, 30)


def test_step_forward_one_second():
    w = _world(RobotBody(0, 20, 50, 0))
    step_world(w, {0: MotorCommand(10, 0)}, 1.0)
    assert w.robot(0).x == pytest.approx(30.0, abs=1e-12)
    assert w.frame == 1


def test_rotation_closes():
    w = _world(RobotBody(0, 50, 50, 10))
    for _ in range(120):
        step_world(w, {0: MotorCommand(0, 90)}, 1 / 30)
    assert w.robot(0).heading == pytest.approx(10.0, abs=1e-9)


def test_walls_clamp():
    w = _world(RobotBody(0, 97, 50, 0))
    step_world(w, {0: MotorCommand(20, 0)}, 1.0)
    assert w.robot(0).x == 98.0 and at_wall(w, w.robot(0))


def test_step_rejects_bad_dt():
    with pytest.raises(ValueError):
        step_world(_world(), {}, 0)


def test_collision_definitions():
    far = _world(RobotBody(0, 30, 50), RobotBody(1, 40, 50))
    assert detect_collisions(far, 4) == []
    near = _world(RobotBody(0, 30, 50), RobotBody(1, 33.9, 50))
    ev = detect_collisions(near, 4)
    assert [(e.kind, e.a, e.b) for e in ev] == [("robot", 0, 1)]
    wall = _world(RobotBody(0, 3.9, 50))
    assert [(e.kind, e.a, e.b) for e in detect_collisions(wall, 4)] == [("wall", 0, -1)]


def test_monitor_counts_episodes_once():
    w = _world(RobotBody(0, 30, 50), RobotBody(1, 33, 50))
    mon = CollisionMonitor()
    assert len(mon.update(w)) == 1
    assert mon.update(w) == []
    w.robot(1).x = 45
    assert mon.update(w) == []
    w.robot(1).x = 32
    assert len(mon.update(w)) == 1


def test_robot_validation():
    with pytest.raises(ValueError):
        RobotBody(0, 1, 1, diameter=0)
    with pytest.raises(ValueError):
        RobotBody(0, 1, 1, controller="ghost")


def _dark(img, value=100):
    return img.data < value


def test_empty_uniform_arena():
    w = _world(RobotBody(0, 50, 50, 0), texture=Uniform(200))
    img = render_view(w, 0, CameraModel(blur=False)).data.astype(int)
    assert img.shape == (72, 99)
    cam = CameraModel()
    top = cam.height / 2 - math.atan2(10 - 5, 50) / cam.pitch
    base = cam.height / 2 + math.atan2(5, 50) / cam.pitch
    mid = 49
    rows = np.arange(72)
    wall_rows = rows[(rows >= math.ceil(top)) & (rows + 1 <= math.floor(base))]
    assert np.all(img[wall_rows, mid] == 200)
    assert np.all(img[: int(top), mid] == w.arena.sky_value)
    assert np.all(img[int(math.ceil(base)) :, mid] == w.arena.floor_value)


def _span(dist):
    w = _world(RobotBody(0, 50, 90, -90), RobotBody(1, 50, 90 - dist))
    dark = _dark(render_view(w, 0, CameraModel(blur=False)), 130)
    cols = np.nonzero(dark.any(axis=0))[0]
    rows = np.nonzero(dark.any(axis=1))[0]
    return cols.size, rows.size


def test_span_doubles_at_half_distance():
    w1, h1 = _span(40)
    w2, h2 = _span(20)
    assert abs(w2 - 2 * w1) <= 1
    assert abs(h2 - 2 * h1) <= 1


def test_robot_outside_fov_invisible():
    w = _world(RobotBody(0, 50, 90, -90), RobotBody(1, 50 + 40 * math.sin(math.radians(40)), 90 - 40 * math.cos(math.radians(40))))
    assert not _dark(render_view(w, 0)).any()


def test_render_is_deterministic():
    w = _world(RobotBody(0, 30, 60, -45), RobotBody(1, 60, 30), texture=Checker())
    assert np.array_equal(render_view(w, 0).data, render_view(w, 0).data)


def test_textures():
    assert Uniform(5).sample(np.zeros(3), np.zeros(3)).tolist() == [5, 5, 5]
    c = Checker(5, 10, 20)
    assert c.sample(np.array([0.0, 5.0, 5.0]), np.array([0.0, 0.0, 5.0])).tolist() == [20, 10, 20]
    t = ImageTexture(np.array([[1, 2], [3, 4]], np.uint8), cm_per_px=1.0)
    assert t.sample(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.0, 1.0])).tolist() == [3, 4, 1]
    with pytest.raises(ValueError):
        ImageTexture(np.zeros((2, 2)), cm_per_px=0)


def test_camera_geometry():
    cam = CameraModel()
    assert cam.pitch == pytest.approx(math.radians(70) / 99)
    assert cam.column_angles()[49] == pytest.approx(0.0)
    with pytest.raises(ValueError):
        CameraModel(fov=0)
