import math

import pytest

from taunav.control import (
    GainConfig,
    InsufficientPerception,
    ManeuverConfig,
    ModeTracker,
    Phase,
    SenseActSchedule,
    interval_in_sense,
    kong_derivative_law,
    phase_of,
    select_controller,
    sense_act_gate,
    single_wall,
    tau_balancing,
)
from taunav.tau import DetectionConfig, RoiSummary, SceneMode


def summary(fl=None, l=None, c=None, r=None, fr=None, t=0.0):
    taus = (fl, l, c, r, fr)
    counts = tuple(10 if v is not None else 0 for v in taus)
    return RoiSummary(taus, counts, t)


def test_balancing_balanced_corridor():
    g = GainConfig(k_f=0.1, k_m=0.2)
    assert tau_balancing(summary(fl=4.0, l=3.0, r=3.0, fr=4.0), g) == 0.0


def test_balancing_direct_substitution():
    g = GainConfig(k_f=0.1, k_m=0.2)
    u = tau_balancing(summary(fl=6.0, l=3.0, r=3.0, fr=4.0), g)
    assert u == pytest.approx(0.2)


def test_balancing_antisymmetry():
    g = GainConfig(k_f=0.13, k_m=0.21)
    s = summary(fl=6.2, l=3.4, r=2.9, fr=4.8)
    swapped = summary(fl=4.8, l=2.9, r=3.4, fr=6.2)
    assert tau_balancing(swapped, g) == -tau_balancing(s, g)


def test_balancing_requires_all_lateral_fields():
    g = GainConfig()
    with pytest.raises(InsufficientPerception, match="tau_fr"):
        tau_balancing(summary(fl=6.0, l=3.0, r=3.0), g)


def test_balancing_clamp_preserves_sign():
    g = GainConfig(k_f=10.0, k_m=0.02, u_max=1.5)
    u = tau_balancing(summary(fl=9.0, l=3.0, r=3.0, fr=1.0), g)
    assert u == 1.5
    u = tau_balancing(summary(fl=1.0, l=3.0, r=3.0, fr=9.0), g)
    assert u == -1.5


def test_single_wall_setpoint_and_signs():
    from taunav.tau import L, R
    g = GainConfig(k=0.5, c=3.0)
    assert single_wall(summary(l=3.0), "left", L, g) == 0.0
    assert single_wall(summary(l=5.0), "left", L, g) == pytest.approx(1.0)
    assert single_wall(summary(r=5.0), "right", R, g) == pytest.approx(-1.0)


def test_single_wall_piecewise_linear_slope():
    from taunav.tau import L
    g = GainConfig(k=0.5, c=3.0, u_max=10.0)
    taus = [1.0, 2.0, 4.0, 6.5]
    us = [single_wall(summary(l=t), "left", L, g) for t in taus]
    for tau, u in zip(taus, us):
        assert u == pytest.approx(0.5 * (tau - 3.0))


def test_single_wall_invalid_field():
    from taunav.tau import L
    with pytest.raises(InsufficientPerception):
        single_wall(summary(fl=2.0), "left", L, GainConfig(c=3.0))


def test_single_wall_needs_setpoint():
    from taunav.tau import L
    with pytest.raises(ValueError, match="setpoint"):
        single_wall(summary(l=2.0), "left", L, GainConfig())


def test_kong_derivative_law():
    g = GainConfig(k_kong=1.0)
    assert kong_derivative_law([(3.0, 5.0), (3.0, 5.0)], 0.1, g) == 0.0
    u = kong_derivative_law([(3.0, 5.0), (2.9, 4.8)], 0.1, g)
    assert u == pytest.approx(-1.0)
    with pytest.raises(InsufficientPerception):
        kong_derivative_law([(3.0, 5.0)], 0.1, g)


def test_select_controller_dispatch():
    g = GainConfig(k=0.5, c=3.0)
    m = ManeuverConfig()
    balanced = summary(fl=4.0, l=3.0, r=3.0, fr=4.0)
    cmd = select_controller(SceneMode.CORRIDOR, balanced, g, m, 1.0)
    assert cmd.u == 0.0 and cmd.v == 1.0

    cmd = select_controller(SceneMode.SINGLE_WALL_LEFT, summary(l=5.0), g, m, 1.0)
    assert cmd.u == pytest.approx(0.5 * 2.0)

    cmd = select_controller(SceneMode.BLIND, summary(), g, m, 1.0)
    assert cmd.u == 0.0 and cmd.v == m.blind_speed

    cmd = select_controller(SceneMode.TURN_LEFT, summary(), g, m, 1.0)
    assert cmd.u == pytest.approx(m.turn_rate) and cmd.v == m.turn_speed
    cmd = select_controller(SceneMode.TURN_RIGHT, summary(), g, m, 1.0)
    assert cmd.u == pytest.approx(-m.turn_rate)


def test_select_controller_total_on_missing_fields():
    g = GainConfig(k=0.5, c=3.0)
    m = ManeuverConfig()
    # corridor without far bands falls back to nearer-side wall holding
    cmd = select_controller(SceneMode.CORRIDOR, summary(l=2.0, r=8.0), g, m, 1.0)
    assert cmd.u == pytest.approx(0.5 * (2.0 - 3.0))
    # nothing valid: straight at cruise speed
    cmd = select_controller(SceneMode.CORRIDOR, summary(), g, m, 1.0)
    assert cmd.u == 0.0 and cmd.v == 1.0
    cmd = select_controller(SceneMode.SINGLE_WALL_RIGHT, summary(l=5.0), g, m, 1.0)
    assert cmd.u == 0.0


def test_sense_act_gate_schedule():
    sched = SenseActSchedule(sense=0.4, act=0.25)
    u, phase = sense_act_gate(0.2, sched, 0.7)
    assert phase is Phase.SENSE and u == 0.0
    u, phase = sense_act_gate(0.5, sched, 0.7)
    assert phase is Phase.ACT and u == 0.7
    u, phase = sense_act_gate(0.65, sched, 0.7)
    assert phase is Phase.SENSE and u == 0.0
    with pytest.raises(ValueError):
        sense_act_gate(-0.1, sched, 0.0)


def test_sense_window_integral_is_zero():
    sched = SenseActSchedule(sense=0.4, act=0.25)
    total = 0.0
    dt = 1e-3
    t = 0.0
    while t < sched.period:
        u, phase = sense_act_gate(t, sched, 0.9)
        if phase is Phase.SENSE:
            total += abs(u) * dt
        t += dt
    assert total == 0.0


def test_interval_in_sense():
    sched = SenseActSchedule(sense=0.4, act=0.25)
    assert interval_in_sense(0.0, 0.03, sched)
    assert not interval_in_sense(0.38, 0.42, sched)   # spans the act start
    assert not interval_in_sense(0.45, 0.50, sched)   # inside act
    assert not interval_in_sense(0.63, 0.67, sched)   # spans act end
    assert interval_in_sense(0.66, 0.70, sched)
    assert interval_in_sense(5.0, 99.0, None)


def test_phase_periodicity():
    sched = SenseActSchedule(sense=0.4, act=0.25)
    for t in (0.1, 0.39, 7.15):
        assert phase_of(t, sched) is phase_of(t + 13 * sched.period, sched)


def make_tracker(**kw):
    det = DetectionConfig(**kw.pop("detection", {}))
    man = ManeuverConfig(**kw.pop("maneuver", {}))
    return ModeTracker(det, man, SceneMode.CORRIDOR)


def test_mode_tracker_hysteresis():
    tr = make_tracker()
    s = summary(fl=2.0, l=4.0)
    dt = 1 / 30
    assert tr.update(SceneMode.SINGLE_WALL_LEFT, s, 0 * dt) is SceneMode.CORRIDOR
    assert tr.update(SceneMode.SINGLE_WALL_LEFT, s, 1 * dt) is SceneMode.CORRIDOR
    assert tr.update(SceneMode.SINGLE_WALL_LEFT, s, 2 * dt) is SceneMode.SINGLE_WALL_LEFT


def test_mode_tracker_streak_resets():
    tr = make_tracker()
    s = summary(fl=2.0, l=4.0)
    tr.update(SceneMode.SINGLE_WALL_LEFT, s, 0.0)
    tr.update(SceneMode.CORRIDOR, s, 0.03)
    tr.update(SceneMode.SINGLE_WALL_LEFT, s, 0.07)
    tr.update(SceneMode.SINGLE_WALL_LEFT, s, 0.10)
    assert tr.mode is SceneMode.CORRIDOR
    tr.update(SceneMode.SINGLE_WALL_LEFT, s, 0.13)
    assert tr.mode is SceneMode.SINGLE_WALL_LEFT


def test_mode_tracker_slow_corridor_exit_from_single_wall():
    tr = make_tracker(detection={"hysteresis_cycles": 3, "corridor_confirm_cycles": 6})
    s = summary(fl=2.0, l=4.0, r=4.0, fr=2.0)
    dt = 1 / 30
    for i in range(3):
        tr.update(SceneMode.SINGLE_WALL_LEFT, s, i * dt)
    assert tr.mode is SceneMode.SINGLE_WALL_LEFT
    for i in range(3, 8):
        tr.update(SceneMode.CORRIDOR, s, i * dt)
    assert tr.mode is SceneMode.SINGLE_WALL_LEFT   # 5 < corridor_confirm_cycles
    tr.update(SceneMode.CORRIDOR, s, 8 * dt)
    assert tr.mode is SceneMode.CORRIDOR


def test_mode_tracker_turn_dwell_and_release():
    tr = make_tracker(maneuver={"min_turn_duration": 0.5, "max_turn_duration": 2.0,
                                "release_central_tau": 6.0})
    open_central = summary(fl=4.0, l=5.0, c=9.0, r=5.0, fr=4.0)
    for i in range(3):
        tr.update(SceneMode.TURN_LEFT, open_central, 1.0 + i / 30)
    assert tr.mode is SceneMode.TURN_LEFT
    # before the minimum dwell nothing releases
    assert tr.update(SceneMode.CORRIDOR, open_central, 1.2) is SceneMode.TURN_LEFT
    # after the dwell, a corridor streak with an open central ROI releases
    for i in range(3):
        mode = tr.update(SceneMode.CORRIDOR, open_central, 1.8 + i / 30)
    assert mode is SceneMode.CORRIDOR


def test_mode_tracker_turn_forced_release():
    tr = make_tracker(maneuver={"min_turn_duration": 0.2, "max_turn_duration": 1.0})
    closed = summary(fl=4.0, l=5.0, c=2.0, r=5.0, fr=4.0)
    for i in range(3):
        tr.update(SceneMode.TURN_RIGHT, closed, i / 30)
    assert tr.mode is SceneMode.TURN_RIGHT
    # central stays closed so release waits for the dwell cap
    assert tr.update(SceneMode.CORRIDOR, closed, 0.8) is SceneMode.TURN_RIGHT
    assert tr.update(SceneMode.CORRIDOR, closed, 1.2) is SceneMode.CORRIDOR


def test_gain_config_validation():
    with pytest.raises(ValueError):
        GainConfig(k_f=-0.1)
    with pytest.raises(ValueError):
        GainConfig(u_max=0.0)
    with pytest.raises(ValueError):
        ManeuverConfig(single_wall_roi="c")
    with pytest.raises(ValueError):
        SenseActSchedule(sense=0.0)
