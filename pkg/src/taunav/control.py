"""Steering laws, controller selection by scene mode, and sense-act gating.

All laws are pure functions of the ROI summary and gains; the only loop
state (the command latched for the Act phase, the confirmed scene mode) is
owned by the episode runner via ModeTracker.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Sequence

from pydantic import BaseModel, Field, model_validator

from .tau import FL, FR, L, R, DetectionConfig, RoiSummary, SceneMode
from .vehicle import ControlCommand


class GainConfig(BaseModel):
    model_config = {"frozen": True}

    k_f: float = Field(default=1.0, gt=0)     # 1/s^2, far-band balancing gain
    k_m: float = Field(default=0.02, gt=0)    # 1/s^2, mid-band balancing gain
    k: float = Field(default=0.3, gt=0)       # 1/s^2, single-wall gain
    c: float | None = Field(default=None, gt=0)  # s, single-wall setpoint (None = derive)
    k_kong: float = Field(default=1.0, gt=0)  # derivative-difference law gain
    u_max: float = Field(default=1.5, gt=0)   # rad/s command clamp


class ManeuverConfig(BaseModel):
    """Open-loop turn primitive and degraded-perception speeds."""

    model_config = {"frozen": True}

    turn_rate: float = Field(default=0.8, gt=0)        # rad/s during Turn mode
    turn_speed: float = Field(default=0.5, ge=0)       # m/s during Turn mode
    # Slowing too far while blind inflates every tau past tau_max (tau = w/v)
    # and starves perception permanently; half cruise speed recovers.
    blind_speed: float = Field(default=0.5, ge=0)      # m/s when Blind
    single_wall_roi: str = "l"                         # "l" or "fl" (side-mapped)
    min_turn_duration: float = Field(default=1.0, ge=0)
    max_turn_duration: float = Field(default=6.0, gt=0)
    release_central_tau: float = Field(default=6.0, gt=0)

    @model_validator(mode="after")
    def _check(self):
        if self.single_wall_roi not in ("l", "fl"):
            raise ValueError("single_wall_roi must be 'l' or 'fl'")
        if self.max_turn_duration < self.min_turn_duration:
            raise ValueError("max_turn_duration must be >= min_turn_duration")
        return self


class SenseActSchedule(BaseModel):
    model_config = {"frozen": True}

    sense: float = Field(default=0.4, gt=0)   # s, straight sensing segment
    act: float = Field(default=0.25, gt=0)    # s, curved acting segment
    origin: float = 0.0                       # s, phase origin

    @property
    def period(self) -> float:
        return self.sense + self.act


class Phase(str, Enum):
    SENSE = "sense"
    ACT = "act"


class InsufficientPerception(RuntimeError):
    """A steering law was asked for without the ROI fields it needs."""


def clamp(u: float, u_max: float) -> float:
    return max(-u_max, min(u_max, u))


def tau_balancing(summary: RoiSummary, gains: GainConfig) -> float:
    """u = k_f(tau_fl - tau_fr) + k_m(tau_l - tau_r), clamped to +-u_max.

    Equalizes the tau averages seen on the two sides, which centers the
    vehicle between the walls producing them.
    """
    for idx, name in ((FL, "tau_fl"), (L, "tau_l"), (R, "tau_r"), (FR, "tau_fr")):
        if not summary.valid(idx):
            raise InsufficientPerception(f"{name} invalid")
    u = (gains.k_f * (summary.tau_fl - summary.tau_fr)
         + gains.k_m * (summary.tau_l - summary.tau_r))
    return clamp(u, gains.u_max)


def single_wall(summary: RoiSummary, side: str, roi_field: int,
                gains: GainConfig) -> float:
    """u = +-k(tau_x - c): hold a constant tau offset from one wall.

    Positive sign for a wall on the left: drifting toward the wall shrinks
    tau_x below c and the command turns the vehicle away.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if gains.c is None:
        raise ValueError("single-wall setpoint c is not configured")
    if not summary.valid(roi_field):
        raise InsufficientPerception(f"roi {roi_field} invalid")
    tau_x = summary.taus[roi_field]
    sign = 1.0 if side == "left" else -1.0
    return clamp(sign * gains.k * (tau_x - gains.c), gains.u_max)


def kong_derivative_law(history: Sequence[tuple[float, float]], period: float,
                        gains: GainConfig) -> float:
    """u = k [tau2' - tau1'] with backward-difference derivatives.

    `history` holds (tau1, tau2) observations of two features on the same
    wall, one entry per control period. Derivative estimation amplifies
    tau noise badly, which is why the single-wall law replaces this in the
    mode dispatch; it is kept as a reference implementation.
    """
    if len(history) < 2:
        raise InsufficientPerception("need two consecutive tau pairs")
    if period <= 0.0:
        raise ValueError("period must be > 0")
    (a1, a2), (b1, b2) = history[-2], history[-1]
    d1 = (b1 - a1) / period
    d2 = (b2 - a2) / period
    return clamp(gains.k_kong * (d2 - d1), gains.u_max)


def _roi_field(side: str, preferred: str) -> int:
    """Image band implementing tau_x for a wall on `side`.

    The single-wall setpoint c is derived for one specific band, so no
    cross-band substitution happens here: mid- and far-band tau values of
    the same wall differ by more than a factor of two.
    """
    if side == "left":
        return L if preferred == "l" else FL
    return R if preferred == "l" else FR


def _nearer_valid_side(summary: RoiSummary, preferred: str) -> str | None:
    """Side whose configured band is valid with the smaller tau (the nearer
    wall); None when neither side is usable."""
    left = summary.taus[_roi_field("left", preferred)]
    right = summary.taus[_roi_field("right", preferred)]
    if left is None and right is None:
        return None
    if right is None or (left is not None and left <= right):
        return "left"
    return "right"


def select_controller(mode: SceneMode, summary: RoiSummary, gains: GainConfig,
                      maneuver: ManeuverConfig, cruise_v: float) -> ControlCommand:
    """Dispatch the scene mode to a steering law; total (never raises).

    A law that lacks its ROI fields falls back to driving straight at the
    cruise speed for this frame.
    """
    if mode is SceneMode.BLIND:
        return ControlCommand(0.0, maneuver.blind_speed)
    if mode is SceneMode.TURN_LEFT:
        return ControlCommand(clamp(maneuver.turn_rate, gains.u_max), maneuver.turn_speed)
    if mode is SceneMode.TURN_RIGHT:
        return ControlCommand(clamp(-maneuver.turn_rate, gains.u_max), maneuver.turn_speed)

    try:
        if mode is SceneMode.CORRIDOR:
            try:
                return ControlCommand(tau_balancing(summary, gains), cruise_v)
            except InsufficientPerception:
                # A far band starves when the vehicle crowds one wall; hold
                # the wall-distance setpoint on the nearer valid side instead.
                side = _nearer_valid_side(summary, maneuver.single_wall_roi)
                if side is None or gains.c is None:
                    return ControlCommand(0.0, cruise_v)
                field = _roi_field(side, maneuver.single_wall_roi)
                return ControlCommand(single_wall(summary, side, field, gains),
                                      cruise_v)
        side = "left" if mode is SceneMode.SINGLE_WALL_LEFT else "right"
        field = _roi_field(side, maneuver.single_wall_roi)
        return ControlCommand(single_wall(summary, side, field, gains), cruise_v)
    except InsufficientPerception:
        return ControlCommand(0.0, cruise_v)


def phase_of(t: float, sched: SenseActSchedule) -> Phase:
    tmod = math.fmod(t - sched.origin, sched.period)
    if tmod < 0.0:
        tmod += sched.period
    return Phase.SENSE if tmod < sched.sense else Phase.ACT


def sense_act_gate(t: float, sched: SenseActSchedule,
                   u_proposed: float) -> tuple[float, Phase]:
    """Zero turning during Sense; hold the proposed (latched) command during Act."""
    if t < 0.0:
        raise ValueError("t must be >= 0")
    phase = phase_of(t, sched)
    return (0.0, phase) if phase is Phase.SENSE else (u_proposed, phase)


def interval_in_sense(t0: float, t1: float, sched: SenseActSchedule | None,
                      eps: float = 1e-9) -> bool:
    """True iff [t0, t1] lies inside a single Sense window; trivially true
    with no schedule. Samples whose difference interval touches an Act
    window carry rotation-contaminated flow and are untrusted."""
    if sched is None:
        return True
    tmod = math.fmod(t0 - sched.origin, sched.period)
    if tmod < 0.0:
        tmod += sched.period
    if tmod >= sched.sense:
        return False
    return (t1 - t0) <= (sched.sense - tmod) + eps


class ModeTracker:
    """Scene-mode state machine with switching hysteresis.

    A raw classification must persist for `hysteresis_cycles` consecutive
    trusted summaries before it replaces the confirmed mode. Turn modes add
    entry/exit guards: a minimum and maximum dwell time plus an open central
    ROI before release, preventing half-finished corner maneuvers.
    """

    def __init__(self, detection: DetectionConfig, maneuver: ManeuverConfig,
                 initial: SceneMode = SceneMode.CORRIDOR):
        self.detection = detection
        self.maneuver = maneuver
        self.mode = initial
        self._candidate: SceneMode | None = None
        self._streak = 0
        self._turn_started = 0.0

    def update(self, raw: SceneMode, summary: RoiSummary, t: float) -> SceneMode:
        if self.mode in (SceneMode.TURN_LEFT, SceneMode.TURN_RIGHT):
            if t - self._turn_started >= self.maneuver.max_turn_duration:
                self.mode = SceneMode.CORRIDOR
                self._candidate = None
                self._streak = 0
                return self.mode
            if t - self._turn_started < self.maneuver.min_turn_duration:
                return self.mode
            central_open = (summary.tau_c is None
                            or summary.tau_c >= self.maneuver.release_central_tau)
            if raw is self.mode or not central_open:
                self._candidate = None
                self._streak = 0
                return self.mode

        if raw is self.mode:
            self._candidate = None
            self._streak = 0
            return self.mode
        if raw is self._candidate:
            self._streak += 1
        else:
            self._candidate = raw
            self._streak = 1
        needed = self.detection.hysteresis_cycles
        if (raw is SceneMode.CORRIDOR
                and self.mode in (SceneMode.SINGLE_WALL_LEFT,
                                  SceneMode.SINGLE_WALL_RIGHT)):
            needed = self.detection.corridor_confirm_cycles
        if self._streak >= needed:
            self.mode = raw
            self._candidate = None
            self._streak = 0
            if raw in (SceneMode.TURN_LEFT, SceneMode.TURN_RIGHT):
                self._turn_started = t
        return self.mode
