"""Time-to-transit: closed forms, per-track estimates, ROI aggregation, and
scene classification.

tau is the time until the vehicle crosses the line through a feature
perpendicular to the current heading. The geometric form uses ground truth
and keeps its sign (negative = transit already happened); the perceived form
is the image-plane ratio |position| / |flow| and is always positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .camera import CameraConfig, Track
from .vehicle import VehicleState
from .world import FeaturePoint

ROI_NAMES = ("fl", "l", "c", "r", "fr")
FL, L, C, R, FR = range(5)


class RoiConfig(BaseModel):
    model_config = {"frozen": True}

    band_fractions: tuple[float, float, float, float, float] = (0.2, 0.2, 0.2, 0.2, 0.2)
    min_features_per_roi: int = Field(default=3, ge=1)
    tau_max: float = Field(default=50.0, gt=0)
    velocity_floor: float = Field(default=1.0, gt=0)   # px/s
    statistic: str = "mean"                            # "mean" | "median"

    @model_validator(mode="after")
    def _check(self):
        if any(f <= 0 for f in self.band_fractions):
            raise ValueError("band_fractions must be positive")
        if abs(sum(self.band_fractions) - 1.0) > 1e-12:
            raise ValueError("band_fractions must sum to 1")
        if self.statistic not in ("mean", "median"):
            raise ValueError("statistic must be 'mean' or 'median'")
        return self

    def band_edges_px(self, cam: CameraConfig) -> np.ndarray:
        """Six band edges in pixels across [-width/2, +width/2]."""
        w = cam.width_px
        cuts = np.concatenate([[0.0], np.cumsum(self.band_fractions)])
        return -w / 2.0 + cuts * w

    def boundary_angles(self, cam: CameraConfig) -> tuple[float, float]:
        """(phi1, phi2): body angles of the fl|l and l|c band boundaries."""
        edges = self.band_edges_px(cam)
        phi1 = math.atan2(abs(edges[1]), cam.focal_px)
        phi2 = math.atan2(abs(edges[2]), cam.focal_px)
        if not 0.0 < phi2 < phi1 < cam.hfov / 2.0:
            raise ValueError("ROI boundaries must satisfy 0 < phi2 < phi1 < hfov/2")
        return phi1, phi2

    def boundary_tangents(self, cam: CameraConfig) -> tuple[float, float]:
        """(f_f, f_m) = (tan(phi1), tan(phi2)), the two band-edge slopes."""
        phi1, phi2 = self.boundary_angles(cam)
        return math.tan(phi1), math.tan(phi2)

    def roi_index(self, u_px: float, cam: CameraConfig) -> int:
        """Which of the five vertical bands an image column falls in."""
        edges = self.band_edges_px(cam)
        idx = int(np.searchsorted(edges[1:-1], u_px, side="right"))
        return min(4, max(0, idx))


class DetectionConfig(BaseModel):
    """Thresholds for scene-mode classification (see detect_scene_mode)."""

    model_config = {"frozen": True}

    jump_threshold: float = Field(default=0.6, gt=0)   # relative tau jump
    tau_turn: float = Field(default=3.0, gt=0)         # s, "small" central tau
    hysteresis_cycles: int = Field(default=3, ge=1)
    window: int = Field(default=6, ge=2)               # summaries considered
    # Jumps are only meaningful between summaries of the same sensing window;
    # across an acting gap the camera has rotated and every band re-fills.
    max_jump_gap: float = Field(default=0.05, gt=0)    # s, max pair spacing
    # Guards against sparse-count noise masquerading as turn cues: a jump
    # needs this much sample support on both sides, and the small-central
    # condition must hold over this many trailing summaries.
    min_jump_count: int = Field(default=6, ge=1)
    central_streak: int = Field(default=3, ge=1)
    # Leaving a single-wall mode for corridor takes a longer streak: heading
    # swings flash wall features across the image axis, making the empty
    # side look valid for a few frames at a time.
    corridor_confirm_cycles: int = Field(default=12, ge=1)


@dataclass(frozen=True)
class TauSample:
    feature_id: int
    tau: float          # s, > 0
    image_u: float      # px
    roi_index: int      # 0..4 (fl, l, c, r, fr)


@dataclass(frozen=True)
class RoiSummary:
    """Per-frame controller input: one tau value (or None) per ROI."""

    taus: tuple[float | None, float | None, float | None, float | None, float | None]
    counts: tuple[int, int, int, int, int]
    timestamp: float = 0.0

    @property
    def tau_fl(self): return self.taus[FL]
    @property
    def tau_l(self): return self.taus[L]
    @property
    def tau_c(self): return self.taus[C]
    @property
    def tau_r(self): return self.taus[R]
    @property
    def tau_fr(self): return self.taus[FR]

    def valid(self, i: int) -> bool:
        return self.taus[i] is not None

    def left_valid(self) -> bool:
        return self.valid(FL) or self.valid(L)

    def right_valid(self) -> bool:
        return self.valid(FR) or self.valid(R)

    def any_valid(self) -> bool:
        return any(t is not None for t in self.taus)


@dataclass(frozen=True)
class DropStats:
    """Why per-track tau samples were discarded in one frame."""

    slow_flow: int = 0      # |flow| below the velocity floor
    contracting: int = 0    # radial velocity <= 0 (not an expanding track)
    tau_overflow: int = 0   # tau above tau_max

    @property
    def total(self) -> int:
        return self.slow_flow + self.contracting + self.tau_overflow


class SceneMode(str, Enum):
    CORRIDOR = "corridor"
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    SINGLE_WALL_LEFT = "single_wall_left"
    SINGLE_WALL_RIGHT = "single_wall_right"
    BLIND = "blind"


def _feature_xy(feature) -> tuple[float, float]:
    if isinstance(feature, FeaturePoint):
        return float(feature.position[0]), float(feature.position[1])
    x, y = feature
    return float(x), float(y)


def geometric_tau(state: VehicleState, feature) -> float:
    """Ground-truth tau from Eq.-of-motion geometry; signed.

    (cos(theta)(x_f - x) + sin(theta)(y_f - y)) / v
    """
    if state.v <= 0.0:
        raise ValueError("geometric tau undefined at zero speed")
    x_f, y_f = _feature_xy(feature)
    return (math.cos(state.theta) * (x_f - state.x)
            + math.sin(state.theta) * (y_f - state.y)) / state.v


def general_tau(state: VehicleState, phi: float, feature) -> float:
    """tau perceived by a camera mounted at body angle phi (exact closed form).

    Reduces to geometric_tau when phi = 0. The transit-line denominator
    vanishes for features on the heading line, where the value is undefined.
    """
    x_f, y_f = _feature_xy(feature)
    dx = x_f - state.x
    dy = y_f - state.y
    th = state.theta
    denom = state.v * (math.sin(th) * dx - math.cos(th) * dy)
    if abs(denom) < 1e-12:
        raise ValueError("transit line degenerate (feature on the heading line)")
    a = dx * math.sin(th + phi) - dy * math.cos(th + phi)
    b = dx * math.cos(th + phi) + dy * math.sin(th + phi)
    return a * b / denom


def perceived_tau_expansion(t: float, phi: float, x_f: float, y_f: float) -> float:
    """Perceived tau on the canonical run (0, t, pi/2), v = 1: the full
    trigonometric polynomial in phi, not its first-order truncation."""
    if x_f <= 0.0:
        raise ValueError("x_f must be > 0 (canonical setup; x_f = 0 divides by zero)")
    if y_f <= 0.0:
        raise ValueError("y_f must be > 0 (canonical setup)")
    s, c = math.sin(phi), math.cos(phi)
    sc = s * c
    return (t * t * sc / x_f
            + t * (-2.0 * y_f * sc / x_f + s * s - c * c)
            + y_f * y_f * sc / x_f - x_f * sc
            - y_f * s * s + y_f * c * c)


def perceived_tau(track: Track, velocity_floor: float = 1.0) -> float:
    """Image-plane tau |r| / |rdot| for one track; always positive."""
    speed = math.hypot(track.vel_u, track.vel_v)
    if speed <= velocity_floor:
        raise ValueError("flow speed below the velocity floor")
    return math.hypot(track.u_px, track.v_px) / speed


def samples_from_tracks(tracks: Sequence[Track], cam: CameraConfig,
                        cfg: RoiConfig) -> tuple[list[TauSample], DropStats]:
    """Per-track tau with the validity gates applied.

    Drops tracks with flow below the velocity floor, tracks whose radial
    velocity is not positive (contracting flow has no transit ahead), and
    tau values beyond tau_max. Returns the kept samples plus drop counts.
    """
    samples: list[TauSample] = []
    slow = contracting = overflow = 0
    for tr in tracks:
        speed = math.hypot(tr.vel_u, tr.vel_v)
        if speed <= cfg.velocity_floor:
            slow += 1
            continue
        if tr.u_px * tr.vel_u + tr.v_px * tr.vel_v <= 0.0:
            contracting += 1
            continue
        tau = math.hypot(tr.u_px, tr.v_px) / speed
        if tau > cfg.tau_max:
            overflow += 1
            continue
        samples.append(TauSample(tr.feature_id, tau, tr.u_px,
                                 cfg.roi_index(tr.u_px, cam)))
    return samples, DropStats(slow, contracting, overflow)


def aggregate_rois(samples: Sequence[TauSample], cfg: RoiConfig,
                   timestamp: float = 0.0) -> RoiSummary:
    """Reduce per-feature tau samples to the five-ROI controller input."""
    buckets: list[list[float]] = [[] for _ in range(5)]
    for s in samples:
        if not 0 <= s.roi_index <= 4:
            raise ValueError(f"sample roi_index {s.roi_index} out of range")
        if 0.0 < s.tau <= cfg.tau_max:
            buckets[s.roi_index].append(s.tau)
    taus: list[float | None] = []
    counts: list[int] = []
    reduce = np.median if cfg.statistic == "median" else np.mean
    for vals in buckets:
        counts.append(len(vals))
        if len(vals) >= cfg.min_features_per_roi:
            taus.append(float(reduce(vals)))
        else:
            taus.append(None)
    return RoiSummary(tuple(taus), tuple(counts), timestamp)


def _jump_events(window: Sequence[RoiSummary], cfg: "DetectionConfig"):
    """(index, side, magnitude) for every tau discontinuity in the window.

    A discontinuity is a relative change above the jump threshold between
    same-sensing-window summaries of one lateral field, or a well-supported
    field dropping from valid to invalid (signal lost, magnitude inf).
    Pairs spaced more than max_jump_gap apart are skipped: an acting gap
    rotates the camera and re-fills every band, which is not an environment
    discontinuity. Both summaries need min_jump_count samples in the field
    so sparse-count noise cannot masquerade as a turn cue.
    """
    events = []
    sides = {FL: "left", L: "left", R: "right", FR: "right"}
    for i in range(1, len(window)):
        prev, cur = window[i - 1], window[i]
        if cur.timestamp - prev.timestamp > cfg.max_jump_gap:
            continue
        for field, side in sides.items():
            a, b = prev.taus[field], cur.taus[field]
            if a is None or prev.counts[field] < cfg.min_jump_count:
                continue
            if b is None:
                events.append((i, side, math.inf))
            elif (cur.counts[field] >= cfg.min_jump_count
                  and abs(b - a) / a > cfg.jump_threshold):
                events.append((i, side, abs(b - a) / a))
    return events


def detect_scene_mode(history: Sequence[RoiSummary],
                      cfg: DetectionConfig | None = None) -> SceneMode:
    """Classify the environment from recent ROI summaries (raw, stateless).

    Corridor: both sides valid and temporally continuous. Turn: a lateral
    tau discontinuity inside the window while the central tau is small;
    the turn opens toward the side that jumped. Single wall: only one side
    valid across the whole window. Blind: nothing valid.

    Switching hysteresis is applied by the caller (see control.ModeTracker).
    """
    cfg = cfg or DetectionConfig()
    if len(history) < 2:
        raise ValueError("detect_scene_mode needs at least two summaries")
    window = list(history)[-cfg.window:]
    latest = window[-1]

    if not latest.any_valid():
        return SceneMode.BLIND

    left_all = all(s.left_valid() for s in window)
    right_all = all(s.right_valid() for s in window)
    left_none = not any(s.left_valid() for s in window)
    right_none = not any(s.right_valid() for s in window)
    if left_all and right_none:
        return SceneMode.SINGLE_WALL_LEFT
    if right_all and left_none:
        return SceneMode.SINGLE_WALL_RIGHT

    tail = window[-cfg.central_streak:]
    central_small = (len(tail) >= cfg.central_streak
                     and all(s.tau_c is not None and s.tau_c < cfg.tau_turn
                             for s in tail))
    if central_small:
        events = _jump_events(window, cfg)
        if events:
            # most recent event wins; larger magnitude breaks ties
            events.sort(key=lambda e: (e[0], e[2]))
            _, side, _ = events[-1]
            return SceneMode.TURN_LEFT if side == "left" else SceneMode.TURN_RIGHT

    return SceneMode.CORRIDOR
