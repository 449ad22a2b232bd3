"""Closed-loop episode runner: world + vehicle + camera + tau + control.

One episode is strictly single-threaded and deterministic for a given
config and seed. Sweeps run independent episodes concurrently, sharing only
the immutable World.
"""

from __future__ import annotations

import io
import itertools
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .camera import CameraConfig, ImagePoint, make_tracks, project, with_age
from .control import (
    GainConfig,
    ManeuverConfig,
    ModeTracker,
    Phase,
    SenseActSchedule,
    interval_in_sense,
    phase_of,
    select_controller,
    sense_act_gate,
)
from .fixtures import resolve_world_path
from .geometry import point_segments_min_distance
from .tau import (
    DetectionConfig,
    DropStats,
    RoiConfig,
    RoiSummary,
    SceneMode,
    TauSample,
    aggregate_rois,
    detect_scene_mode,
    geometric_tau,
    samples_from_tracks,
)
from .vehicle import ControlCommand, VehicleState, step
from .world import World, centerline_offset, centerline_progress, load_world

EPISODE_CSV_COLUMNS = ("t", "x", "y", "theta", "v", "u", "phase", "mode",
                       "tau_fl", "tau_l", "tau_c", "tau_r", "tau_fr", "offset")
TAU_TRACE_CSV_COLUMNS = ("t", "tau_geom", "tau_per", "phase", "variant", "maneuver")


class InitialState(BaseModel):
    model_config = {"frozen": True}

    x: float = 0.0
    y: float = 0.5
    theta: float = math.pi / 2.0
    v: float = Field(default=1.0, gt=0)


class EpisodeConfig(BaseModel):
    model_config = {"frozen": True}

    world: str
    initial: InitialState = InitialState()
    camera: CameraConfig = CameraConfig()
    roi: RoiConfig = RoiConfig()
    gains: GainConfig = GainConfig()
    maneuver: ManeuverConfig = ManeuverConfig()
    detection: DetectionConfig = DetectionConfig()
    schedule: SenseActSchedule | None = SenseActSchedule()  # None = continuous
    duration: float = Field(default=20.0, gt=0)
    control_period: float | None = Field(default=None, gt=0)  # None = frame interval
    substeps_per_frame: int = Field(default=3, ge=1)
    seed: int = Field(default=0, ge=0)
    controller: str = "auto"            # "auto" | "fixed" (open loop at fixed_u)
    fixed_u: float = 0.0
    footprint_radius: float = Field(default=0.25, ge=0)
    initial_mode: SceneMode = SceneMode.CORRIDOR
    single_wall_standoff: float | None = Field(default=None, gt=0)  # m, for derived c
    # Frames of per-ROI smoothing fed to the controller (1 = none). The
    # smoother resets whenever sensing resumes after an acting gap, so only
    # same-window, rotation-free summaries are averaged.
    control_smoothing: int = Field(default=6, ge=1)

    @model_validator(mode="after")
    def _check(self):
        if self.controller not in ("auto", "fixed"):
            raise ValueError("controller must be 'auto' or 'fixed'")
        if self.control_period is not None:
            ratio = self.control_period * self.camera.frame_rate
            if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                raise ValueError("control_period must be a positive multiple "
                                 "of the camera frame interval")
        return self

    @property
    def control_frames(self) -> int:
        if self.control_period is None:
            return 1
        return int(round(self.control_period * self.camera.frame_rate))


class SummarySmoother:
    """Running per-ROI mean over the last N trusted summaries.

    Smooths the controller input only; a field stays valid only while the
    latest raw summary has it valid, so starvation semantics are unchanged.
    Resets when consecutive summaries are separated by an acting gap.
    """

    def __init__(self, window: int, max_gap: float):
        self.window = max(1, window)
        self.max_gap = max_gap
        self._recent: deque[RoiSummary] = deque(maxlen=self.window)

    def push(self, summary: RoiSummary) -> RoiSummary:
        if self._recent and summary.timestamp - self._recent[-1].timestamp > self.max_gap:
            self._recent.clear()
        self._recent.append(summary)
        if self.window == 1 or len(self._recent) == 1:
            return summary
        taus = []
        for i in range(5):
            if summary.taus[i] is None:
                taus.append(None)
                continue
            vals = [s.taus[i] for s in self._recent if s.taus[i] is not None]
            taus.append(float(np.mean(vals)))
        return RoiSummary(tuple(taus), summary.counts, summary.timestamp)


@dataclass(frozen=True)
class FrameRecord:
    index: int
    t: float
    trusted: bool
    samples: tuple[TauSample, ...]
    summary: RoiSummary
    drops: DropStats
    mode_raw: SceneMode | None
    mode: SceneMode


@dataclass
class EpisodeLog:
    config: EpisodeConfig
    ticks: list[tuple] = field(default_factory=list)   # EPISODE_CSV_COLUMNS rows
    frames: list[FrameRecord] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    collided: bool = False
    metrics: dict | None = None

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(EPISODE_CSV_COLUMNS) + "\n")
        for row in self.ticks:
            out.write(",".join(_cell(v) for v in row) + "\n")
        return out.getvalue()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def derived_single_wall_setpoint(roi: RoiConfig, cam: CameraConfig,
                                 maneuver: ManeuverConfig, standoff: float,
                                 v: float) -> float:
    """Setpoint c for which the single-wall law rests `standoff` meters from
    the wall: c = standoff * mean(cot(band angles)) / v, using the chosen
    ROI band's pinhole geometry."""
    edges = roi.band_edges_px(cam)
    lo, hi = (abs(edges[1]), abs(edges[2])) if maneuver.single_wall_roi == "l" \
        else (abs(edges[0]), abs(edges[1]))
    mean_cot = 0.5 * (cam.focal_px / lo + cam.focal_px / hi)
    return standoff * mean_cot / v


def resolve_gains(cfg: EpisodeConfig, world: World) -> GainConfig:
    """Fill in the derived single-wall setpoint when c is unset."""
    if cfg.gains.c is not None:
        return cfg.gains
    standoff = cfg.single_wall_standoff or world.corridor_half_width
    if standoff <= 0.0:
        standoff = 1.0
    c = derived_single_wall_setpoint(cfg.roi, cfg.camera, cfg.maneuver,
                                     standoff, cfg.initial.v)
    return cfg.gains.model_copy(update={"c": c})


def run_episode(cfg: EpisodeConfig, world: World | None = None,
                base_dir: Path | None = None) -> EpisodeLog:
    """Run one closed-loop episode; deterministic for a given config."""
    if world is None:
        world = load_world(resolve_world_path(cfg.world, base_dir))
    cam, roi, sched = cfg.camera, cfg.roi, cfg.schedule
    gains = resolve_gains(cfg, world)
    state = VehicleState(cfg.initial.x, cfg.initial.y, cfg.initial.theta, cfg.initial.v)
    cruise_v = cfg.initial.v
    rng = np.random.default_rng(cfg.seed)
    frame_dt = cam.frame_dt
    h = frame_dt / cfg.substeps_per_frame
    n_frames = max(1, int(round(cfg.duration * cam.frame_rate)))
    tracker = ModeTracker(cfg.detection, cfg.maneuver, cfg.initial_mode)
    history: deque[RoiSummary] = deque(maxlen=cfg.detection.window + 2)
    smoother = SummarySmoother(cfg.control_smoothing, cfg.detection.max_jump_gap)
    log = EpisodeLog(config=cfg)

    if cfg.controller == "fixed":
        proposal = ControlCommand(cfg.fixed_u, cruise_v)
    else:
        proposal = ControlCommand(0.0, cruise_v)

    def offset_of(s: VehicleState):
        return centerline_offset(world, (s.x, s.y)) if world.centerline is not None else None

    last_summary: RoiSummary | None = None

    def log_tick(t: float, s: VehicleState, u: float, phase: Phase | None):
        taus = last_summary.taus if last_summary is not None else (None,) * 5
        log.ticks.append((
            float(t), float(s.x), float(s.y), float(s.theta), float(s.v), float(u),
            phase.value if phase is not None else "",
            tracker.mode.value,
            *[None if v is None else float(v) for v in taus],
            offset_of(s),
        ))

    phase0 = phase_of(0.0, sched) if sched is not None else None
    log_tick(0.0, state, 0.0, phase0)

    prev_points = project(state, cam, world)
    ages = {p.feature_id: 1 for p in prev_points}
    drop_totals = {"slow_flow": 0, "contracting": 0, "tau_overflow": 0, "tracked": 0}

    for k in range(n_frames):
        # dynamics substeps across one frame interval; each logged row holds
        # the state at its timestamp and the command/phase of the substep
        # that produced it
        for j in range(cfg.substeps_per_frame):
            # integer-ratio time arithmetic: the last substep of a frame gets
            # the exact frame timestamp (k + 1) * frame_dt
            idx = k * cfg.substeps_per_frame + j
            t_sub = idx / cfg.substeps_per_frame * frame_dt
            if sched is not None:
                u_app, phase = sense_act_gate(t_sub, sched, proposal.u)
            else:
                u_app, phase = proposal.u, None
            state = step(state, ControlCommand(u_app, proposal.v), h)
            t_next = (idx + 1) / cfg.substeps_per_frame * frame_dt
            if len(world.walls) and point_segments_min_distance(
                    (state.x, state.y), world.wall_a, world.wall_b) <= cfg.footprint_radius:
                log.collided = True
                log.events.append({"type": "collision", "t": float(t_next),
                                   "x": float(state.x), "y": float(state.y)})
                log_tick(t_next, state, u_app, phase)
                return _finalize(log, world, drop_totals)
            log_tick(t_next, state, u_app, phase)

        # perception at the new frame
        t_frame = (k + 1) * frame_dt
        cur_points = project(state, cam, world)
        raw_tracks = make_tracks(prev_points, cur_points, cam, rng)
        new_ages = {}
        tracks = []
        for tr in raw_tracks:
            age = ages.get(tr.feature_id, 1) + 1
            new_ages[tr.feature_id] = age
            tracks.append(with_age(tr, age))
        for p in cur_points:
            new_ages.setdefault(p.feature_id, 1)
        ages = new_ages
        prev_points = cur_points

        trusted = interval_in_sense(t_frame - frame_dt, t_frame, sched)
        samples, drops = samples_from_tracks(tracks, cam, roi)
        drop_totals["slow_flow"] += drops.slow_flow
        drop_totals["contracting"] += drops.contracting
        drop_totals["tau_overflow"] += drops.tau_overflow
        drop_totals["tracked"] += len(tracks)
        summary = aggregate_rois(samples, roi, t_frame)

        mode_raw = None
        if trusted and cfg.controller == "auto":
            history.append(summary)
            smoothed = smoother.push(summary)
            if len(history) >= 2:
                mode_raw = detect_scene_mode(history, cfg.detection)
                before = tracker.mode
                now = tracker.update(mode_raw, summary, t_frame)
                if now is not before:
                    log.events.append({"type": "mode_switch", "t": float(t_frame),
                                       "from": before.value, "to": now.value})
            if (k + 1) % cfg.control_frames == 0:
                proposal = select_controller(tracker.mode, smoothed, gains,
                                             cfg.maneuver, cruise_v)
        last_summary = summary
        log.frames.append(FrameRecord(k + 1, float(t_frame), trusted,
                                      tuple(samples), summary, drops,
                                      mode_raw, tracker.mode))

    return _finalize(log, world, drop_totals)


def _finalize(log: EpisodeLog, world: World, drop_totals: dict) -> EpisodeLog:
    log.metrics = metrics(log, world)
    tracked = max(1, drop_totals["tracked"])
    log.metrics["drop_rates"] = {
        key: drop_totals[key] / tracked
        for key in ("slow_flow", "contracting", "tau_overflow")
    }
    return log


def metrics(log: EpisodeLog, world: World, band: float = 0.05,
            deadband: float = 0.02, rest_window: float = 5.0) -> dict:
    """Summary metrics of an episode log.

    convergence_time is the first t after which |offset| stays inside the
    band; offset_crossings counts sign changes of (offset - rest) outside a
    deadband, with rest taken as the mean offset over the final seconds
    (zero crossings = no overshoot about the settled value).
    """
    if not log.ticks:
        raise ValueError("empty episode log")
    ts = np.array([row[0] for row in log.ticks])
    us = np.array([row[5] for row in log.ticks])
    out: dict = {
        "duration": float(ts[-1]),
        "collision": bool(log.collided),
        "mode_switches": sum(1 for e in log.events if e["type"] == "mode_switch"),
        "mean_abs_u": float(np.mean(np.abs(us))),
        "rms_offset": None,
        "max_abs_offset": None,
        "convergence_time": None,
        "offset_crossings": None,
        "rest_offset": None,
        "progress": None,
    }
    if world.centerline is None:
        return out
    offsets = np.array([row[13] for row in log.ticks], dtype=float)
    out["rms_offset"] = float(np.sqrt(np.mean(offsets ** 2)))
    out["max_abs_offset"] = float(np.max(np.abs(offsets)))
    final = log.ticks[-1]
    out["progress"] = float(centerline_progress(world, (final[1], final[2])))

    if not log.collided:
        inside = np.abs(offsets) < band
        conv = None
        for i in range(len(inside)):
            if inside[i:].all():
                conv = float(ts[i])
                break
        out["convergence_time"] = conv

    rest_mask = ts >= ts[-1] - rest_window
    rest = float(np.mean(offsets[rest_mask]))
    out["rest_offset"] = rest
    dev = offsets - rest
    sign = 0
    crossings = 0
    for d in dev:
        if abs(d) <= deadband:
            continue
        s = 1 if d > 0 else -1
        if sign != 0 and s != sign:
            crossings += 1
        sign = s
    out["offset_crossings"] = crossings
    return out


class TauTraceConfig(BaseModel):
    """Three single-feature maneuvers, run continuously and sense-act gated."""

    model_config = {"frozen": True}

    world: str = "fixture:single_feature"
    initial: InitialState = InitialState(x=0.0, y=0.0, theta=math.pi / 2.0, v=0.5)
    camera: CameraConfig = CameraConfig(pixel_noise_sigma=0.05)
    roi: RoiConfig = RoiConfig()
    schedule: SenseActSchedule = SenseActSchedule()
    turn_rate: float = Field(default=0.15, gt=0)
    duration: float = Field(default=6.0, gt=0)
    substeps_per_frame: int = Field(default=3, ge=1)
    seed: int = Field(default=0, ge=0)


@dataclass(frozen=True)
class TauTracePoint:
    t: float
    tau_geom: float
    tau_per: float | None
    phase: str        # "sense" | "act" | "" (continuous)
    trusted: bool


@dataclass
class TauTraceResult:
    config: TauTraceConfig
    series: dict          # (maneuver, variant) -> list[TauTracePoint]
    summary: dict

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(TAU_TRACE_CSV_COLUMNS) + "\n")
        for (maneuver, variant), points in self.series.items():
            for p in points:
                row = (p.t, p.tau_geom, p.tau_per, p.phase, variant, maneuver)
                out.write(",".join(_cell(v) for v in row) + "\n")
        return out.getvalue()


MANEUVERS = ("straight", "turn_away", "turn_toward")
VARIANTS = ("continuous", "sense_act")


def tau_trace_experiment(cfg: TauTraceConfig | None = None,
                         base_dir: Path | None = None) -> TauTraceResult:
    """Log geometric vs perceived tau for a single left-wall feature while
    moving straight, turning away from it, and turning toward it, each with
    and without sense-act interleaving; identical noise seeds throughout."""
    cfg = cfg or TauTraceConfig()
    world = load_world(resolve_world_path(cfg.world, base_dir))
    if len(world.features) != 1:
        raise ValueError("tau-trace experiment needs a single-feature world")
    feature = world.features[0]
    cam = cfg.camera
    frame_dt = cam.frame_dt
    h = frame_dt / cfg.substeps_per_frame
    n_frames = int(round(cfg.duration * cam.frame_rate))
    u_for = {"straight": 0.0, "turn_away": -cfg.turn_rate, "turn_toward": cfg.turn_rate}

    series: dict = {}
    summary_rows = []
    for maneuver in MANEUVERS:
        for variant in VARIANTS:
            sched = cfg.schedule if variant == "sense_act" else None
            rng = np.random.default_rng(cfg.seed)
            state = VehicleState(cfg.initial.x, cfg.initial.y,
                                 cfg.initial.theta, cfg.initial.v)
            prev = project(state, cam, world)
            points: list[TauTracePoint] = []
            for k in range(n_frames):
                for j in range(cfg.substeps_per_frame):
                    t_sub = (k * cfg.substeps_per_frame + j) * h
                    u_cmd = u_for[maneuver]
                    if sched is not None:
                        u_cmd, _ = sense_act_gate(t_sub, sched, u_cmd)
                    state = step(state, ControlCommand(u_cmd, cfg.initial.v), h)
                t = (k + 1) * frame_dt
                cur = project(state, cam, world)
                tracks = make_tracks(prev, cur, cam, rng)
                prev = cur
                tau_per = None
                if tracks:
                    tr = tracks[0]
                    speed = math.hypot(tr.vel_u, tr.vel_v)
                    if speed > cfg.roi.velocity_floor:
                        tau_per = math.hypot(tr.u_px, tr.v_px) / speed
                trusted = interval_in_sense(t - frame_dt, t, sched)
                phase = phase_of(t, sched).value if sched is not None else ""
                points.append(TauTracePoint(t, geometric_tau(state, feature),
                                            tau_per, phase, trusted))
            series[(maneuver, variant)] = points
            use = [p for p in points
                   if p.tau_per is not None and (variant == "continuous" or p.trusted)]
            errs = np.array([p.tau_per - p.tau_geom for p in use])
            rms = float(np.sqrt(np.mean(errs ** 2))) if len(errs) else None
            summary_rows.append({"maneuver": maneuver, "variant": variant,
                                 "rms": rms, "n_samples": len(use)})

    ratios = {}
    for maneuver in MANEUVERS:
        rms_by = {r["variant"]: r["rms"] for r in summary_rows
                  if r["maneuver"] == maneuver}
        if rms_by.get("continuous") and rms_by.get("sense_act") is not None:
            ratios[maneuver] = rms_by["sense_act"] / rms_by["continuous"]
    return TauTraceResult(cfg, series, {"series": summary_rows, "rms_ratio": ratios})


def expand_seeds(manifest: dict) -> list[int]:
    """Seed list from a sweep manifest: explicit `seeds`, or `seed_base` +
    `n_seeds` expanded as base + index."""
    if manifest.get("seeds"):
        return [int(s) for s in manifest["seeds"]]
    base = int(manifest.get("seed_base", 0))
    n = int(manifest.get("n_seeds", 0))
    return [base + i for i in range(n)]


def run_sweep(base: EpisodeConfig, grid: dict[str, list], seeds: list[int],
              base_dir: Path | None = None, max_workers: int | None = None) -> list[dict]:
    """Run a gain grid x seed list of episodes concurrently.

    One metrics row per (grid point, seed); failures are recorded per-row
    rather than aborting the sweep. Deterministic for a given manifest.
    """
    if not grid or any(not values for values in grid.values()):
        raise ValueError("sweep grid must list at least one value per parameter")
    if not seeds:
        raise ValueError("sweep needs at least one seed")
    allowed = set(GainConfig.model_fields)
    unknown = set(grid) - allowed
    if unknown:
        raise ValueError(f"unknown gain parameters in grid: {sorted(unknown)}")

    world = load_world(resolve_world_path(base.world, base_dir))
    names = sorted(grid)
    jobs = []
    for combo in itertools.product(*(grid[n] for n in names)):
        update = dict(zip(names, (float(v) for v in combo)))
        for seed in seeds:
            cfg = base.model_copy(update={
                "gains": base.gains.model_copy(update=update),
                "seed": int(seed),
            })
            jobs.append((update, int(seed), cfg))

    def _one(job):
        update, seed, cfg = job
        row = {**{n: update[n] for n in names}, "seed": seed}
        try:
            log = run_episode(cfg, world=world)
            row.update({k: v for k, v in log.metrics.items() if k != "drop_rates"})
            row["status"] = "ok"
        except Exception as exc:  # noqa: BLE001 - recorded per-row by contract
            row["status"] = f"error: {exc}"
        return row

    workers = max_workers or min(8, len(jobs))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one, jobs))
