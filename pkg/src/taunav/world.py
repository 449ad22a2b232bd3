"""Environment geometry: wall segments, feature points, visibility queries.

Worlds are loaded from JSON files (see `load_world`) and are immutable after
load, so one World can back any number of concurrent episodes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import (
    point_segment_distance,
    project_onto_polyline,
    segment_intersects_any,
)

FEATURE_WALL_TOLERANCE = 0.01  # m; features must sit on their host wall


class WorldError(ValueError):
    """Raised for malformed world files or invariant violations."""


@dataclass(frozen=True)
class FeaturePoint:
    """A trackable point in the environment (global frame, meters)."""

    id: int
    position: np.ndarray            # shape (2,)
    wall: int | None = None         # index of the host wall, None = free-standing
    height: float = 0.0             # m above camera height


@dataclass(frozen=True)
class WallSegment:
    """An opaque wall between two distinct endpoints (meters)."""

    p1: np.ndarray
    p2: np.ndarray


@dataclass(frozen=True)
class World:
    walls: tuple[WallSegment, ...]
    features: tuple[FeaturePoint, ...]
    corridor_half_width: float = 0.0
    centerline: np.ndarray | None = None   # (K,2) polyline or None
    # Dense copies for vectorized queries, derived in __post_init__.
    wall_a: np.ndarray = field(init=False, repr=False)
    wall_b: np.ndarray = field(init=False, repr=False)
    feature_xy: np.ndarray = field(init=False, repr=False)
    feature_ids: np.ndarray = field(init=False, repr=False)
    feature_walls: np.ndarray = field(init=False, repr=False)   # -1 = free-standing
    feature_heights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        wa = np.array([w.p1 for w in self.walls], dtype=float).reshape(-1, 2)
        wb = np.array([w.p2 for w in self.walls], dtype=float).reshape(-1, 2)
        fxy = np.array([f.position for f in self.features], dtype=float).reshape(-1, 2)
        fids = np.array([f.id for f in self.features], dtype=int)
        fwall = np.array([-1 if f.wall is None else f.wall for f in self.features], dtype=int)
        fh = np.array([f.height for f in self.features], dtype=float)
        for name, value in (("wall_a", wa), ("wall_b", wb), ("feature_xy", fxy),
                            ("feature_ids", fids), ("feature_walls", fwall),
                            ("feature_heights", fh)):
            object.__setattr__(self, name, value)

    @property
    def centerline_length(self) -> float:
        if self.centerline is None:
            return 0.0
        return float(np.hypot(*np.diff(self.centerline, axis=0).T).sum())


def _require(cond: bool, msg: str):
    if not cond:
        raise WorldError(msg)


def world_from_dict(data: dict, source: str = "<dict>") -> World:
    """Build a World from parsed JSON, checking every invariant."""
    if not isinstance(data, dict):
        raise WorldError(f"{source}: top level must be an object")

    walls: list[WallSegment] = []
    for i, seg in enumerate(data.get("walls", [])):
        try:
            (x1, y1), (x2, y2) = seg
        except (TypeError, ValueError):
            raise WorldError(f"{source}: walls[{i}] must be [[x1,y1],[x2,y2]]") from None
        p1 = np.array([float(x1), float(y1)])
        p2 = np.array([float(x2), float(y2)])
        _require(np.isfinite(p1).all() and np.isfinite(p2).all(),
                 f"{source}: walls[{i}] has non-finite coordinates")
        _require(float(np.hypot(*(p2 - p1))) > 0.0,
                 f"{source}: walls[{i}] is zero-length")
        walls.append(WallSegment(p1, p2))

    features: list[FeaturePoint] = []
    seen_ids: set[int] = set()
    for i, item in enumerate(data.get("features", [])):
        if not isinstance(item, dict) or "id" not in item or "pos" not in item:
            raise WorldError(f"{source}: features[{i}] must be an object with id and pos")
        fid = int(item["id"])
        _require(fid not in seen_ids, f"{source}: features[{i}]: duplicate id {fid}")
        seen_ids.add(fid)
        pos = np.array([float(c) for c in item["pos"]], dtype=float)
        _require(pos.shape == (2,) and np.isfinite(pos).all(),
                 f"{source}: features[{i}].pos must be a finite [x, y]")
        wall = item.get("wall")
        if wall is not None:
            wall = int(wall)
            _require(0 <= wall < len(walls),
                     f"{source}: features[{i}].wall {wall} is not a wall index")
            d = point_segment_distance(pos, walls[wall].p1, walls[wall].p2)
            _require(d <= FEATURE_WALL_TOLERANCE,
                     f"{source}: features[{i}] lies {d:.4f} m off its host wall "
                     f"(limit {FEATURE_WALL_TOLERANCE} m)")
        height = float(item.get("height", 0.0))
        _require(math.isfinite(height), f"{source}: features[{i}].height must be finite")
        features.append(FeaturePoint(fid, pos, wall, height))

    half_width = float(data.get("corridor_half_width", 0.0))
    _require(half_width >= 0.0, f"{source}: corridor_half_width must be >= 0")

    centerline = None
    if data.get("centerline") is not None:
        pts = np.array(data["centerline"], dtype=float)
        _require(pts.ndim == 2 and pts.shape[1] == 2 and len(pts) >= 2,
                 f"{source}: centerline must be a list of at least two [x, y] points")
        _require(np.isfinite(pts).all(), f"{source}: centerline has non-finite points")
        _require(half_width > 0.0,
                 f"{source}: corridor_half_width must be > 0 when a centerline is present")
        centerline = pts

    return World(tuple(walls), tuple(features), half_width, centerline)


def load_world(path: str | Path) -> World:
    """Load and validate a world file. Deterministic for a given file."""
    path = Path(path)
    if not path.exists():
        raise WorldError(f"world file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise WorldError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return world_from_dict(data, source=str(path))


def line_of_sight(world: World, a, b, ignore_wall: int | None = None) -> bool:
    """True iff the open segment a-b crosses no wall.

    `ignore_wall` exempts a feature's host wall so that points lying on a
    wall are visible from in front of it despite float round-off.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise WorldError("line_of_sight requires finite points")
    if len(world.walls) == 0:
        return True
    return not segment_intersects_any(a, b, world.wall_a, world.wall_b, skip=ignore_wall)


def visible_features(world: World, origin) -> np.ndarray:
    """Boolean mask over world.features: line of sight from `origin`,
    exempting each feature's own host wall. Vectorized over features x walls.
    """
    origin = np.asarray(origin, dtype=float)
    n = len(world.features)
    mask = np.ones(n, dtype=bool)
    if len(world.walls) == 0 or n == 0:
        return mask
    eps = 1e-12
    d = world.feature_xy - origin                    # (N,2) sight directions
    e = world.wall_b - world.wall_a                  # (M,2)
    r = world.wall_a - origin                        # (M,2)
    denom = d[:, 0, None] * e[None, :, 1] - d[:, 1, None] * e[None, :, 0]  # (N,M)
    t_num = (r[:, 0] * e[:, 1] - r[:, 1] * e[:, 0])[None, :]
    s_num = r[None, :, 0] * d[:, 1, None] - r[None, :, 1] * d[:, 0, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = t_num / denom
        s = s_num / denom
    hit = ((np.abs(denom) >= eps)
           & (t > eps) & (t < 1.0 - eps)
           & (s >= -eps) & (s <= 1.0 + eps))
    hosted = world.feature_walls >= 0
    if hosted.any():
        idx = np.nonzero(hosted)[0]
        hit[idx, world.feature_walls[idx]] = False
    return ~hit.any(axis=1)


def centerline_offset(world: World, position) -> float:
    """Signed perpendicular distance to the centerline.

    Positive to the left of the polyline's travel direction.
    """
    if world.centerline is None:
        raise WorldError("world has no centerline")
    offset, _ = project_onto_polyline(position, world.centerline)
    return offset


def centerline_progress(world: World, position) -> float:
    """Arc length along the centerline of the projected position (meters)."""
    if world.centerline is None:
        raise WorldError("world has no centerline")
    _, arc = project_onto_polyline(position, world.centerline)
    return arc
