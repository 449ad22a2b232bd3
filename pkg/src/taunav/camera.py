"""Pinhole camera on the vehicle: feature projection and sparse flow tracks.

The camera looks along heading + mount_offset_phi. Image u grows to the
*right* of the optical axis and the frame origin sits on the axis, which is
approximately the focus of expansion for forward motion. Tracks carry a
one-frame backward-difference velocity, the same signal a frame-to-frame
sparse tracker would emit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .vehicle import VehicleState
from .world import World, visible_features


class CameraConfig(BaseModel):
    model_config = {"frozen": True}

    focal_px: float = Field(default=300.0, gt=0)
    width_px: float = Field(default=640.0, gt=0)
    height_px: float = Field(default=480.0, gt=0)
    mount_offset_phi: float = 0.0       # rad, camera axis relative to heading
    frame_rate: float = Field(default=30.0, gt=0)
    # One-frame differencing turns position noise into sigma*sqrt(2)*fps of
    # flow noise, so the default stays at subpixel-tracker scale.
    pixel_noise_sigma: float = Field(default=0.15, ge=0)
    rng_seed: int = Field(default=0, ge=0)

    @property
    def hfov(self) -> float:
        """Horizontal field of view, 2*atan(width/(2*focal))."""
        return 2.0 * math.atan2(self.width_px / 2.0, self.focal_px)

    @property
    def frame_dt(self) -> float:
        return 1.0 / self.frame_rate

    @model_validator(mode="after")
    def _check_fov(self):
        if not 0.0 < self.hfov < math.pi:
            raise ValueError("hfov must be in (0, pi)")
        return self


@dataclass(frozen=True)
class ImagePoint:
    feature_id: int
    u_px: float
    v_px: float


@dataclass(frozen=True)
class Track:
    """A feature matched across two consecutive frames."""

    feature_id: int
    u_px: float
    v_px: float
    vel_u: float    # px/s, backward difference over one frame interval
    vel_v: float
    age: int = 2    # frames the feature has been tracked


def project(state: VehicleState, cam: CameraConfig, world: World) -> list[ImagePoint]:
    """Project every visible feature onto the image plane.

    Visible means: positive depth along the optical axis, inside the image
    bounds, and unoccluded (a feature's host wall never occludes it).
    Output is sorted by feature id so frames are deterministic.
    """
    n = len(world.features)
    if n == 0:
        return []
    axis = state.theta + cam.mount_offset_phi
    ca, sa = math.cos(axis), math.sin(axis)
    rel = world.feature_xy - np.array([state.x, state.y])
    depth = ca * rel[:, 0] + sa * rel[:, 1]          # along optical axis
    right = sa * rel[:, 0] - ca * rel[:, 1]          # to the right of the axis
    ahead = depth > 1e-9
    with np.errstate(divide="ignore", invalid="ignore"):
        u = cam.focal_px * right / depth
        v = cam.focal_px * world.feature_heights / depth
    in_frame = ahead & (np.abs(u) <= cam.width_px / 2.0) & (np.abs(v) <= cam.height_px / 2.0)
    if not in_frame.any():
        return []
    los = visible_features(world, (state.x, state.y))
    keep = np.nonzero(in_frame & los)[0]
    order = keep[np.argsort(world.feature_ids[keep], kind="stable")]
    return [ImagePoint(int(world.feature_ids[i]), float(u[i]), float(v[i])) for i in order]


def make_tracks(prev: list[ImagePoint], cur: list[ImagePoint], cam: CameraConfig,
                rng: np.random.Generator | None = None) -> list[Track]:
    """Match features across two consecutive frames into flow tracks.

    Gaussian pixel noise (sigma = cam.pixel_noise_sigma) is applied to both
    frame endpoints independently; velocity is the noisy backward difference
    over one frame interval. With rng=None a fresh generator is seeded from
    cam.rng_seed, making a single call reproducible; an episode passes its
    own generator instead.
    """
    if rng is None:
        rng = np.random.default_rng(cam.rng_seed)
    prev_by_id = {p.feature_id: p for p in prev}
    dt = cam.frame_dt
    sigma = cam.pixel_noise_sigma
    tracks: list[Track] = []
    for point in cur:
        before = prev_by_id.get(point.feature_id)
        if before is None:
            continue
        pu, pv, cu, cv = before.u_px, before.v_px, point.u_px, point.v_px
        if sigma > 0.0:
            noise = rng.normal(0.0, sigma, size=4)
            pu += noise[0]
            pv += noise[1]
            cu += noise[2]
            cv += noise[3]
        tracks.append(Track(
            feature_id=point.feature_id,
            u_px=cu,
            v_px=cv,
            vel_u=(cu - pu) / dt,
            vel_v=(cv - pv) / dt,
        ))
    return tracks


def with_age(track: Track, age: int) -> Track:
    """Copy of a track with its age counter set (maintained by the episode loop)."""
    if age < 2:
        raise ValueError("track age is at least two frames")
    return replace(track, age=age)
