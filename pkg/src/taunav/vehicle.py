"""Unicycle kinematics: xdot = v cos(theta), ydot = v sin(theta), thetadot = u.

`step` integrates with classical RK4 under piecewise-constant (u, v);
`exact_arc` is the closed-form constant-twist solution used as its oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import normalize_angle


@dataclass(frozen=True)
class VehicleState:
    """Planar pose plus forward speed."""

    x: float
    y: float
    theta: float   # rad, normalized to (-pi, pi]
    v: float       # m/s, >= 0

    def __post_init__(self):
        for name in ("x", "y", "theta", "v"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"VehicleState.{name} must be finite")
        if self.v < 0.0:
            raise ValueError("VehicleState.v must be >= 0")
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class ControlCommand:
    """Turning rate (rad/s) and forward speed (m/s)."""

    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError("ControlCommand requires finite u and v")
        if self.v < 0.0:
            raise ValueError("ControlCommand.v must be >= 0")


def _deriv(theta: float, u: float, v: float):
    return v * math.cos(theta), v * math.sin(theta), u


def step(state: VehicleState, cmd: ControlCommand, dt: float) -> VehicleState:
    """One RK4 step with (u, v) held constant over dt."""
    if not (isinstance(dt, (int, float)) and math.isfinite(dt) and dt > 0.0):
        raise ValueError("dt must be finite and > 0")
    u, v = cmd.u, cmd.v
    th = state.theta
    if u == 0.0:
        # constant derivative; bit-identical to the closed-form straight line
        return VehicleState(state.x + v * dt * math.cos(th),
                            state.y + v * dt * math.sin(th), th, v)

    k1 = _deriv(th, u, v)
    k2 = _deriv(th + 0.5 * dt * k1[2], u, v)
    k3 = _deriv(th + 0.5 * dt * k2[2], u, v)
    k4 = _deriv(th + dt * k3[2], u, v)

    x = state.x + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    y = state.y + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    theta = th + dt * u  # thetadot = u exactly
    return VehicleState(x, y, theta, v)


def exact_arc(state: VehicleState, u: float, v: float, dt: float) -> VehicleState:
    """Closed-form solution under constant (u, v); straight segment for u = 0."""
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError("dt must be finite and > 0")
    th0 = state.theta
    th1 = th0 + u * dt
    if u == 0.0:
        x = state.x + v * dt * math.cos(th0)
        y = state.y + v * dt * math.sin(th0)
    else:
        r = v / u
        x = state.x + r * (math.sin(th1) - math.sin(th0))
        y = state.y - r * (math.cos(th1) - math.cos(th0))
    return VehicleState(x, y, th1, v)
