"""Small planar-geometry helpers shared by the world, vehicle and simulator."""

from __future__ import annotations

import math

import numpy as np

_EPS = 1e-12


def normalize_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    m = math.fmod(theta + math.pi, 2.0 * math.pi)
    if m <= 0.0:
        m += 2.0 * math.pi
    return m - math.pi


def segments_intersect(p1, p2, q1, q2) -> bool:
    """True if the open segment p1-p2 meets the closed segment q1-q2.

    Openness matters for visibility queries: a sight line whose *endpoint*
    lies exactly on a wall is not blocked by that wall.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)

    d = p2 - p1
    e = q2 - q1
    denom = d[0] * e[1] - d[1] * e[0]
    r = q1 - p1
    if abs(denom) < _EPS:
        # Parallel: blocked only if collinear and overlapping beyond endpoints.
        if abs(r[0] * d[1] - r[1] * d[0]) > _EPS:
            return False
        dd = float(d @ d)
        if dd < _EPS:
            return False
        t1 = float(r @ d) / dd
        t2 = float((q2 - p1) @ d) / dd
        lo, hi = min(t1, t2), max(t1, t2)
        return lo < 1.0 - _EPS and hi > _EPS
    t = (r[0] * e[1] - r[1] * e[0]) / denom  # along p1-p2
    s = (r[0] * d[1] - r[1] * d[0]) / denom  # along q1-q2
    return _EPS < t < 1.0 - _EPS and -_EPS <= s <= 1.0 + _EPS


def segment_intersects_any(p1, p2, seg_a: np.ndarray, seg_b: np.ndarray,
                           skip: int | None = None) -> bool:
    """Vectorized: does the open segment p1-p2 cross any of the segments
    (seg_a[i], seg_b[i])?  `skip` exempts one segment index (host wall)."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    d = p2 - p1
    e = seg_b - seg_a                      # (M,2)
    r = seg_a - p1                         # (M,2)
    denom = d[0] * e[:, 1] - d[1] * e[:, 0]
    cross_rd = r[:, 0] * d[1] - r[:, 1] * d[0]
    safe = np.abs(denom) >= _EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (r[:, 0] * e[:, 1] - r[:, 1] * e[:, 0]) / denom
        s = cross_rd / denom
    hit = safe & (t > _EPS) & (t < 1.0 - _EPS) & (s >= -_EPS) & (s <= 1.0 + _EPS)
    if skip is not None:
        hit[skip] = False
    if hit.any():
        return True
    # Collinear overlap fallback (rare in practice; scalar path is exact).
    par = ~safe & (np.abs(cross_rd) <= _EPS)
    if par.any():
        for i in np.nonzero(par)[0]:
            if skip is not None and i == skip:
                continue
            if segments_intersect(p1, p2, seg_a[i], seg_b[i]):
                return True
    return False


def point_segment_distance(p, a, b) -> float:
    """Distance from point p to the closed segment a-b."""
    p = np.asarray(p, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    denom = float(ab @ ab)
    if denom < _EPS:
        return float(np.hypot(*(p - a)))
    t = float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    proj = a + t * ab
    return float(np.hypot(*(p - proj)))


def point_segments_min_distance(p, seg_a: np.ndarray, seg_b: np.ndarray) -> float:
    """Vectorized min distance from p to a set of closed segments."""
    p = np.asarray(p, dtype=float)
    ab = seg_b - seg_a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom = np.where(denom < _EPS, 1.0, denom)
    t = np.einsum("ij,ij->i", p[None, :] - seg_a, ab) / denom
    t = np.clip(t, 0.0, 1.0)
    proj = seg_a + t[:, None] * ab
    d = np.hypot(p[0] - proj[:, 0], p[1] - proj[:, 1])
    return float(d.min()) if d.size else math.inf


def project_onto_polyline(point, vertices: np.ndarray):
    """Project a point onto a polyline.

    Returns (signed_offset, arc_length) of the nearest polyline point, where
    signed_offset is positive to the left of the polyline's travel direction.
    """
    p = np.asarray(point, dtype=float)
    best = (math.inf, 0.0, 0.0)  # (distance, signed offset, arc length)
    arc0 = 0.0
    for i in range(len(vertices) - 1):
        a = vertices[i]
        b = vertices[i + 1]
        ab = b - a
        seg_len = float(np.hypot(*ab))
        if seg_len < _EPS:
            continue
        t = float((p - a) @ ab) / (seg_len * seg_len)
        t = min(1.0, max(0.0, t))
        proj = a + t * ab
        dist = float(np.hypot(*(p - proj)))
        if dist < best[0] - _EPS:
            # left-of-direction is a positive cross product of (dir, p - proj)
            cross = (ab[0] * (p[1] - proj[1]) - ab[1] * (p[0] - proj[0])) / seg_len
            best = (dist, float(cross), arc0 + t * seg_len)
        arc0 += seg_len
    return best[1], best[2]
