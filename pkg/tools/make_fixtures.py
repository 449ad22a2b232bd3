#!/usr/bin/env python3
"""Regenerate the shipped world fixtures (deterministic)."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "taunav" / "fixtures"
HEIGHT_SPAN = 0.5  # m, features uniform in +-HEIGHT_SPAN about camera height


def wall_features(walls, spacing, rng, start_id=0, heights=True):
    """Features along each wall at `spacing`, inset half a step from the ends."""
    feats = []
    fid = start_id
    for wi, ((x1, y1), (x2, y2)) in enumerate(walls):
        length = math.hypot(x2 - x1, y2 - y1)
        n = max(1, int(math.floor(length / spacing)))
        for i in range(n):
            s = (i + 0.5) * spacing
            if s >= length:
                break
            fx = x1 + (x2 - x1) * s / length
            fy = y1 + (y2 - y1) * s / length
            h = float(rng.uniform(-HEIGHT_SPAN, HEIGHT_SPAN)) if heights else 0.0
            feats.append({"id": fid, "pos": [round(fx, 6), round(fy, 6)],
                          "wall": wi, "height": round(h, 4)})
            fid += 1
    return feats


def write(name, walls, features, half_width, centerline, meta):
    data = {
        "walls": walls,
        "features": features,
        "corridor_half_width": half_width,
        "centerline": centerline,
        "meta": meta,
    }
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(data, indent=1) + "\n")
    print(f"{name}: {len(walls)} walls, {len(features)} features -> {path}")


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    # straight corridor, R = 2 m, 20 m long, 40 features per wall
    rng = np.random.default_rng(101)
    walls = [[[-2, 0], [-2, 20]], [[2, 0], [2, 20]]]
    write("straight_corridor", walls,
          wall_features(walls, 0.5, rng),
          2.0, [[0, 0], [0, 20]],
          {"feature_spacing_m": 0.5, "feature_height_span_m": HEIGHT_SPAN,
           "rng_seed": 101})

    # long straight corridor for multi-ten-second convergence runs; denser
    # features keep the outer bands populated when the vehicle crowds a wall
    rng = np.random.default_rng(102)
    walls = [[[-2, 0], [-2, 60]], [[2, 0], [2, 60]]]
    write("straight_corridor_long", walls,
          wall_features(walls, 0.25, rng),
          2.0, [[0, 0], [0, 60]],
          {"feature_spacing_m": 0.25, "feature_height_span_m": HEIGHT_SPAN,
           "rng_seed": 102})

    # L corridor: 90-degree left turn
    rng = np.random.default_rng(103)
    walls = [
        [[-2, 0], [-2, 6]],      # first-leg left wall (ends at the opening)
        [[2, 0], [2, 10]],       # first-leg right wall, runs to the outer corner
        [[-2, 6], [-14, 6]],     # second-leg inner wall
        [[2, 10], [-14, 10]],    # second-leg outer wall (the wall seen ahead)
        [[-2, 0], [2, 0]],       # entry cap
        [[-14, 6], [-14, 10]],   # far cap
    ]
    write("l_corridor", walls,
          wall_features(walls, 0.25, rng),
          2.0, [[0, 0], [0, 8], [-14, 8]],
          {"feature_spacing_m": 0.25, "feature_height_span_m": HEIGHT_SPAN,
           "rng_seed": 103})

    # U corridor: two left turns
    rng = np.random.default_rng(104)
    walls = [
        [[-2, 0], [-2, 4]],      # leg-A left
        [[2, 0], [2, 8]],        # leg-A right to outer corner 1
        [[-2, 4], [-8, 4]],      # leg-B inner
        [[2, 8], [-12, 8]],      # leg-B outer to outer corner 2
        [[-8, 4], [-8, 0]],      # leg-C inner
        [[-12, 8], [-12, 0]],    # leg-C outer
        [[-2, 0], [2, 0]],       # entry cap
        [[-12, 0], [-8, 0]],     # exit cap
    ]
    write("u_corridor", walls,
          wall_features(walls, 0.25, rng),
          2.0, [[0, 0], [0, 6], [-10, 6], [-10, 0]],
          {"feature_spacing_m": 0.25, "feature_height_span_m": HEIGHT_SPAN,
           "rng_seed": 104})

    # single featured wall on the left, long enough for slow oscillations
    rng = np.random.default_rng(105)
    walls = [[[-2, -2], [-2, 70]]]
    write("single_wall", walls,
          wall_features(walls, 0.25, rng),
          2.0, [[0, 0], [0, 68]],
          {"feature_spacing_m": 0.25, "feature_height_span_m": HEIGHT_SPAN,
           "rng_seed": 105})

    # one feature on a left wall (tau-trace experiment)
    walls = [[[-2, -2], [-2, 20]]]
    write("single_feature", walls,
          [{"id": 0, "pos": [-2, 5], "wall": 0, "height": 0.0}],
          0.0, None,
          {"note": "single feature for tau trace maneuvers"})


if __name__ == "__main__":
    main()
