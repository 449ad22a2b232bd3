"""Linearized stability analysis of the steering laws.

The 2x2 linearization matrices are taken as ground truth; `eig2` is the
numeric oracle. Closed-form eigenvalue expressions are checked against it,
and the balancing-law closed form is kept only as a diagnostic because its
discriminant matches the matrix solely in the equal-band-slope case
(f_f == f_m); disagreement is reported, never silently corrected.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

EIG_ORACLE_TOL = 1e-9


@dataclass(frozen=True)
class Linearization:
    """Coefficient matrix of the (dx, dtheta) subsystem about a rest point."""

    matrix: np.ndarray                  # (2, 2) real
    rest_point: tuple[float, float]     # (x, theta)
    params: dict


def _require_positive(**params: float):
    for name, value in params.items():
        if not (math.isfinite(value) and value > 0.0):
            raise ValueError(f"{name} must be finite and > 0")


def tau_balance_linearization(k_f: float, k_m: float, f_f: float, f_m: float,
                              R: float) -> Linearization:
    """Balancing-law linearization about (x, theta) = (0, pi/2).

    Rows: [0, -1] and [2(f_f k_f + f_m k_m),
    -2(k_f f_f^2 + k_m f_m^2 + k_f R f_f^2 + k_m R f_m^2)].
    """
    _require_positive(k_f=k_f, k_m=k_m, f_f=f_f, f_m=f_m)
    if not (math.isfinite(R) and R >= 0.0):
        raise ValueError("R must be finite and >= 0")
    a21 = 2.0 * (f_f * k_f + f_m * k_m)
    a22 = -2.0 * (k_f * f_f ** 2 + k_m * f_m ** 2
                  + k_f * R * f_f ** 2 + k_m * R * f_m ** 2)
    m = np.array([[0.0, -1.0], [a21, a22]])
    return Linearization(m, (0.0, math.pi / 2.0),
                         dict(k_f=k_f, k_m=k_m, f_f=f_f, f_m=f_m, R=R))


def single_wall_rest_point(k: float, f: float, c: float, R: float = 0.0,
                           side: str = "left") -> tuple[float, float]:
    """Rest point (x, theta) = (+-(c - f R - f)/f, pi/2) of the single-wall law."""
    _require_positive(k=k, f=f, c=c)
    sign = 1.0 if side == "left" else -1.0
    return (sign * (c - f * R - f) / f, math.pi / 2.0)


def single_wall_linearization(k: float, f: float, c: float, R: float = 0.0,
                              side: str = "left") -> Linearization:
    """Single-wall linearization [[0, -1], [f k, -k f c]] about its rest point.

    R enters the rest point only, not the matrix.
    """
    _require_positive(k=k, f=f, c=c)
    m = np.array([[0.0, -1.0], [f * k, -k * f * c]])
    return Linearization(m, single_wall_rest_point(k, f, c, R, side),
                         dict(k=k, f=f, c=c, R=R, side=side))


def eig2(matrix) -> tuple[complex, complex]:
    """Eigenvalues of a real 2x2 matrix via the quadratic formula.

    Uses the numerically stable root arrangement and orders the pair by
    (real part, imaginary part).
    """
    m = np.asarray(matrix, dtype=float)
    if m.shape != (2, 2) or not np.isfinite(m).all():
        raise ValueError("eig2 needs a finite 2x2 matrix")
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        root = math.sqrt(disc)
        # avoid cancellation: compute the larger-magnitude root first
        if tr >= 0.0:
            l1 = (tr + root) / 2.0
        else:
            l1 = (tr - root) / 2.0
        l2 = det / l1 if l1 != 0.0 else (tr - l1)
        pair = (complex(l1), complex(l2))
    else:
        root = math.sqrt(-disc)
        pair = (complex(tr / 2.0, root / 2.0), complex(tr / 2.0, -root / 2.0))
    return tuple(sorted(pair, key=lambda z: (z.real, z.imag)))


def single_wall_eigs_closed_form(k: float, f: float, c: float) -> tuple[complex, complex]:
    """lambda = -k f c / 2 +- sqrt(k f (k f c^2 - 4)) / 2; complex when
    k f c^2 < 4."""
    _require_positive(k=k, f=f, c=c)
    radicand = complex(k * f * (k * f * c * c - 4.0))
    root = cmath.sqrt(radicand)
    pair = ((-k * f * c + root) / 2.0, (-k * f * c - root) / 2.0)
    return tuple(sorted(pair, key=lambda z: (z.real, z.imag)))


def tau_balance_eigs_closed_form(k_f: float, k_m: float, f_f: float, f_m: float,
                                 R: float) -> tuple[complex, complex]:
    """Closed-form eigenvalue candidate for the balancing linearization.

    lambda = -(f_f^2 k_f + f_m^2 k_f)(1+R)
             +- sqrt((f_f k_f + f_m k_m)[(f_f^3 k_f + f_m^3 k_m)(1+R)^2 - 2])

    Diagnostic only: both the repeated k_f in the first term and the
    discriminant differ from the matrix characteristic polynomial except
    when f_f == f_m, so eig2 of the printed matrix stays authoritative.
    """
    _require_positive(k_f=k_f, k_m=k_m, f_f=f_f, f_m=f_m)
    lead = -(f_f ** 2 * k_f + f_m ** 2 * k_f) * (1.0 + R)
    radicand = complex((f_f * k_f + f_m * k_m)
                       * ((f_f ** 3 * k_f + f_m ** 3 * k_m) * (1.0 + R) ** 2 - 2.0))
    root = cmath.sqrt(radicand)
    pair = (lead + root, lead - root)
    return tuple(sorted(pair, key=lambda z: (z.real, z.imag)))


def tau_balance_real_eig_condition(k_f: float, k_m: float, f_f: float, f_m: float,
                                   R: float) -> bool:
    """(f_f^3 k_f + f_m^3 k_m) > 2/(1+R)^2: the closed-form no-oscillation
    condition for the balancing law, evaluated verbatim."""
    _require_positive(k_f=k_f, k_m=k_m, f_f=f_f, f_m=f_m)
    return (f_f ** 3 * k_f + f_m ** 3 * k_m) > 2.0 / (1.0 + R) ** 2


def single_wall_real_eig_condition(k: float, f: float, c: float) -> bool:
    """k >= 4/(f c^2): below this the single-wall eigenvalues are a complex
    pair and the approach to the rest point oscillates."""
    _require_positive(k=k, f=f, c=c)
    return k * f * c * c >= 4.0


def matrix_real_eigs(lin: Linearization, tol: float = 0.0) -> bool:
    """Companion diagnostic: does the matrix itself have real eigenvalues?"""
    l1, l2 = eig2(lin.matrix)
    return abs(l1.imag) <= tol and abs(l2.imag) <= tol


def is_hurwitz(matrix) -> bool:
    """Both eigenvalue real parts < 0 (local asymptotic stability)."""
    l1, l2 = eig2(matrix)
    return l1.real < 0.0 and l2.real < 0.0


def eigs_agree(a: tuple[complex, complex], b: tuple[complex, complex],
               tol: float = EIG_ORACLE_TOL) -> bool:
    return abs(a[0] - b[0]) <= tol and abs(a[1] - b[1]) <= tol


def stability_rows(single_wall_grid: dict | None = None,
                   tau_balance_grid: dict | None = None) -> list[dict]:
    """Evaluate parameter grids into table rows (the CSV/service payload).

    Grids are dicts of parameter lists; the cartesian product is taken.
    Columns: law, k_f, k_m, k, f_f, f_m, f, c, R, re1, im1, re2, im2,
    hurwitz, real_eigs, analytic_condition, oracle_agrees.
    """
    rows: list[dict] = []

    def _product(grid: dict, names: tuple[str, ...]):
        missing = [n for n in names if n not in grid or not grid[n]]
        if missing:
            raise ValueError(f"grid missing parameter lists: {', '.join(missing)}")
        import itertools
        for combo in itertools.product(*(grid[n] for n in names)):
            yield dict(zip(names, (float(v) for v in combo)))

    if single_wall_grid is not None:
        for p in _product(single_wall_grid, ("k", "f", "c")):
            lin = single_wall_linearization(p["k"], p["f"], p["c"],
                                            R=float(single_wall_grid.get("R", 0.0) or 0.0))
            oracle = eig2(lin.matrix)
            closed = single_wall_eigs_closed_form(p["k"], p["f"], p["c"])
            rows.append({
                "law": "single_wall", "k_f": None, "k_m": None, "k": p["k"],
                "f_f": None, "f_m": None, "f": p["f"], "c": p["c"],
                "R": lin.params["R"],
                "re1": oracle[0].real, "im1": oracle[0].imag,
                "re2": oracle[1].real, "im2": oracle[1].imag,
                "hurwitz": is_hurwitz(lin.matrix),
                "real_eigs": matrix_real_eigs(lin),
                "analytic_condition": single_wall_real_eig_condition(p["k"], p["f"], p["c"]),
                "oracle_agrees": eigs_agree(oracle, closed),
            })

    if tau_balance_grid is not None:
        for p in _product(tau_balance_grid, ("k_f", "k_m", "f_f", "f_m", "R")):
            lin = tau_balance_linearization(p["k_f"], p["k_m"], p["f_f"], p["f_m"], p["R"])
            oracle = eig2(lin.matrix)
            closed = tau_balance_eigs_closed_form(p["k_f"], p["k_m"], p["f_f"],
                                                  p["f_m"], p["R"])
            rows.append({
                "law": "tau_balance", "k_f": p["k_f"], "k_m": p["k_m"], "k": None,
                "f_f": p["f_f"], "f_m": p["f_m"], "f": None, "c": None, "R": p["R"],
                "re1": oracle[0].real, "im1": oracle[0].imag,
                "re2": oracle[1].real, "im2": oracle[1].imag,
                "hurwitz": is_hurwitz(lin.matrix),
                "real_eigs": matrix_real_eigs(lin),
                "analytic_condition": tau_balance_real_eig_condition(
                    p["k_f"], p["k_m"], p["f_f"], p["f_m"], p["R"]),
                "oracle_agrees": eigs_agree(oracle, closed),
            })

    return rows
