"""Zhang-Shu linear scaling limiter on the discrete set of used evaluation points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .reconstruction import LocalPolynomial

BOUND_TOL = 1e-12


class BoundViolation(ValueError):
    """A cell average lies outside the admissible bounds before limiting."""


@dataclass(frozen=True)
class BoundPair:
    rho_m: float
    rho_M: float

    def __post_init__(self):
        if self.rho_m > self.rho_M:
            raise ValueError(f"empty bounds [{self.rho_m}, {self.rho_M}]")


def cell_extrema(P: LocalPolynomial, eval_points) -> tuple[float, float]:
    pts = np.asarray(eval_points, float)
    if pts.size == 0:
        raise ValueError("no evaluation points")
    v = P(pts - 0.5)
    return float(v.min()), float(v.max())


def scaling_factor(rho_bar, m, M, bounds: BoundPair):
    """theta in [0, 1], vectorized over cells; a flat side imposes no constraint."""
    rho_bar, m, M = np.broadcast_arrays(*(np.asarray(a, float) for a in (rho_bar, m, M)))
    bad = (rho_bar < bounds.rho_m - BOUND_TOL) | (rho_bar > bounds.rho_M + BOUND_TOL)
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise BoundViolation(
            f"cell average {rho_bar.flat[j]!r} outside [{bounds.rho_m}, {bounds.rho_M}]")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):  # tiny gaps give inf -> theta 1
        up = np.where(M > rho_bar, np.abs((bounds.rho_M - rho_bar) / (M - rho_bar)), np.inf)
        lo = np.where(m < rho_bar, np.abs((bounds.rho_m - rho_bar) / (m - rho_bar)), np.inf)
    return np.clip(np.minimum(np.minimum(up, lo), 1.0), 0.0, 1.0)


def scale(P: LocalPolynomial, rho_bar: float, bounds: BoundPair, extrema) -> tuple[LocalPolynomial, float]:
    m, M = extrema
    theta = float(scaling_factor(rho_bar, m, M, bounds))
    if theta == 1.0:
        return P, theta
    c = theta * np.asarray(P.coeffs, float)
    c[0] += (1.0 - theta) * rho_bar
    return LocalPolynomial(c), theta


def limit_values(values: np.ndarray, rho_bar: np.ndarray, bounds: BoundPair):
    """Limit point values (cells x points) about the cell averages.

    Returns the scaled values and theta per cell.
    """
    theta = scaling_factor(rho_bar, values.min(axis=1), values.max(axis=1), bounds)
    out = rho_bar[:, None] + theta[:, None] * (values - rho_bar[:, None])
    out = np.where(theta[:, None] < 1.0, out, values)
    return out, theta
