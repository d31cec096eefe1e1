"""Right-Radau-Legendre quadrature on [0, 1] and cell-average initialization."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import legendre as L

SUPPORTED_R = (2, 3, 4)

# High-precision reference values; nodes on [0, 1], last node fixed at 1.
_REFERENCE = {
    2: ([1.0 / 3.0, 1.0], [0.75, 0.25]),
    3: (
        [(4.0 - 6.0**0.5) / 10.0, (4.0 + 6.0**0.5) / 10.0, 1.0],
        [(16.0 - 6.0**0.5) / 36.0, (16.0 + 6.0**0.5) / 36.0, 1.0 / 9.0],
    ),
    4: (
        [0.088587959512703947395546998876, 0.409466864440734710578039693251,
         0.787659461760847001190598683802, 1.0],
        [0.220462211176767561064291811746, 0.388193468843171512215804486862,
         0.328844319980060926719903701392, 0.0625],
    ),
}


@dataclass(frozen=True)
class QuadratureRule:
    """R-point rule on [0, 1] with ``nodes[-1] == 1``; weights sum to one."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def R(self) -> int:
        return len(self.nodes)

    @property
    def gamma_R(self) -> float:
        """Weight of the node at the right endpoint."""
        return float(self.weights[-1])

    @property
    def exactness(self) -> int:
        return 2 * self.R - 2


def _radau_right(R: int):
    # right-Radau on [-1, 1]: roots of P_{R-1} - P_R (contains x = 1)
    c = np.zeros(R + 1)
    c[R - 1], c[R] = 1.0, -1.0
    x = np.sort(np.real(L.legroots(c)))
    x[-1] = 1.0
    pr1 = np.zeros(R)
    pr1[R - 1] = 1.0
    for _ in range(3):  # Newton polish of interior roots
        f = L.legval(x[:-1], c)
        df = L.legval(x[:-1], L.legder(c))
        x[:-1] -= f / df
    w = (1.0 + x) / (R**2 * L.legval(x, pr1) ** 2)
    w[-1] = 2.0 / R**2
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def radau_rule(R: int) -> QuadratureRule:
    """Right-Radau rule with ``R`` nodes, exact up to degree 2R-2."""
    if R not in SUPPORTED_R:
        raise ValueError(f"unsupported Radau rule size R={R}; expected one of {SUPPORTED_R}")
    nodes, weights = _radau_right(R)
    ref_nodes, ref_weights = _REFERENCE[R]
    if np.abs(nodes - ref_nodes).max() > 1e-14 or np.abs(weights - ref_weights).max() > 1e-14:
        raise RuntimeError(f"Radau rule R={R} disagrees with reference constants")
    # reference constants are the better-rounded representation
    nodes = np.array(ref_nodes, dtype=float)
    weights = np.array(ref_weights, dtype=float)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights)


def integrate_on_subinterval(rule: QuadratureRule, f: Callable, a: float, b: float) -> float:
    """Apply ``rule`` to ``f`` on [a, b]."""
    if a > b:
        raise ValueError(f"invalid interval [{a}, {b}]")
    x = a + (b - a) * rule.nodes
    return float((b - a) * np.dot(rule.weights, f(x)))


def initial_cell_averages(rho0: Callable, grid, rule: QuadratureRule) -> np.ndarray:
    """Cell averages of ``rho0`` on ``grid`` by the rule applied in each cell.

    ``rho0`` must accept numpy arrays.
    """
    if grid.h <= 0 or grid.n_cells < 1:
        raise ValueError("grid needs h > 0 and at least one cell")
    left = grid.x0 + grid.h * np.arange(grid.n_cells)
    pts = left[:, None] + grid.h * rule.nodes[None, :]
    vals = np.asarray(rho0(pts), dtype=float)
    vals = np.broadcast_to(vals, pts.shape)
    return vals @ rule.weights
