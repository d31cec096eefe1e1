from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``n_cells`` cells of width ``h`` starting at ``x0``.

    ``bc`` is ``"periodic"`` or ``"constant"``; in the latter case ghost cells
    carry ``bc_value``.
    """

    x0: float
    h: float
    n_cells: int
    bc: str = "periodic"
    bc_value: float = 0.0

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("mesh size must be positive")
        if self.n_cells < 1:
            raise ValueError("grid needs at least one cell")
        if self.bc not in ("periodic", "constant"):
            raise ValueError(f"unknown boundary condition {self.bc!r}")

    @classmethod
    def uniform(cls, a: float, b: float, n_cells: int, **kw) -> "Grid":
        return cls(a, (b - a) / n_cells, n_cells, **kw)

    @property
    def length(self) -> float:
        return self.h * self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x0 + (np.arange(self.n_cells) + 0.5) * self.h

    @property
    def edges(self) -> np.ndarray:
        return self.x0 + np.arange(self.n_cells + 1) * self.h
