"""Semi-discrete right-hand side with the Godunov-type non-local flux.

    d/dt rho_j = -(V_{j+1/2} g(rho^-_{j+1/2}) - V_{j-1/2} g(rho^-_{j-1/2})) / h

where rho^- is the right-edge value of the reconstruction in the upstream cell
and V_{j+1/2} = v(convex combination of reconstructed values downstream).
"""
from __future__ import annotations

import numpy as np

from .grid import Grid
from .limiter import BoundPair, limit_values
from .model import KernelSampleTable, NonlocalModel, kernel_samples
from .quadrature import radau_rule
from .reconstruction import PiecewiseReconstruction, ReconstructionParams, reconstruct

__all__ = ["Grid", "ghost_extend", "convolution_velocities", "NonlocalRHS", "rhs", "cfl_step"]


def ghost_extend(avg, grid: Grid, width: int) -> np.ndarray:
    avg = np.asarray(avg, float)
    if len(avg) != grid.n_cells:
        raise ValueError(f"expected {grid.n_cells} averages, got {len(avg)}")
    if width < 0:
        raise ValueError("negative ghost width")
    if grid.bc == "periodic":
        if width > grid.n_cells:
            raise ValueError(f"ghost width {width} exceeds the {grid.n_cells} periodic cells")
        return np.concatenate([avg[grid.n_cells - width:], avg, avg[:width]])
    pad = np.full(width, float(grid.bc_value))
    return np.concatenate([pad, avg, pad])


class _ConvolutionPlan:
    """Evaluation points and per-point correlation kernels for a sample table."""

    def __init__(self, table: KernelSampleTable):
        sets = []
        set_of = []
        for row in table.y:
            key = tuple(row)
            if key not in sets:
                sets.append(key)
            set_of.append(sets.index(key))
        R = table.y.shape[1]
        self.points = np.array(sets, float).ravel()
        self.kmin, self.kmax = table.reach
        L = self.kmax - self.kmin + 1
        kern = np.zeros((len(self.points), L))
        w = table.weights
        for e, (k, s) in enumerate(zip(table.offsets, set_of)):
            kern[s * R:(s + 1) * R, k - self.kmin] += w[e]
        self.kernels = kern
        self.R = R
        # y = 1 is the last node of the first (full-cell) point set
        self.edge = R - 1 if table.y[0, -1] == 1.0 else None

    def apply(self, vals: np.ndarray, start: int, count: int) -> np.ndarray:
        """sum_k sum_p kern[p, k] vals[start + i + (k - kmin), p] for i < count."""
        L = self.kernels.shape[1]
        out = np.zeros(count)
        for p in range(len(self.points)):
            kp = self.kernels[p]
            if not kp.any():
                continue
            out += np.correlate(vals[start:start + count + L - 1, p], kp, "valid")
        return out


def convolution_velocities(rec: PiecewiseReconstruction, table: KernelSampleTable,
                           model: NonlocalModel, j_first: int, count: int) -> np.ndarray:
    """V_{j+1/2} for j = j_first .. j_first+count-1 from reconstruction ``rec``."""
    plan = _ConvolutionPlan(table)
    lo = j_first + 1 + plan.kmin
    hi = j_first + count + plan.kmax
    if lo < rec.first_index or hi > rec.first_index + rec.n_cells - 1:
        raise ValueError("reconstruction does not cover the convolution window")
    vals = rec.values_at(plan.points)
    return model.v(plan.apply(vals, lo - rec.first_index, count))


class NonlocalRHS:
    """Callable semi-discretization for a fixed model, grid and scheme."""

    def __init__(self, model: NonlocalModel, grid: Grid, params: ReconstructionParams,
                 limiter: bool = False, bounds: BoundPair | None = None):
        if limiter and bounds is None:
            raise ValueError("limiter needs bounds")
        self.model, self.grid, self.params = model, grid, params
        self.limiter, self.bounds = limiter, bounds
        self.rule = radau_rule(params.g + 1)
        self.table = kernel_samples(model, grid.h, self.rule)
        self.plan = _ConvolutionPlan(self.table)
        reach = max(-self.plan.kmin, self.plan.kmax)
        self.width = params.g + reach + 2
        # values at y_nu on every cell plus the flux point; the first R points are the nodes
        self.points = self.plan.points
        self.edge = self.plan.edge
        self.last_theta = None

    def reconstruct(self, avg) -> tuple[PiecewiseReconstruction, np.ndarray]:
        ext = ghost_extend(avg, self.grid, self.width)
        g = self.params.g
        rec = reconstruct(ext, self.params, self.grid.h, first_index=g - self.width)
        vals = rec.values_at(self.points)
        if self.limiter:
            vals, theta = limit_values(vals, ext[g:len(ext) - g], self.bounds)
            self.last_theta = theta
        return rec, vals

    def velocities(self, vals: np.ndarray) -> np.ndarray:
        n = self.grid.n_cells
        # interfaces j + 1/2 for j = -1 .. n-1; cell j is row j + width - g
        start = -1 + 1 + self.plan.kmin + self.width - self.params.g
        return self.model.v(self.plan.apply(vals, start, n + 1))

    def __call__(self, avg) -> np.ndarray:
        _, vals = self.reconstruct(avg)
        n = self.grid.n_cells
        off = self.width - self.params.g
        rho_minus = vals[off - 1:off + n, self.edge]
        flux = self.velocities(vals) * self.model.g(rho_minus)
        return -(flux[1:] - flux[:-1]) / self.grid.h


def rhs(avg, model: NonlocalModel, grid: Grid, params: ReconstructionParams,
        limiter: bool = False, bounds: BoundPair | None = None) -> np.ndarray:
    return NonlocalRHS(model, grid, params, limiter, bounds)(avg)


def cfl_step(model: NonlocalModel, h: float, gamma_R: float, c_ssp: float = 1.0,
             safety: float = 1.0) -> float:
    """Largest step for which the limited scheme keeps the averages in bounds."""
    if min(h, gamma_R, c_ssp, safety) <= 0:
        raise ValueError("CFL constants must be positive")
    denom = gamma_R * h * model.w_at_zero * model.norm_dv * model.norm_g + model.norm_v * model.norm_dg
    return safety * c_ssp * gamma_R * h / denom
