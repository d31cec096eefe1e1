"""Non-local flux models g(rho) v(rho * w_eta) and their discrete kernel tables."""
from __future__ import annotations

from dataclasses import dataclass
from math import floor
from typing import Callable

import numpy as np

from .quadrature import QuadratureRule

# relative tolerance for treating eta/h as an integer
_INT_TOL = 1e-10


@dataclass(frozen=True)
class NonlocalModel:
    name: str
    g: Callable
    v: Callable
    dg: Callable
    dv: Callable
    kernel: Callable
    eta: float
    support: str  # "downstream" -> [0, eta]; "symmetric" -> [-2 eta, 2 eta]
    rho_max: float
    norm_v: float
    norm_dv: float
    norm_g: float
    norm_dg: float
    max_principle: bool

    @property
    def w_at_zero(self) -> float:
        return float(self.kernel(np.array(0.0)))

    @property
    def support_interval(self) -> tuple[float, float]:
        if self.support == "downstream":
            return 0.0, self.eta
        return -2.0 * self.eta, 2.0 * self.eta


_TRAFFIC_KERNELS = {
    1: lambda eta: (lambda x: np.full_like(np.asarray(x, float), 1.0 / eta)),
    2: lambda eta: (lambda x: 2.0 * (eta - np.asarray(x, float)) / eta**2),
    3: lambda eta: (lambda x: 3.0 * (eta**2 - np.asarray(x, float) ** 2) / (2.0 * eta**3)),
}


def traffic_model(kernel_id: int, eta: float) -> NonlocalModel:
    """g = rho, v = 1 - rho with a non-increasing kernel on [0, eta]."""
    if kernel_id not in _TRAFFIC_KERNELS:
        raise ValueError(f"unknown traffic kernel {kernel_id}; expected 1, 2 or 3")
    if eta <= 0:
        raise ValueError("eta must be positive")
    return NonlocalModel(
        name=f"traffic-w{kernel_id}",
        g=lambda r: r,
        v=lambda r: 1.0 - r,
        dg=lambda r: np.ones_like(r),
        dv=lambda r: -np.ones_like(r),
        kernel=_TRAFFIC_KERNELS[kernel_id](eta),
        eta=eta,
        support="downstream",
        rho_max=1.0,
        norm_v=1.0, norm_dv=1.0, norm_g=1.0, norm_dg=1.0,
        max_principle=True,
    )


def sedimentation_model(eta: float) -> NonlocalModel:
    """g = rho (1 - rho), v = (1 - rho)^3, truncated-parabola kernel on [-2 eta, 2 eta]."""
    if eta <= 0:
        raise ValueError("eta must be positive")

    def kernel(x):
        y = np.asarray(x, float) / eta
        return np.where(np.abs(y) <= 2.0, 0.375 * (1.0 - 0.25 * y * y), 0.0) / eta

    return NonlocalModel(
        name="sedimentation",
        g=lambda r: r * (1.0 - r),
        v=lambda r: (1.0 - r) ** 3,
        dg=lambda r: 1.0 - 2.0 * r,
        dv=lambda r: -3.0 * (1.0 - r) ** 2,
        kernel=kernel,
        eta=eta,
        support="symmetric",
        rho_max=1.0,
        # sup over [0, 1]
        norm_v=1.0, norm_dv=3.0, norm_g=0.25, norm_dg=1.0,
        # symmetric kernel is not non-increasing on its support
        max_principle=False,
    )


@dataclass(frozen=True)
class KernelSampleTable:
    """Discrete convolution weights relative to an interface x_{j+1/2}.

    Entry ``e`` covers a subinterval inside cell j+1+offsets[e]; ``y[e]`` are
    the local positions of its R nodes in that cell, ``raw[e]`` the kernel
    samples there and ``length[e]`` the subinterval length (h or a fraction).
    """

    offsets: np.ndarray
    y: np.ndarray
    raw: np.ndarray
    length: np.ndarray
    gamma: np.ndarray
    h: float

    @property
    def raw_mass(self) -> float:
        return float(np.sum(self.length[:, None] * self.gamma[None, :] * self.raw))

    @property
    def samples(self) -> np.ndarray:
        """Renormalized samples with unit discrete mass."""
        return self.raw / self.raw_mass

    @property
    def weights(self) -> np.ndarray:
        """Convex weights length * gamma * renormalized sample; sum to one."""
        return self.length[:, None] * self.gamma[None, :] * self.samples

    @property
    def reach(self) -> tuple[int, int]:
        return int(self.offsets.min()), int(self.offsets.max())


def _split(length: float, h: float) -> tuple[int, float]:
    ratio = length / h
    N = floor(ratio + _INT_TOL)
    delta = length - N * h
    if delta <= _INT_TOL * h:
        delta = 0.0
    return N, delta


def kernel_samples(model: NonlocalModel, h: float, rule: QuadratureRule) -> KernelSampleTable:
    if h <= 0:
        raise ValueError("h must be positive")
    nodes, gamma, R = rule.nodes, rule.weights, rule.R
    half = model.eta if model.support == "downstream" else 2.0 * model.eta
    if h > half * (1.0 + _INT_TOL):
        raise ValueError(f"h={h} exceeds the kernel reach {half}")
    N, delta = _split(half, h)

    offsets, ys, xs, lengths = [], [], [], []
    kmin = 0 if model.support == "downstream" else -N
    for k in range(kmin, N):
        offsets.append(k)
        ys.append(nodes)
        xs.append((k + nodes) * h)
        lengths.append(h)
    if delta > 0.0:
        # partial cell beyond N h on the right
        offsets.append(N)
        ys.append(delta * nodes / h)
        xs.append(N * h + delta * nodes)
        lengths.append(delta)
        if model.support == "symmetric":
            offsets.insert(0, -N - 1)
            ys.insert(0, 1.0 - delta / h + delta * nodes / h)
            xs.insert(0, -half + delta * nodes)
            lengths.insert(0, delta)
    raw = np.asarray(model.kernel(np.array(xs)), float)
    if np.any(raw < 0):
        raise ValueError("kernel must be non-negative")
    return KernelSampleTable(
        offsets=np.array(offsets, dtype=int),
        y=np.array(ys, float).reshape(-1, R),
        raw=raw.reshape(-1, R),
        length=np.array(lengths, float),
        gamma=np.asarray(gamma, float),
        h=h,
    )
