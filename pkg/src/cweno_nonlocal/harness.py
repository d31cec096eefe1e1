"""Experiment definitions, reference runs, error norms and convergence tables.

Mesh sizes follow h = 1/20 * 2^-n.  Four cases are built in:

    smooth         traffic, rho0 = 0.5 + 0.4 sin(pi x) on [-1, 1], periodic
    nonsmooth      traffic, 0.95 on [-0.5, 0.4] else 0.05 on [-1, 1], periodic
    sedimentation  rho0 = 0.8 sin(pi x)^10 on [0, 1], zero boundary data
    maxprinciple   traffic, smoothstep plateau on [0, 1], periodic, SSP steps
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .grid import Grid
from .limiter import BOUND_TOL, BoundPair
from .model import NonlocalModel, sedimentation_model, traffic_model
from .quadrature import initial_cell_averages, radau_rule
from .reconstruction import ReconstructionParams
from .spatial import NonlocalRHS, cfl_step
from .timestep import SSP_CONSTANTS, Trace, get_integrator, integrate_to, step_count

SCHEMES = (3, 5, 7)
KERNELS = (1, 2, 3)
# SSP coefficient of the five-stage start-up method in the bootstrap bound
BOOTSTRAP_C = 1.35


@lru_cache(maxsize=None)
def _smoothstep_coeffs(k: int = 8) -> np.ndarray:
    """Monomial coefficients of the degree 2k+1 polynomial with S(0)=0, S(1)=1 and
    vanishing derivatives 1..k at both ends.

    Built in integer arithmetic from S(x) = x^(k+1) sum_j C(k+j, j) (1-x)^j; a
    Hermite solve in floating point loses most digits at this degree.
    """
    out = [0] * (2 * k + 2)
    for j in range(k + 1):
        c = math.comb(k + j, j)
        for i in range(j + 1):
            out[k + 1 + i] += c * math.comb(j, i) * (-1) ** i
    return np.array(out, dtype=float)


def smoothstep17(x):
    x = np.clip(np.asarray(x, float), 0.0, 1.0)
    k = 8
    return x ** (k + 1) * sum(math.comb(k + j, j) * (1.0 - x) ** j for j in range(k + 1))


def maxprinciple_profile(x):
    x = np.asarray(x, float) % 1.0
    up = smoothstep17(4.0 * (x - 0.125))
    down = smoothstep17(4.0 * (0.875 - x))
    return np.where(x < 0.5, up, down)


def _smooth_traffic(x):
    return 0.5 + 0.4 * np.sin(np.pi * x)


def _nonsmooth_traffic(x):
    x = np.asarray(x, float)
    return np.where((x >= -0.5) & (x <= 0.4), 0.95, 0.05)


def _sediment(x):
    return 0.8 * np.sin(np.pi * np.asarray(x, float)) ** 10


@dataclass(frozen=True)
class Case:
    name: str
    model: str
    domain: tuple[float, float]
    bc: str
    rho0: Callable
    eta: float
    kernel: int
    T: float
    step_rule: str  # "plain", "sedimentation" or "ssp"


CASES = {
    "smooth": Case("smooth", "traffic", (-1.0, 1.0), "periodic", _smooth_traffic, 0.2, 1, 0.15, "plain"),
    "nonsmooth": Case("nonsmooth", "traffic", (-1.0, 1.0), "periodic", _nonsmooth_traffic, 0.1, 3, 0.1, "plain"),
    "sedimentation": Case("sedimentation", "sedimentation", (0.0, 1.0), "constant", _sediment, 0.05, 1, 0.04,
                          "sedimentation"),
    "maxprinciple": Case("maxprinciple", "traffic", (0.0, 1.0), "periodic", maxprinciple_profile, 0.05, 3, 0.05,
                         "ssp"),
}
DEFAULT_CASE = {"traffic": "smooth", "sedimentation": "sedimentation"}


def default_integrator(case: str, scheme: int) -> str:
    if CASES[case].step_rule == "ssp":
        return {3: "tvdrk3", 5: "tsrk5", 7: "tsrk7"}[scheme]
    return {3: "tvdrk3", 5: "rk5", 7: "rk7"}[scheme]


def mesh_size(n: int) -> float:
    return 2.0 ** -n / 20.0


@dataclass(frozen=True)
class RunConfig:
    case: str = "smooth"
    kernel: int | None = None
    eta: float | None = None
    scheme: int = 3
    integrator: str | None = None
    n: int | None = 0
    h: float | None = None
    T: float | None = None
    limiter: bool = False
    safety: float = 0.9
    bounds: str | tuple[float, float] = "auto"
    ref: str | None = None
    out: str | None = None

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}; expected one of {tuple(CASES)}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.kernel is not None and self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}")
        if self.eta is not None and self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.T is not None and self.T <= 0:
            raise ValueError("T must be positive")
        if self.safety <= 0:
            raise ValueError("safety factor must be positive")
        if self.h is None and self.n is None:
            raise ValueError("give n or h")
        if self.bounds != "auto":
            lo, hi = self.bounds
            if not lo <= hi:
                raise ValueError("bounds must satisfy lo <= hi")
        self.grid  # validates h against the domain

    @property
    def spec(self) -> Case:
        return CASES[self.case]

    @property
    def g(self) -> int:
        return (self.scheme - 1) // 2

    @property
    def mesh(self) -> float:
        return self.h if self.h is not None else mesh_size(self.n)

    @property
    def final_time(self) -> float:
        return self.T if self.T is not None else self.spec.T

    @property
    def method(self) -> str:
        return self.integrator or default_integrator(self.case, self.scheme)

    @property
    def grid(self) -> Grid:
        a, b = self.spec.domain
        cells = (b - a) / self.mesh
        n_cells = round(cells)
        if n_cells < 1 or abs(cells - n_cells) > 1e-9 * cells:
            raise ValueError(f"h = {self.mesh} does not divide the domain length {b - a}")
        return Grid.uniform(a, b, n_cells, bc=self.spec.bc)

    def model(self) -> NonlocalModel:
        eta = self.eta if self.eta is not None else self.spec.eta
        if self.spec.model == "sedimentation":
            return sedimentation_model(eta)
        return traffic_model(self.kernel if self.kernel is not None else self.spec.kernel, eta)

    def step_size(self) -> float:
        m, h = self.model(), self.mesh
        rule = self.spec.step_rule
        if rule == "plain":
            return self.safety * h / (h * m.w_at_zero + 1.0)
        if rule == "sedimentation":
            return self.safety * h / (3.0 * m.eta * m.w_at_zero + 1.0)
        c = SSP_CONSTANTS.get(self.method)
        if c is None:
            raise ValueError(f"{self.method} has no SSP coefficient")
        return cfl_step(m, h, radau_rule(self.g + 1).gamma_R, c, self.safety)

    def bootstrap_step(self) -> float | None:
        """Substep bound for the start-up of a two-step method."""
        if not get_integrator(self.method).two_step:
            return None
        gamma = radau_rule(self.g + 1).gamma_R
        n = self.n if self.n is not None else math.log2(1.0 / (20.0 * self.mesh))
        sub = cfl_step(self.model(), self.mesh, gamma, BOOTSTRAP_C) * 2.0 ** (-self.scheme * n / 4.0)
        return min(self.step_size(), sub)


@dataclass
class ErrorReport:
    n: int | None
    h: float
    L1: float | None = None
    Linf: float | None = None
    L1_rate: float | None = None
    Linf_rate: float | None = None
    min: float | None = None
    max: float | None = None

    def __post_init__(self):
        for v in (self.L1, self.Linf):
            if v is not None and v < 0:
                raise ValueError("norms must be non-negative")


@dataclass
class RunResult:
    config: RunConfig
    grid: Grid
    averages: np.ndarray
    trace: Trace
    bounds: BoundPair
    tau: float
    steps: int
    report: ErrorReport = field(init=False)

    def __post_init__(self):
        self.report = ErrorReport(self.config.n, self.grid.h, min=self.trace.global_min, max=self.trace.global_max)


def resolve_bounds(config: RunConfig, u0: np.ndarray) -> BoundPair:
    if config.bounds == "auto":
        return BoundPair(float(u0.min()), float(u0.max()))
    return BoundPair(*map(float, config.bounds))


def run_experiment(config: RunConfig) -> RunResult:
    grid = config.grid
    rule = radau_rule(config.g + 1)
    u0 = initial_cell_averages(config.spec.rho0, grid, rule)
    bounds = resolve_bounds(config, u0)
    f = NonlocalRHS(config.model(), grid, ReconstructionParams(config.g), limiter=config.limiter,
                    bounds=bounds if config.limiter else None)
    tau = config.step_size()
    trace = Trace()
    u = integrate_to(u0, config.final_time, tau, f, config.method, sub_tau=config.bootstrap_step(), trace=trace)
    steps = step_count(config.final_time, tau)
    return RunResult(config, grid, u, trace, bounds, config.final_time / steps, steps)


def restrict(fine, factor: int) -> np.ndarray:
    fine = np.asarray(fine, float)
    if factor < 1 or len(fine) % factor:
        raise ValueError(f"{len(fine)} cells cannot be grouped in blocks of {factor}")
    return fine.reshape(-1, factor).mean(axis=1)


def error_norms(coarse, reference, h: float) -> tuple[float, float]:
    """L1 and Linf distance of ``coarse`` to the block means of a nested finer ``reference``."""
    coarse = np.asarray(coarse, float)
    reference = np.asarray(reference, float)
    if len(reference) % len(coarse):
        raise ValueError(f"grids of {len(coarse)} and {len(reference)} cells are not nested")
    diff = np.abs(coarse - restrict(reference, len(reference) // len(coarse)))
    return float(h * diff.sum()), float(diff.max())


def reference_config(config: RunConfig, n_ref: int = 5) -> RunConfig:
    return replace(config, scheme=7, integrator=None, n=n_ref, h=None, ref=None)


def reference_solution(config: RunConfig, n_ref: int = 5) -> np.ndarray:
    return run_experiment(reference_config(config, n_ref)).averages


def _rate(prev, cur):
    if prev is None or cur is None or prev <= 0 or cur <= 0:
        return None
    return math.log2(prev / cur)


def convergence_table(config: RunConfig, ns, reference=None, n_ref: int = 5) -> list[ErrorReport]:
    ns = list(ns)
    if len(ns) < 2:
        raise ValueError("need at least two refinements")
    if reference is None:
        reference = reference_solution(config, n_ref)
    rows = []
    for n in ns:
        res = run_experiment(replace(config, n=n, h=None))
        rep = res.report
        rep.L1, rep.Linf = error_norms(res.averages, reference, res.grid.h)
        if rows:
            rep.L1_rate = _rate(rows[-1].L1, rep.L1)
            rep.Linf_rate = _rate(rows[-1].Linf, rep.Linf)
        rows.append(rep)
    return rows


def rates_from_errors(errors) -> list[float | None]:
    return [None] + [_rate(a, b) for a, b in zip(errors[:-1], errors[1:])]


def table_csv(rows: list[ErrorReport]) -> str:
    buf = io.StringIO()
    buf.write("n,L1,rate,Linf,rate\n")
    fmt = lambda v: "" if v is None else f"{v:.6e}"
    rate = lambda v: "" if v is None else f"{v:.4f}"
    for r in rows:
        buf.write(f"{r.n},{fmt(r.L1)},{rate(r.L1_rate)},{fmt(r.Linf)},{rate(r.Linf_rate)}\n")
    return buf.getvalue()


@dataclass
class AuditReport:
    global_min: float
    global_max: float
    bounds: BoundPair
    below: list = field(default_factory=list)  # (step, time, min) beyond the lower bound
    above: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.below and not self.above

    def text(self) -> str:
        lines = [f"global_min {self.global_min:.17g}", f"global_max {self.global_max:.17g}",
                 f"bounds {self.bounds.rho_m:.17g} {self.bounds.rho_M:.17g}",
                 f"tolerance {BOUND_TOL:g}",
                 f"violations_below {len(self.below)}", f"violations_above {len(self.above)}",
                 f"status {'ok' if self.ok else 'VIOLATION'}"]
        for tag, items in (("below", self.below), ("above", self.above)):
            lines += [f"{tag} step {k} t {t:.17g} value {v:.17g}" for k, t, v in items]
        return "\n".join(lines) + "\n"


def maxprinciple_audit(trace: Trace, bounds: BoundPair, tol: float = BOUND_TOL) -> AuditReport:
    rep = AuditReport(trace.global_min, trace.global_max, bounds)
    for k, (t, lo, hi) in enumerate(zip(trace.t, trace.min, trace.max)):
        if lo < bounds.rho_m - tol:
            rep.below.append((k, t, lo))
        if hi > bounds.rho_M + tol:
            rep.above.append((k, t, hi))
    return rep
