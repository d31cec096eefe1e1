"""Explicit one-step and two-step Runge-Kutta integrators.

Tableaux of the longer methods are read from ``data/*.tab`` (see
``load_tableau`` for the format).  The two-step methods have the form

    y_1     = d_1 u_{n-1} + (1 - d_1) u_n
    y_i     = e_i yt + d_i u_{n-1} + (1 - e_i - d_i) u_n + tau (ahat_i F(yt) + sum_{j<i} a_ij F(y_j))
    u_{n+1} = eps yt + theta u_{n-1} + (1 - eps - theta) u_n + tau (bhat F(yt) + sum_j b_j F(y_j))

where yt is the first stage of the previous step, so F(yt) is reused.  With
d_1 = 0 (and e = eps = 0) yt is u_{n-1}; with d_1 = 1 it is u_{n-2}, and the
method needs two start-up steps instead of one.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Callable

import numpy as np

RHS = Callable[[np.ndarray], np.ndarray]

ONE_STEP = ("euler", "tvdrk3", "rk5", "rk7", "ssprk54")
TWO_STEP = ("tsrk5", "tsrk7")
METHODS = ONE_STEP + TWO_STEP

# SSP constants used in the step-size formulas; for the two-step methods these
# are per-stage (effective) values, well below the shipped methods' radii.
SSP_CONSTANTS = {"euler": 1.0, "tvdrk3": 1.0, "ssprk54": 1.508, "tsrk5": 0.21354, "tsrk7": 0.12444}


class TableauChecksumError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorSpec:
    name: str
    order: int
    A: np.ndarray
    b: np.ndarray
    c_ssp: float | None = None
    two_step: bool = False
    d: np.ndarray | None = None
    theta: float = 0.0
    ahat: np.ndarray | None = None
    bhat: float = 0.0
    e: np.ndarray | None = None
    eps: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def stages(self) -> int:
        return len(self.b)

    @property
    def is_ssp(self) -> bool:
        return self.c_ssp is not None

    @property
    def d1(self) -> float:
        return float(self.d[0]) if self.two_step else 0.0

    @property
    def startup_steps(self) -> int:
        """One-step start-up steps needed before the first two-step step."""
        if not self.two_step:
            return 0
        return 1 if self.d1 == 0.0 else 2


def _fr(rows):
    return np.array([[float(Fraction(x)) for x in r] for r in rows])


_INLINE = {
    "euler": (1, [["0"]], ["1"]),
    "tvdrk3": (3, [["0", "0", "0"], ["1", "0", "0"], ["1/4", "1/4", "0"]], ["1/6", "1/6", "2/3"]),
    # Butcher's six-stage fifth-order method
    "rk5": (5, [["0"] * 6, ["1/4", "0", "0", "0", "0", "0"], ["1/8", "1/8", "0", "0", "0", "0"],
                ["0", "0", "1/2", "0", "0", "0"], ["3/16", "-3/8", "3/8", "9/16", "0", "0"],
                ["-3/7", "8/7", "6/7", "-12/7", "8/7", "0"]],
            ["7/90", "0", "16/45", "2/15", "16/45", "7/90"]),
}


def load_tableau(name: str) -> dict:
    """Parse ``data/<name>.tab`` and verify its checksum.

    Format: ``#`` header lines (``# key: value``), one of which is
    ``# sha256: <hex>`` over the data lines; data lines are
    ``<symbol> [i [j]] <decimal>`` with 1-based indices.
    """
    text = resources.files("cweno_nonlocal").joinpath("data").joinpath(f"{name}.tab").read_text()
    return parse_tableau(text, name)


def parse_tableau(text: str, name: str = "<text>") -> dict:
    meta, data = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            meta[key.strip()] = val.strip()
        elif line.strip():
            data.append(line.strip())
    digest = hashlib.sha256("\n".join(data).encode()).hexdigest()
    if meta.get("sha256") != digest:
        raise TableauChecksumError(f"checksum mismatch in {name}.tab")
    s = int(meta["stages"])
    out = {"A": np.zeros((s, s)), "b": np.zeros(s), "d": np.zeros(s), "ahat": np.zeros(s), "e": np.zeros(s),
           "theta": 0.0, "bhat": 0.0, "eps": 0.0, "meta": meta}
    for line in data:
        sym, *rest = line.split()
        val = float(rest[-1])
        idx = [int(i) - 1 for i in rest[:-1]]
        if sym in ("theta", "bhat", "eps"):
            out[sym] = val
        else:
            out[sym][tuple(idx)] = val
    return out


@lru_cache(maxsize=None)
def get_integrator(name: str) -> IntegratorSpec:
    if name in _INLINE:
        order, A, b = _INLINE[name]
        return IntegratorSpec(name, order, _fr(A), _fr([b])[0], c_ssp=SSP_CONSTANTS.get(name))
    if name not in METHODS:
        raise ValueError(f"unknown integrator {name!r}; expected one of {METHODS}")
    t = load_tableau(name)
    order = int(t["meta"]["order"])
    if name in TWO_STEP:
        return IntegratorSpec(name, order, t["A"], t["b"], c_ssp=SSP_CONSTANTS[name], two_step=True,
                              d=t["d"], theta=t["theta"], ahat=t["ahat"], bhat=t["bhat"], e=t["e"], eps=t["eps"],
                              meta=t["meta"])
    return IntegratorSpec(name, order, t["A"], t["b"], c_ssp=SSP_CONSTANTS.get(name), meta=t["meta"])


def euler_step(u, tau: float, rhs_fn: RHS):
    if tau <= 0:
        raise ValueError("step size must be positive")
    return u + tau * rhs_fn(u)


def rk_step(u, tau: float, rhs_fn: RHS, spec: IntegratorSpec):
    if spec.two_step:
        raise ValueError(f"{spec.name} is a two-step method")
    k = []
    for i in range(spec.stages):
        y = u
        for j in range(i):
            if spec.A[i, j] != 0.0:
                y = y + tau * spec.A[i, j] * k[j]
        k.append(rhs_fn(y))
    out = u
    for bj, kj in zip(spec.b, k):
        if bj != 0.0:
            out = out + tau * bj * kj
    return out


def tsrk_step(u_prev, u_curr, tau: float, rhs_fn: RHS, spec: IntegratorSpec, *,
              y_tilde=None, f_tilde=None, t_prev: float | None = None, t_curr: float | None = None,
              return_stage: bool = False):
    """One two-step RK step from (u_{n-1}, u_n) to u_{n+1}.

    ``y_tilde`` is the previous step's first stage (default u_{n-1}, which
    is only valid for d_1 = 0) and ``f_tilde`` may pass its cached F value.
    With ``return_stage`` the pair (y_1, F(y_1)) is returned as well, to be
    passed on to the next step.
    """
    if not spec.two_step:
        raise ValueError(f"{spec.name} is not a two-step method")
    if t_prev is not None and t_curr is not None:
        if not math.isclose(t_curr - t_prev, tau, rel_tol=1e-9, abs_tol=1e-15):
            raise ValueError(f"states are {t_curr - t_prev} apart, expected step {tau}")
    d1 = spec.d1
    if y_tilde is None:
        if d1 != 0.0:
            raise ValueError(f"{spec.name} needs the first stage of the previous step")
        y_tilde = u_prev
    if f_tilde is None:
        f_tilde = rhs_fn(y_tilde)
    y1 = u_curr if d1 == 0.0 else d1 * u_prev + (1.0 - d1) * u_curr
    k = [rhs_fn(y1)]
    for i in range(1, spec.stages):
        y = spec.d[i] * u_prev + (1.0 - spec.d[i] - spec.e[i]) * u_curr + tau * spec.ahat[i] * f_tilde
        if spec.e[i] != 0.0:
            y = y + spec.e[i] * y_tilde
        for j in range(i):
            if spec.A[i, j] != 0.0:
                y = y + tau * spec.A[i, j] * k[j]
        k.append(rhs_fn(y))
    out = spec.theta * u_prev + (1.0 - spec.theta - spec.eps) * u_curr + tau * spec.bhat * f_tilde
    if spec.eps != 0.0:
        out = out + spec.eps * y_tilde
    for bj, kj in zip(spec.b, k):
        out = out + tau * bj * kj
    return (out, y1, k[0]) if return_stage else out


def n_substeps(tau: float, sub_tau: float) -> int:
    return max(1, math.ceil(tau / sub_tau - 1e-9))


def bootstrap_first_step(u0, tau: float, rhs_fn: RHS, sub_tau: float | None = None):
    """Advance by ``tau`` with equal SSPRK(5,4) substeps no longer than ``sub_tau``."""
    sub_tau = tau if sub_tau is None else sub_tau
    if sub_tau > tau * (1 + 1e-12):
        raise ValueError("substep larger than the step")
    m = n_substeps(tau, sub_tau)
    spec = get_integrator("ssprk54")
    u = u0
    for _ in range(m):
        u = rk_step(u, tau / m, rhs_fn, spec)
    return u


@dataclass
class Trace:
    """Per-step time, global minimum and maximum of the state."""

    t: list = field(default_factory=list)
    min: list = field(default_factory=list)
    max: list = field(default_factory=list)

    def record(self, t, u):
        self.t.append(float(t))
        self.min.append(float(np.min(u)))
        self.max.append(float(np.max(u)))

    @property
    def global_min(self) -> float:
        return min(self.min)

    @property
    def global_max(self) -> float:
        return max(self.max)


def step_count(T: float, tau_max: float) -> int:
    if T <= 0 or tau_max <= 0:
        raise ValueError("need T > 0 and tau_max > 0")
    return max(1, math.ceil(T / tau_max - 1e-9))


def integrate_to(u0, T: float, tau_max: float, rhs_fn: RHS, spec: IntegratorSpec | str,
                 sub_tau: float | None = None, trace: Trace | None = None):
    """Integrate to ``T`` with the uniform step T / ceil(T / tau_max).

    Two-step methods start with ``startup_steps`` calls of
    ``bootstrap_first_step`` (substep ``sub_tau``).
    Returns the final state; ``trace`` (if given) gets every step's min/max.
    """
    if isinstance(spec, str):
        spec = get_integrator(spec)
    n = step_count(T, tau_max)
    tau = T / n
    u = np.array(u0, float)
    if trace is not None:
        trace.record(0.0, u)
    if not spec.two_step:
        for i in range(n):
            u = rk_step(u, tau, rhs_fn, spec)
            if trace is not None:
                trace.record((i + 1) * tau, u)
        return u
    # start-up: one or two substepped SSPRK(5,4) steps
    boot = min(spec.startup_steps, n)
    sub_tau = None if sub_tau is None else min(sub_tau, tau)
    hist = [u]
    for i in range(boot):
        hist.append(bootstrap_first_step(hist[-1], tau, rhs_fn, sub_tau))
        if trace is not None:
            trace.record((i + 1) * tau, hist[-1])
    if boot == n:
        return hist[-1]
    u_prev, u = hist[-2], hist[-1]
    d1 = spec.d1
    y_tilde = u_prev if d1 == 0.0 else d1 * hist[-3] + (1.0 - d1) * u_prev
    f_tilde = None
    for i in range(boot, n):
        u_next, y_tilde, f_tilde = tsrk_step(u_prev, u, tau, rhs_fn, spec, y_tilde=y_tilde, f_tilde=f_tilde,
                                             return_stage=True)
        u_prev, u = u, u_next
        if trace is not None:
            trace.record((i + 1) * tau, u)
    return u
