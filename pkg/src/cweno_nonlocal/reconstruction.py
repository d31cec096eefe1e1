"""CWENO reconstruction of order 2g+1 from cell averages.

Polynomials live in the local coordinate xi = (x - x_j)/h in [-1/2, 1/2] and
are stored as monomial coefficients (lowest degree first).  All stencil maps
are h-independent, so they are assembled once per g in exact rational
arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np


@dataclass(frozen=True)
class LocalPolynomial:
    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, xi):
        return np.polynomial.polynomial.polyval(xi, self.coeffs)

    def mean(self, a: float = -0.5, b: float = 0.5) -> float:
        """Mean over [a, b] in local coordinates (closed form)."""
        k = np.arange(1, len(self.coeffs) + 1)
        return float(np.sum(self.coeffs * (b**k - a**k) / k) / (b - a))


@dataclass(frozen=True)
class ReconstructionParams:
    g: int
    c0: float = 0.5
    p: float = 2.0
    q: float = 2.0

    def __post_init__(self):
        if self.g not in (1, 2, 3):
            raise ValueError(f"g must be 1, 2 or 3, got {self.g}")
        if not 0.0 < self.c0 < 1.0:
            raise ValueError("c0 must lie in (0, 1)")

    @property
    def m(self) -> int:
        return self.g + 1

    @property
    def degree(self) -> int:
        return 2 * self.g

    @property
    def linear_weights(self) -> np.ndarray:
        """(c_0, ..., c_m); the remainder 1 - c_0 is split evenly."""
        rest = (1.0 - self.c0) / self.m
        return np.array([self.c0] + [rest] * self.m)

    def epsilon(self, h: float) -> float:
        return h**self.q


@dataclass
class PiecewiseReconstruction:
    """One polynomial per cell; row ``i`` belongs to cell ``first_index + i``."""

    coeffs: np.ndarray
    h: float
    first_index: int = 0
    weights: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_cells(self) -> int:
        return self.coeffs.shape[0]

    def polynomial(self, j: int) -> LocalPolynomial:
        i = j - self.first_index
        if not 0 <= i < self.n_cells:
            raise IndexError(f"cell {j} outside reconstructed range")
        return LocalPolynomial(self.coeffs[i])

    def values_at(self, y) -> np.ndarray:
        """Values of every cell polynomial at local positions ``y`` in [0, 1]."""
        return self.coeffs @ vandermonde(np.asarray(y, float), self.coeffs.shape[1] - 1)

    def means(self) -> np.ndarray:
        d = np.arange(self.coeffs.shape[1])
        mono = np.where(d % 2 == 0, 0.5**d / (d + 1), 0.0)
        return self.coeffs @ mono


def vandermonde(y: np.ndarray, degree: int) -> np.ndarray:
    xi = np.atleast_1d(y) - 0.5
    return xi[None, :] ** np.arange(degree + 1)[:, None]


# exact rational assembly --------------------------------------------------


def _mean_row(offset: int, degree: int):
    lo, hi = Fraction(2 * offset - 1, 2), Fraction(2 * offset + 1, 2)
    return [(hi ** (d + 1) - lo ** (d + 1)) / (d + 1) for d in range(degree + 1)]


def _inverse(M):
    n = len(M)
    A = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [x / pv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


@lru_cache(maxsize=None)
def _stencil_map(offsets: tuple, degree: int):
    """Rational matrix mapping cell averages at ``offsets`` to coefficients."""
    return _inverse([_mean_row(o, degree) for o in offsets])


@lru_cache(maxsize=None)
def smoothness_matrix(degree: int, G: int) -> np.ndarray:
    """B with S(Q) = c^T B c = sum_{l=1}^G int_{-1/2}^{1/2} (Q^(l))^2 dxi."""
    B = [[Fraction(0)] * (degree + 1) for _ in range(degree + 1)]
    for l in range(1, G + 1):
        for a in range(l, degree + 1):
            for b in range(l, degree + 1):
                e = (a - l) + (b - l)
                if e % 2:
                    continue
                integral = Fraction(2, e + 1) / 2 ** (e + 1)
                fa = Fraction(factorial(a), factorial(a - l))
                fb = Fraction(factorial(b), factorial(b - l))
                B[a][b] += fa * fb * integral
    return np.array(B, dtype=float)


@lru_cache(maxsize=None)
def candidate_maps(g: int, c: tuple) -> np.ndarray:
    """Array (m+1, 2g+1, 2g+1): window of 2g+1 averages -> coeffs of P_0..P_m.

    The window is centred on the target cell; P_1..P_m are zero-padded to
    degree 2g.  P_0 = (P_opt - sum c_k P_k) / c_0 with exact rationals.
    """
    D = 2 * g + 1
    cf = [Fraction(x).limit_denominator(10**12) for x in c]
    opt = _stencil_map(tuple(range(-g, g + 1)), 2 * g)
    maps = []
    for k in range(1, g + 2):
        offs = tuple(range(-g + k - 1, k))
        sub = _stencil_map(offs, g)
        full = [[Fraction(0)] * D for _ in range(D)]
        for d in range(g + 1):
            for i, o in enumerate(offs):
                full[d][o + g] = sub[d][i]
        maps.append(full)
    p0 = [[(opt[d][i] - sum(cf[k + 1] * maps[k][d][i] for k in range(g + 1))) / cf[0]
           for i in range(D)] for d in range(D)]
    return np.array([p0] + maps, dtype=float)


@lru_cache(maxsize=None)
def optimal_map(g: int) -> np.ndarray:
    return np.array(_stencil_map(tuple(range(-g, g + 1)), 2 * g), dtype=float)


# single-cell operations ----------------------------------------------------


def optimal_polynomial(stencil) -> LocalPolynomial:
    """Degree-2g polynomial matching the 2g+1 centred cell averages."""
    stencil = np.asarray(stencil, float)
    if stencil.ndim != 1 or len(stencil) % 2 == 0 or len(stencil) not in (3, 5, 7):
        raise ValueError(f"optimal stencil needs 3, 5 or 7 averages, got {len(stencil)}")
    g = (len(stencil) - 1) // 2
    return LocalPolynomial(optimal_map(g) @ stencil)


def substencil_polynomial(k: int, stencil, g: int) -> LocalPolynomial:
    """Degree-g polynomial matching averages of cells j-g+k-1 .. j+k-1."""
    stencil = np.asarray(stencil, float)
    if not 1 <= k <= g + 1:
        raise ValueError(f"substencil index k={k} outside 1..{g + 1}")
    if len(stencil) != g + 1:
        raise ValueError(f"substencil needs {g + 1} averages, got {len(stencil)}")
    M = np.array(_stencil_map(tuple(range(-g + k - 1, k)), g), dtype=float)
    return LocalPolynomial(M @ stencil)


def p0_polynomial(p_opt: LocalPolynomial, subs, c) -> LocalPolynomial:
    c = np.asarray(c, float)
    if c[0] <= 0:
        raise ValueError("c_0 must be positive")
    acc = np.array(p_opt.coeffs, float)
    for ck, pk in zip(c[1:], subs):
        acc[: len(pk.coeffs)] -= ck * pk.coeffs
    return LocalPolynomial(acc / c[0])


def smoothness_indicator(P: LocalPolynomial, G: int) -> float:
    """Jiang-Shu indicator; dimensionless in local coordinates."""
    B = smoothness_matrix(P.degree, G)
    return float(P.coeffs @ B @ P.coeffs)


def nonlinear_weights(S, params: ReconstructionParams, h: float) -> np.ndarray:
    """w_k = alpha_k / sum(alpha), alpha_k = c_k / (S_k + h^q)^p.

    ``S`` may carry a leading cell axis: shape (..., m+1).
    """
    S = np.asarray(S, float)
    alpha = params.linear_weights / (S + params.epsilon(h)) ** params.p
    return alpha / alpha.sum(axis=-1, keepdims=True)


# whole-grid reconstruction -------------------------------------------------


def reconstruct(ext, params: ReconstructionParams, h: float, first_index: int = 0) -> PiecewiseReconstruction:
    """CWENO reconstruction of every cell of ``ext`` that has g neighbours.

    ``ext`` holds ghost-extended averages; the result covers ext[g:-g] and
    row 0 is labelled ``first_index``.
    """
    ext = np.asarray(ext, float)
    g = params.g
    D = 2 * g + 1
    n = len(ext) - 2 * g
    if n < 1:
        raise ValueError(f"need at least {D} extended averages for g={g}")
    win = np.lib.stride_tricks.sliding_window_view(ext, D)
    maps = candidate_maps(g, tuple(params.linear_weights))
    # every candidate reproduces constants, so work with deviations from the
    # centre average to keep round-off relative to the local variation
    centre = win[:, g]
    cand = np.einsum("kdi,ni->nkd", maps, win - centre[:, None])
    B = smoothness_matrix(2 * g, 2 * g)
    S = np.einsum("nkd,de,nke->nk", cand, B, cand)
    w = nonlinear_weights(S, params, h)
    coeffs = np.einsum("nk,nkd->nd", w, cand)
    coeffs[:, 0] += centre
    return PiecewiseReconstruction(coeffs, h, first_index, w)


def evaluate(rec: PiecewiseReconstruction, j: int, y: float) -> float:
    if not 0.0 <= y <= 1.0:
        raise ValueError("y must lie in [0, 1]")
    return float(rec.polynomial(j)(y - 0.5))
