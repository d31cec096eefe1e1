"""Solve the order-7 conditions for a 9-stage explicit Runge-Kutta tableau.

Damped Gauss-Newton on the 85 B-series residuals from random starts, with the
abscissae pinned to Butcher's 9-stage pattern c = (0, 1/6, 1/3, 1/2, 2/11,
2/3, 6/7, 0, 1) to cut down the solution manifold.

    python scripts/derive_rk7.py --tries 50 --out rk7.npz
"""
import argparse

import jax
import jax.numpy as jnp
import numpy as np
from scipy.optimize import least_squares

import bseries as bs

jax.config.update("jax_enable_x64", True)

S = 9
C = np.array([0, 1 / 6, 1 / 3, 1 / 2, 2 / 11, 2 / 3, 6 / 7, 0, 1])
TRI = np.tril_indices(S, -1)


def unpack(x):
    A = jnp.zeros((S, S)).at[TRI].set(x[:len(TRI[0])])
    b = x[len(TRI[0]):]
    return A, b


def residual(x):
    A, b = unpack(x)
    order = bs.rk_residuals(A, b, 7, xp=jnp)
    rowsum = A.sum(axis=1) - C
    return jnp.concatenate([order, rowsum])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tries", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    f = jax.jit(residual)
    J = jax.jit(jax.jacfwd(residual))
    n = len(TRI[0]) + S
    for t in range(args.tries):
        x0 = rng.normal(0, 0.5, n)
        sol = least_squares(lambda x: np.asarray(f(x)), x0, jac=lambda x: np.asarray(J(x)),
                            method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=20000)
        err = np.abs(sol.fun).max()
        print(f"try {t}: resid {err:.2e} max|coef| {np.abs(sol.x).max():.2f}", flush=True)
        if err < 1e-14:
            A, b = (np.asarray(v) for v in unpack(sol.x))
            print("order-8 residual (expect nonzero):", np.abs(bs.rk_residuals(A, b, 8)[85:]).max())
            np.savez(args.out, A=A, b=b)
            return
    raise SystemExit("no solution found")


if __name__ == "__main__":
    main()
