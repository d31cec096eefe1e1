"""Search for SSP two-step Runge-Kutta methods with non-negative coefficients.

Methods are parameterized in Spijker form over the rows

    x = [yt, y_1, y_2, .., y_s, u_{n+1}]

where yt is the previous step's first stage (stored with its derivative),
y_1 = d_1 u_{n-1} + (1 - d_1) u_n, and every later row is a convex
combination of the inputs (yt, u_{n-1}, u_n) and of forward Euler steps of
size tau/r taken from yt and the earlier stages.  Any zero-residual point is
SSP with coefficient >= r.  With --d1 0 the stored stage is u_{n-1} and the
method is a genuine two-step method; --d1 1 stores u_{n-2} instead.

Order conditions come from B-series residuals (bseries.py).  Feasibility at
fixed r is solved by bounded least squares; r is then pushed up by bisection.

    python scripts/derive_tsrk.py --stages 4 --order 5 --d1 0 --rmin 0.5 --rmax 0.9 --out tsrk5.npz
    python scripts/derive_tsrk.py --stages 9 --order 7 --d1 1 --rmin 0.5 --rmax 1.5 \
        --start coeffs/tsrk7_start.npy --out tsrk7.npz
"""
import argparse

import jax
import jax.numpy as jnp
import numpy as np
from scipy.optimize import least_squares

import bseries as bs

jax.config.update("jax_enable_x64", True)


def rows_of(s):
    # free rows 2..s+1 (stages 2..s and the update)
    return list(range(2, s + 2))


def n_params(s):
    return sum(3 + i for i in rows_of(s))


def spijker(q, s, d1):
    """Row-normalized non-negative q -> (P over (yt, u_{n-1}, u_n), R over rows)."""
    n = s + 2
    P = jnp.zeros((n, 3)).at[0, 0].set(1.0).at[1, 1].set(d1).at[1, 2].set(1.0 - d1)
    R = jnp.zeros((n, n))
    k = 0
    for i in rows_of(s):
        w = q[k:k + 3 + i]
        k += 3 + i
        w = w / w.sum()
        P = P.at[i].set(w[:3])
        R = R.at[i, :i].set(w[3:])
    return P, R


def tableau(P, R, r, d1):
    n = P.shape[0]
    inv = jnp.linalg.inv(jnp.eye(n) - R)
    S = inv @ P
    T = inv @ R / r
    s = n - 2
    e, d = S[1:s + 1, 0], S[1:s + 1, 1]
    if d1 == 0.0:
        # yt is u_{n-1}: fold its linear part into d
        d, e = d + e, jnp.zeros_like(e)
    eps, theta = S[s + 1, 0], S[s + 1, 1]
    if d1 == 0.0:
        theta, eps = theta + eps, 0.0 * eps
    return dict(d=d, e=e, theta=theta, eps=eps, ahat=T[1:s + 1, 0], A=T[1:s + 1, 1:s + 1],
                bhat=T[s + 1, 0], b=T[s + 1, 1:s + 1])


def residuals(t, p, xp=jnp):
    return bs.tsrk_residuals(t["d"], t["theta"], t["ahat"], t["A"], t["bhat"], t["b"], p, xp=xp,
                             e=t["e"], eps=t["eps"])


def make_residual(s, p, r, d1):
    def f(q):
        return residuals(tableau(*spijker(q, s, d1), r, d1), p)
    return jax.jit(f), jax.jit(jax.jacfwd(f))


def feasible(s, p, r, d1, rng, tries, q0=None, max_nfev=1500):
    f, J = make_residual(s, p, r, d1)
    for t in range(tries):
        start = q0 if (q0 is not None and t == 0) else rng.uniform(0, 1, n_params(s))
        sol = least_squares(lambda q: np.asarray(f(q)), start, jac=lambda q: np.asarray(J(q)),
                            bounds=(0, np.inf), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
        err = np.abs(sol.fun).max()
        print(f"  r={r:.6f} try {t}: resid {err:.2e}", flush=True)
        if err < 1e-13:
            return sol.x
    return None


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--stages", type=int, required=True)
    ap.add_argument("--order", type=int, required=True)
    ap.add_argument("--d1", type=float, choices=(0.0, 1.0), default=0.0)
    ap.add_argument("--rmin", type=float, required=True)
    ap.add_argument("--rmax", type=float, required=True)
    ap.add_argument("--tries", type=int, default=10)
    ap.add_argument("--bisect", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--start", help="q vector (.npy) feasible at --rmin")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    s, p, d1 = args.stages, args.order, args.d1

    lo, hi = args.rmin, args.rmax
    q0 = np.load(args.start) if args.start else None
    q = feasible(s, p, lo, d1, rng, args.tries, q0=q0)
    if q is None:
        raise SystemExit(f"no feasible method at r={lo}")
    best = (lo, q)
    for _ in range(args.bisect):
        mid = 0.5 * (lo + hi)
        qm = feasible(s, p, mid, d1, rng, args.tries, q0=best[1])
        if qm is None:
            hi = mid
        else:
            lo, best = mid, (mid, qm)
    r, q = best
    t = {k: np.asarray(v) for k, v in tableau(*spijker(jnp.asarray(q), s, d1), r, d1).items()}
    resid = np.abs(residuals(t, p, xp=np)).max()
    print(f"r = {r:.8f}, order-{p} residual {resid:.2e}")
    np.savez(args.out, r=r, q=q, d1=d1, **t)


if __name__ == "__main__":
    main()
