"""Rooted trees and B-series order-condition residuals for RK and two-step RK methods.

Used offline to derive and re-check the shipped tableaux. Trees are nested
sorted tuples of children; the single-node tree is ``()``.
"""
from functools import lru_cache
from math import prod

import numpy as np


@lru_cache(maxsize=None)
def trees(order):
    """All rooted trees with ``order`` nodes."""
    if order == 1:
        return ((),)
    out = set()
    for forest in _forests(order - 1, order - 1):
        out.add(tuple(sorted(forest)))
    return tuple(sorted(out))


def _forests(n, maxpart):
    # multisets of trees with total order n, parts of order <= maxpart
    if n == 0:
        yield ()
        return
    for k in range(min(n, maxpart), 0, -1):
        for t in trees(k):
            for rest in _forests(n - k, k):
                if all(_key(r) <= _key(t) for r in rest if _order(r) == k):
                    yield (t,) + rest


def _key(t):
    return repr(t)


@lru_cache(maxsize=None)
def _order(t):
    return 1 + sum(_order(c) for c in t)


@lru_cache(maxsize=None)
def density(t):
    return _order(t) * prod(density(c) for c in t)


def all_trees(pmax):
    return [t for p in range(1, pmax + 1) for t in trees(p)]


def rk_residuals(A, b, pmax, xp=np):
    A = xp.asarray(A)
    b = xp.asarray(b)
    eta = {}

    def deriv(t):
        return prod((stage(c) for c in t), start=xp.ones(len(b)))

    def stage(t):
        if t not in eta:
            eta[t] = A @ deriv(t)
        return eta[t]

    return xp.stack([b @ deriv(t) - 1.0 / density(t) for t in all_trees(pmax)])


def exact_shift(t, c):
    """Coefficient of the exact flow over ``c`` steps."""
    return c ** _order(t) / density(t)


def exact_shift_deriv(t, c):
    return prod(exact_shift(ch, c) for ch in t)


def tsrk_residuals(d, theta, ahat, A, bhat, b, pmax, xp=np, stage_order=0, e=None, eps=0.0):
    """Two-step RK with a stored stage value yt and its derivative F(yt).

    y_1     = d_1 u_{n-1} + (1-d_1) u_n
    y_i     = e_i yt + d_i u_{n-1} + (1-e_i-d_i) u_n + tau*ahat_i F(yt) + tau*sum_j a_ij F(y_j)
    u_{n+1} = eps yt + theta u_{n-1} + (1-eps-theta) u_n + tau*bhat F(yt) + tau*sum_j b_j F(y_j)

    yt is y_1 of the previous step, d_1 u_{n-2} + (1-d_1) u_{n-1}; with d_1 = 0
    it is u_{n-1}.  With ``stage_order`` q > 0 the stage residuals for trees
    of order <= q are prepended (stage i approximates u(t_n + c_i tau)).
    """
    d, ahat, A, b = (xp.asarray(x) for x in (d, ahat, A, b))
    s = len(b)
    e = xp.zeros(s) if e is None else xp.asarray(e)
    d1 = d[0]
    eta = {}

    def prev(t):
        return d1 * exact_shift(t, -2) + (1.0 - d1) * exact_shift(t, -1)

    def prev_deriv(t):
        return prod((prev(c) for c in t), start=1.0)

    def deriv(t):
        return prod((stage(c) for c in t), start=xp.ones(s))

    def stage(t):
        if t not in eta:
            eta[t] = e * prev(t) + d * exact_shift(t, -1) + ahat * prev_deriv(t) + A @ deriv(t)
        return eta[t]

    res = []
    if stage_order:
        c = -e * (1.0 + d1) - d + ahat + A.sum(axis=1)
        for t in all_trees(stage_order):
            res.extend(stage(t) - c ** _order(t) / density(t))
    for t in all_trees(pmax):
        lhs = eps * prev(t) + theta * exact_shift(t, -1) + bhat * prev_deriv(t) + b @ deriv(t)
        res.append(lhs - exact_shift(t, 1))
    return xp.stack(res)


if __name__ == "__main__":
    print([len(trees(p)) for p in range(1, 9)])
