"""Quadrature and curve fitting shared by the physics modules."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, NumericalError

DEFAULT_TOL = 1e-9

# Gauss-Kronrod (7, 15) on [-1, 1]; Kronrod nodes in decreasing order, the
# Gauss nodes are the odd-indexed ones.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(15)
G_WEIGHTS[1:7:2] = _WG[:3]
G_WEIGHTS[7] = _WG[3]
G_WEIGHTS[9:14:2] = _WG[2::-1]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


def gauss_kronrod(f, a, b):
    """Apply the (7, 15) rule to each panel ``[a_i, b_i]``.

    ``f`` must accept an array of abscissae. Returns ``(kronrod, error)``
    arrays, the error being ``|K15 - G7|``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * GK_NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    k = h * (fx @ GK_WEIGHTS)
    g = h * (fx @ G_WEIGHTS)
    return k, np.abs(k - g)


def _hint_breakpoints(hints, factor=10.0):
    hints = sorted({float(h) for h in hints if np.isfinite(h) and h > 0})
    if not hints:
        hints = [1.0]
    points = [hints[0]]
    for h in hints[1:]:
        while h > points[-1] * factor * 1.0000001:
            points.append(points[-1] * factor)
        if h > points[-1] * 1.0000001:
            points.append(h)
    return points


def integrate_semi_infinite(f, tol=DEFAULT_TOL, *, breakpoints=(), abs_tol=0.0,
                            max_panels=20000, tail_factor=8.0):
    r"""Integrate a vectorized ``f`` over :math:`[0, \infty)`.

    The finite part :math:`[0, \Omega^*]` is split at ``breakpoints`` (and at
    decade steps between them); the tail beyond
    :math:`\Omega^* = \text{tail\_factor} \cdot \max(\text{breakpoints})` is
    mapped to :math:`t \in (0, 1]` by :math:`\omega = \Omega^*/t`. All panels
    use the (7, 15) Gauss-Kronrod pair and are refined together until the
    summed error estimate is below ``max(tol * |value|, abs_tol)`` or a
    round-off floor.

    The refinement sequence does not depend on ``tol``: a smaller ``tol`` only
    continues the same sequence further.

    Raises
    ------
    NumericalError
        If ``max_panels`` is exceeded; ``err.partial`` holds the current value.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    points = _hint_breakpoints(breakpoints)
    omega_star = tail_factor * points[-1]
    edges = np.array([0.0] + points + [omega_star])

    def tail(t):
        w = omega_star / t
        return f(w) * (w * w / omega_star)

    kinds = (f, tail)
    # panels: arrays of (kind, a, b, value, error)
    kind = np.concatenate([np.zeros(len(edges) - 1, dtype=int), [1]])
    lo = np.concatenate([edges[:-1], [0.0]])
    hi = np.concatenate([edges[1:], [1.0]])
    val = np.empty(len(lo))
    err = np.empty(len(lo))
    evaluations = 0

    def evaluate(kd, a, b):
        v = np.empty(len(a))
        e = np.empty(len(a))
        for k_id, func in enumerate(kinds):
            sel = kd == k_id
            if np.any(sel):
                v[sel], e[sel] = gauss_kronrod(func, a[sel], b[sel])
        return v, e

    val, err = evaluate(kind, lo, hi)
    evaluations += 15 * len(lo)
    while True:
        order = np.lexsort((lo, kind))
        total = math.fsum(val[order])
        err_total = math.fsum(err[order])
        floor = 50.0 * np.finfo(float).eps * math.fsum(np.abs(val[order]))
        target = max(tol * abs(total), abs_tol, floor)
        if not np.isfinite(total):
            raise NumericalError("non-finite integrand value", partial=total)
        if err_total <= target:
            return QuadratureResult(total, err_total, evaluations)
        split = err >= 0.25 * err.max()
        if len(lo) + np.count_nonzero(split) > max_panels:
            raise NumericalError(
                f"quadrature did not converge (error {err_total:.3e} > {target:.3e})",
                partial=total, residual=err_total,
            )
        mid = 0.5 * (lo[split] + hi[split])
        new_kind = np.concatenate([kind[split], kind[split]])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_val, new_err = evaluate(new_kind, new_lo, new_hi)
        evaluations += 15 * len(new_lo)
        keep = ~split
        kind = np.concatenate([kind[keep], new_kind])
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])


def integrate_interval(f, a, b, tol=DEFAULT_TOL, *, abs_tol=0.0, initial=1, max_panels=20000):
    """Adaptive (7, 15) Gauss-Kronrod integral of a vectorized ``f`` over [a, b]."""
    edges = np.linspace(a, b, initial + 1)
    lo, hi = edges[:-1], edges[1:]
    val, err = gauss_kronrod(f, lo, hi)
    evaluations = 15 * len(lo)
    while True:
        order = np.argsort(lo)
        total = math.fsum(val[order])
        err_total = math.fsum(err[order])
        floor = 50.0 * np.finfo(float).eps * math.fsum(np.abs(val[order]))
        if err_total <= max(tol * abs(total), abs_tol, floor):
            return QuadratureResult(total, err_total, evaluations)
        split = err >= 0.25 * err.max()
        if len(lo) + np.count_nonzero(split) > max_panels:
            raise NumericalError("quadrature did not converge", partial=total, residual=err_total)
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        nv, ne = gauss_kronrod(f, new_lo, new_hi)
        evaluations += 15 * len(new_lo)
        lo = np.concatenate([lo[~split], new_lo])
        hi = np.concatenate([hi[~split], new_hi])
        val = np.concatenate([val[~split], nv])
        err = np.concatenate([err[~split], ne])


@dataclass(frozen=True)
class FitResult:
    exponent: float
    prefactor: float
    offset: float
    r_squared: float
    window: tuple

    def as_dict(self):
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "offset": self.offset,
            "r_squared": self.r_squared,
        }


def _r_squared(y, yhat):
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)


def linear_fit(x, y):
    """Ordinary least squares ``y = slope * x + intercept``; returns (slope, intercept, r2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(slope), float(intercept), _r_squared(y, A @ [slope, intercept])


def _loglog(x, y):
    lx, ly = np.log(x), np.log(y)
    slope, intercept, r2 = linear_fit(lx, ly)
    sse = float(np.sum((ly - slope * lx - intercept) ** 2))
    return slope, intercept, r2, sse


def fit_power_law(x, y, offset=False):
    """Fit ``y = c * x**p`` (or ``y = y_inf + c * x**p``) by log-log least squares.

    With ``offset=True`` the constant ``y_inf`` is profiled: for each trial
    value the log-log fit of ``y - y_inf`` is solved, and the trial with the
    smallest residual is kept. Data must be monotone for a meaningful offset.

    Returns
    -------
    FitResult
        ``exponent = p``, ``prefactor = c``, ``offset = y_inf`` (0 without
        profiling); ``r_squared`` is computed in log-log coordinates.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3 or len(x) != len(y):
        raise DomainError("fit_power_law needs at least 3 (x, y) pairs")
    if np.any(x <= 0):
        raise DomainError("abscissae must be positive")
    y_inf = 0.0
    if offset:
        span = float(np.max(y) - np.min(y))
        if span <= 0:
            raise DomainError("constant data; offset cannot be profiled")
        sign = 1.0 if y[np.argmin(x)] > y[np.argmax(x)] else -1.0
        # y_inf lies beyond the tail-end value; search the gap on a log grid, then refine
        tail_val = float(y[np.argmax(x)])

        def sse(log_gap):
            resid = sign * (y - (tail_val - sign * np.exp(log_gap)))
            if np.any(resid <= 0):
                return np.inf
            return _loglog(x, resid)[3]

        grid = np.linspace(math.log(1e-12 * span), math.log(10.0 * span), 241)
        vals = np.array([sse(g) for g in grid])
        i = int(np.argmin(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        res = minimize_scalar(sse, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        best = res.x if res.fun <= vals[i] else grid[i]
        y_inf = float(tail_val - sign * math.exp(best))
        resid = sign * (y - y_inf)
    else:
        resid = y
        sign = 1.0
    if np.any(resid <= 0):
        raise DomainError("non-positive data after offset subtraction")
    slope, intercept, r2, _ = _loglog(x, resid)
    return FitResult(float(slope), float(sign * np.exp(intercept)), y_inf, r2,
                     (float(np.min(x)), float(np.max(x))))


def fit_log_power(cutoffs, values, p_bounds=(0.5, 5.0), grid_step=0.01):
    """Fit ``S = a + b * (log L)**p`` over cutoffs ``L``.

    A grid over ``p`` with an inner linear solve for ``(a, b)`` locates the
    minimum, which is then refined with a bounded scalar minimization.

    Returns
    -------
    FitResult
        ``exponent = p``, ``prefactor = b``, ``offset = a``.
    """
    cutoffs = np.asarray(cutoffs, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(cutoffs) < 3 or len(cutoffs) != len(values):
        raise DomainError("fit_log_power needs at least 3 points")
    if np.any(cutoffs <= 1.0):
        raise DomainError("cutoffs must exceed 1 so that log(cutoff) > 0")
    x = np.log(cutoffs)

    def solve(p):
        A = np.column_stack([np.ones_like(x), x ** p])
        if np.linalg.cond(A) > 1e14:
            raise NumericalError("degenerate design matrix in fit_log_power")
        coef, *_ = np.linalg.lstsq(A, values, rcond=None)
        return coef, float(np.sum((A @ coef - values) ** 2))

    grid = np.arange(p_bounds[0], p_bounds[1] + 0.5 * grid_step, grid_step)
    sse = np.array([solve(p)[1] for p in grid])
    i = int(np.argmin(sse))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda p: solve(p)[1], bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    p = float(res.x) if res.fun <= sse[i] else float(grid[i])
    (a, b), _ = solve(p)
    r2 = _r_squared(values, a + b * x ** p)
    return FitResult(p, float(b), float(a), r2, (float(cutoffs.min()), float(cutoffs.max())))
