r"""Field state in a translationally invariant dispersive medium.

Per momentum :math:`k` the equal-time correlators are

.. math::

    g_k = \int_0^\infty \frac{d\omega}{\omega^2\epsilon(k, i\omega) + k^2},\qquad
    h_k = \int_0^\infty d\omega\,
          \frac{k^2 + 4\pi\omega^2\chi(k, i\omega)}{\omega^2\epsilon(k, i\omega) + k^2},

and the mode is characterised by :math:`\mu_k = (2/\pi)\sqrt{g_k h_k}`.

Numerically :math:`\mu_k - 1` falls below :math:`10^{-18}` at large :math:`k`,
far below the rounding error of :math:`g_k h_k`. The correlators are therefore
split around the exactly solvable plasma reference with the same
high-frequency mass :math:`m^2`, :math:`K^2 = k^2 + m^2`,
:math:`g^P = \pi/2K`, :math:`h^P = \pi K/2` (for which
:math:`g^P h^P = \pi^2/4`). With the closed-form residual
:math:`r(\omega) = m^2 - 4\pi\omega^2\chi` and
:math:`D = \omega^2 + K^2 - r = \omega^2 + k^2 + 4\pi\omega^2\chi`,

.. math::

    g_k - g^P = \int \frac{r}{(\omega^2+K^2) D},\quad
    h_k - h^P = -\int \frac{r\,\omega^2}{(\omega^2+K^2) D},\quad
    g_k h_k - \frac{\pi^2}{4} = \frac{\pi}{2K}\int\frac{r (K^2-\omega^2)}{(\omega^2+K^2) D}
        + (g_k - g^P)(h_k - h^P),

none of which cancels catastrophically.

Radial momentum integrals use the measure :math:`d^dk/(2\pi)^d`. The free
photon energy entering the effective temperature is :math:`E_k = k`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, partial

import numpy as np
from scipy.special import j0

from .errors import DomainError, UnphysicalStateError
from .gaussian import PHYSICAL_TOL, occupation_entropy
from .numerics import (DEFAULT_TOL, fit_log_power, integrate_interval,
                       integrate_semi_infinite)
from .parallel import parallel_map

LN10 = math.log(10.0)
RADIAL_FACTOR = {1: 1.0 / np.pi, 2: 1.0 / (2.0 * np.pi), 3: 1.0 / (2.0 * np.pi ** 2)}


@dataclass(frozen=True)
class ModeDiagnostics:
    """State of one momentum mode.

    ``u_k`` is ``inf`` and ``T_k`` is 0 for a pure mode (``mu_k == 1``).
    ``mu_minus_one`` keeps full relative precision where ``mu_k`` rounds to 1.
    """

    k: float
    g_k: float
    h_k: float
    mu_k: float
    u_k: float
    n_k: float
    T_k: float
    mu_minus_one: float
    err_bound: float

    columns = ("k", "g_k", "h_k", "mu_k", "u_k", "n_k", "T_k")

    def row(self):
        return {c: getattr(self, c) for c in self.columns}


@dataclass(frozen=True)
class CutoffRecord:
    cutoff: float
    entropy_density: float
    err_bound: float

    columns = ("cutoff", "entropy_density", "err_bound")

    def row(self):
        return {c: getattr(self, c) for c in self.columns}


@dataclass(frozen=True)
class VarianceRecord:
    eps_ir: float
    k_max: float
    variance: float
    err_bound: float

    columns = ("eps_ir", "k_max", "variance", "err_bound")

    def row(self):
        return {c: getattr(self, c) for c in self.columns}


@dataclass(frozen=True)
class KernelRecord:
    r: float
    kernel: float

    columns = ("r", "kernel")

    def row(self):
        return {c: getattr(self, c) for c in self.columns}


def _check_k(k):
    if not np.isfinite(k) or k < 0:
        raise DomainError(f"momentum must be finite and >= 0, got {k!r}")


@lru_cache(maxsize=200_000)
def _correlators(model, k, tol):
    """(g, h, gh - pi^2/4, error bound on the last) for one mode; cached."""
    _check_k(k)
    eps_inf = model.eps_inf(k)
    kp = k / math.sqrt(eps_inf)
    m2 = model.mass2(k)
    K2 = kp * kp + m2
    if K2 <= 0:
        raise DomainError("k = 0 is only allowed for models with a plasma mass")
    K = math.sqrt(K2)
    if kp == 0 and float(model.loading(np.array([0.0]), k)[0]) <= 0:
        raise DomainError(f"correlators diverge at k = {k!r} for model {model.name!r}")

    def common(w):
        w2 = w * w
        r = model.residual(w, k)
        return r, w2, r / ((w2 + K2) * (w2 + kp * kp + model.loading(w, k)))

    hints = [kp, K, *model.frequency_scales()]
    hints += [kp * kp / s for s in model.frequency_scales() if s > 0]
    dg = integrate_semi_infinite(lambda w: common(w)[2], tol, breakpoints=hints)
    dh = integrate_semi_infinite(lambda w: -common(w)[1] * common(w)[2], tol, breakpoints=hints)
    cross = integrate_semi_infinite(lambda w: (K2 - w * w) * common(w)[2], tol, breakpoints=hints)
    g = (0.5 * np.pi / K + dg.value) / eps_inf
    h = (0.5 * np.pi * K + dh.value) * eps_inf
    excess = 0.5 * np.pi / K * cross.value + dg.value * dh.value
    err = (0.5 * np.pi / K * cross.error_estimate + abs(dg.value) * dh.error_estimate
           + abs(dh.value) * dg.error_estimate)
    return g, h, excess, err


def g_of_k(model, k, tol=DEFAULT_TOL):
    """Equal-time field correlator g_k."""
    return _correlators(model, float(k), tol)[0]


def h_of_k(model, k, tol=DEFAULT_TOL):
    """Equal-time momentum correlator h_k (point-split)."""
    return _correlators(model, float(k), tol)[1]


def _mu_minus_one(model, k, tol):
    g, h, excess, err = _correlators(model, float(k), tol)
    mu2m1 = 4.0 * excess / np.pi ** 2
    d = mu2m1 / (math.sqrt(1.0 + mu2m1) + 1.0)
    if d < -PHYSICAL_TOL:
        raise UnphysicalStateError(f"mu_k - 1 = {d!r} < 0 at k = {k!r}", value=1.0 + d)
    return max(d, 0.0), 2.0 * err / np.pi ** 2


def mode_diagnostics(model, k, tol=DEFAULT_TOL):
    """All per-mode quantities: correlators, mu_k, u_k, occupation, temperature."""
    k = float(k)
    g, h, _, _ = _correlators(model, k, tol)
    d, err = _mu_minus_one(model, k, tol)
    n = 0.5 * d
    u = math.log1p(1.0 / n) if n > 0 else math.inf
    temperature = k * k / u if n > 0 else 0.0
    return ModeDiagnostics(k, g, h, 1.0 + d, u, n, temperature, d, err)


def mode_scan(model, ks, tol=DEFAULT_TOL, workers=1):
    return parallel_map(partial(mode_diagnostics, model, tol=tol), [float(k) for k in ks], workers)


# ---------------------------------------------------------------- radial integrals

def _mode_quantity(model, quantity, tol, k):
    d, _ = _mu_minus_one(model, k, tol)
    n = 0.5 * d
    if quantity == "entropy":
        return float(occupation_entropy(n))
    if quantity == "variance":
        return n * (1.0 + n)
    if quantity == "count":
        return n
    if quantity == "energy":
        return k * n
    raise ValueError(quantity)


def _panel(model, quantity, dim, tol, panel_tol, bounds):
    """Integral of k^dim * q(k) over log k in [a, b] (without the radial factor)."""
    a, b = bounds

    def integrand(t):
        ks = np.exp(t)
        q = np.array([_mode_quantity(model, quantity, tol, float(k)) for k in ks])
        return ks ** dim * q

    res = integrate_interval(integrand, a, b, panel_tol, abs_tol=1e-300)
    return res.value, res.error_estimate


def _log_edges(k_lo, k_hi, panels_per_decade):
    """Panel edges in log k on the fixed lattice 10**(j / panels_per_decade)."""
    j_lo = math.floor(math.log10(k_lo) * panels_per_decade + 1e-9)
    j_hi = math.ceil(math.log10(k_hi) * panels_per_decade - 1e-9)
    edges = [j * LN10 / panels_per_decade for j in range(j_lo, j_hi + 1)]
    edges[0] = math.log(k_lo)
    edges[-1] = math.log(k_hi)
    return [e for i, e in enumerate(edges) if i == 0 or e > edges[i - 1]]


def radial_integral(model, quantity, k_lo, k_hi, dim, tol=DEFAULT_TOL, *,
                    panels_per_decade=4, panel_tol=1e-7, ir_tail=False, workers=1):
    """Integral of ``q(k)`` over the shell ``k_lo <= |k| <= k_hi`` with d^dk/(2 pi)^d.

    ``quantity`` is one of ``entropy`` (h(mu_k)), ``variance`` (n(1+n)),
    ``count`` (n) or ``energy`` (k n). With ``ir_tail`` the ball below ``k_lo``
    is added assuming ``k^d q(k)`` scales as ``k^d`` there; that piece is also
    counted in the error bound.

    Returns ``(value, err_bound)``.
    """
    if dim not in RADIAL_FACTOR:
        raise DomainError(f"dimension must be 1, 2 or 3, got {dim!r}")
    if not 0 < k_lo < k_hi:
        raise DomainError(f"need 0 < k_lo < k_hi, got {k_lo!r}, {k_hi!r}")
    edges = _log_edges(k_lo, k_hi, panels_per_decade)
    panels = list(zip(edges[:-1], edges[1:]))
    results = parallel_map(partial(_panel, model, quantity, dim, tol, panel_tol), panels, workers)
    value = math.fsum(v for v, _ in results)
    err = math.fsum(e for _, e in results)
    if ir_tail:
        piece = k_lo ** dim * _mode_quantity(model, quantity, tol, k_lo) / dim
        value += piece
        err += abs(piece)
    c = RADIAL_FACTOR[dim]
    return c * value, c * err


def entropy_density(model, cutoff, dim=3, tol=DEFAULT_TOL, *, k_floor=1e-4,
                    panels_per_decade=4, workers=1):
    """Field entropy per unit volume with all modes ``|k| <= cutoff``."""
    value, _ = _entropy_density(model, cutoff, dim, tol, k_floor, panels_per_decade, workers)
    return value


def _entropy_density(model, cutoff, dim, tol, k_floor, panels_per_decade, workers):
    if not cutoff > 0:
        raise DomainError("cutoff must be positive")
    k_lo = min(k_floor, cutoff / 10.0)
    return radial_integral(model, "entropy", k_lo, cutoff, dim, tol,
                           panels_per_decade=panels_per_decade, ir_tail=True, workers=workers)


def cutoff_scan(model, cutoffs, dim=3, tol=DEFAULT_TOL, *, k_floor=1e-4,
                panels_per_decade=4, workers=1, fit=True):
    """Entropy density for each cutoff plus a ``a + b (log cutoff)^p`` fit.

    All cutoffs share one panel lattice, so the integral is accumulated once
    from the smallest to the largest cutoff.

    Returns
    -------
    (list of CutoffRecord, FitResult or None)
    """
    cutoffs = sorted(float(c) for c in cutoffs)
    if len(cutoffs) < 1 or cutoffs[0] <= 0:
        raise DomainError("cutoffs must be positive")
    k_lo = min(k_floor, cutoffs[0] / 10.0)
    if dim not in RADIAL_FACTOR:
        raise DomainError(f"dimension must be 1, 2 or 3, got {dim!r}")
    edges = _log_edges(k_lo, cutoffs[-1], panels_per_decade)
    edges = sorted(set(edges) | {math.log(c) for c in cutoffs})
    panels = list(zip(edges[:-1], edges[1:]))
    results = parallel_map(partial(_panel, model, "entropy", dim, tol, 1e-7), panels, workers)
    c = RADIAL_FACTOR[dim]
    ir = k_lo ** dim * _mode_quantity(model, "entropy", tol, k_lo) / dim
    records = []
    value, err = [ir], [abs(ir)]
    targets = iter(cutoffs)
    target = next(targets)
    for (a, b), (v, e) in zip(panels, results):
        value.append(v)
        err.append(e)
        while target is not None and abs(b - math.log(target)) < 1e-12:
            records.append(CutoffRecord(target, c * math.fsum(value), c * math.fsum(err)))
            target = next(targets, None)
    fit_result = None
    if fit and len(records) >= 3 and all(r.cutoff > 1 for r in records):
        fit_result = fit_log_power([r.cutoff for r in records],
                                   [r.entropy_density for r in records])
    return records, fit_result


def number_variance(model, k_max, dim, eps_ir, tol=DEFAULT_TOL, *, panels_per_decade=4):
    """Mode-number variance ``int d^dk/(2pi)^d n_k (1 + n_k)`` over ``eps_ir <= |k| <= k_max``."""
    if not 0 < eps_ir < k_max:
        raise DomainError("need 0 < eps_ir < k_max")
    return radial_integral(model, "variance", eps_ir, k_max, dim, tol,
                           panels_per_decade=panels_per_decade)[0]


def variance_scan(model, k_max, dim, eps_values, tol=DEFAULT_TOL, workers=1):
    out = []
    for eps in eps_values:
        v, e = radial_integral(model, "variance", float(eps), float(k_max), dim, tol,
                               workers=workers)
        out.append(VarianceRecord(float(eps), float(k_max), v, e))
    return out


def occupation_moments(model, k_max, dim, eps_ir, tol=DEFAULT_TOL):
    """Occupied-mode count and energy (``E_k = k``) per unit volume below ``k_max``."""
    count = radial_integral(model, "count", eps_ir, k_max, dim, tol)[0]
    energy = radial_integral(model, "energy", eps_ir, k_max, dim, tol)[0]
    return count, energy


def _radial_fourier(dim, k, r):
    kr = np.outer(r, k)
    if dim == 1:
        return np.cos(kr) * RADIAL_FACTOR[1]
    if dim == 2:
        return j0(kr) * k * RADIAL_FACTOR[2]
    return np.sinc(kr / np.pi) * k * k * RADIAL_FACTOR[3]


def heff_kernel(model, beta, r_values, dim=1, tol=DEFAULT_TOL, *, k_cut=1.0, dk=None,
                workers=1):
    r"""Real-space kernel :math:`\beta^{-1}\int d^dk/(2\pi)^d\, u_k e^{ik\cdot r}`.

    ``u_k`` grows logarithmically at large ``k``, so the transform is taken
    with a Gaussian window ``exp(-(k/k_cut)^2)`` on a fixed midpoint grid
    covering ``[0, 6 k_cut]`` with spacing ``dk`` (default
    ``min(pi / (8 r_max), k_cut / 50)``).

    Raises
    ------
    DomainError
        If some sampled mode is pure (``u_k`` infinite).
    """
    if dim not in RADIAL_FACTOR:
        raise DomainError(f"dimension must be 1, 2 or 3, got {dim!r}")
    if not beta > 0:
        raise DomainError("beta must be positive")
    r = np.asarray(r_values, dtype=float)
    r_max = float(np.max(np.abs(r))) if r.size else 1.0
    if dk is None:
        dk = min(np.pi / (8.0 * max(r_max, 1e-12)), k_cut / 50.0)
    n = int(math.ceil(6.0 * k_cut / dk))
    k = (np.arange(n) + 0.5) * dk
    modes = mode_scan(model, k, tol, workers)
    u = np.array([m.u_k for m in modes])
    if not np.all(np.isfinite(u)):
        bad = float(k[~np.isfinite(u)][0])
        raise DomainError(f"u_k is infinite (pure mode) at k = {bad!r}; no finite kernel")
    weights = u * np.exp(-(k / k_cut) ** 2) * dk / beta
    values = _radial_fourier(dim, k, np.abs(r)) @ weights
    return [KernelRecord(float(ri), float(v)) for ri, v in zip(r, values)]
