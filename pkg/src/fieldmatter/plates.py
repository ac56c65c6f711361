r"""Two thin plates on a 1-D lattice, coupled through a scalar field.

The field is integrated out, leaving a matter field :math:`\psi` on the two
body sites ``0`` and ``L`` with the Euclidean kernel

.. math::

    M(\omega) = \frac{\omega^2 + \omega_0^2}{8\pi^2} I
                + \omega_p^2 \omega^2 G_0^B(\omega, k_\perp),\qquad
    G_0(n, m) = \frac{e^{-q|n-m|}}{2\sinh q},\quad
    \cosh q = 1 + \frac{\omega^2 + k_\perp^2}{2}.

The equal-time correlators are

.. math::

    \mathcal G = \int_0^\infty \frac{d\omega}{2\pi} M^{-1},\qquad
    \mathcal H = -\frac{1}{16\pi^4}\int_0^\infty \frac{d\omega}{2\pi}
                 \left[\omega^2 M^{-1} - 8\pi^2 I\right].

Both matrices have equal diagonals, so they commute and the symplectic pair
is :math:`\lambda_\pm^2 = (\mathcal G_{00} \pm \mathcal G_{01})
(\mathcal H_{00} \pm \mathcal H_{01})` with :math:`\mu_\pm = 2\lambda_\pm`
(the decoupled product is 1/4).

The distance dependence is tiny compared to the entropy itself, so every
matrix element is split into its single-body value plus a separately
integrated correction, and entropy differences are formed without
subtracting nearly equal numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache, partial

import numpy as np

from .errors import DomainError, NumericalError
from .gaussian import occupation_entropy
from .numerics import DEFAULT_TOL, fit_power_law, integrate_interval, integrate_semi_infinite
from .parallel import parallel_map

EIGHT_PI2 = 8.0 * np.pi ** 2
H_PREFACTOR = 1.0 / (16.0 * np.pi ** 4)
TRANSVERSE_MEASURE = {1: lambda k: np.full_like(k, 1.0 / np.pi),
                      2: lambda k: k / (2.0 * np.pi)}


@dataclass(frozen=True)
class PlateSystem:
    """Two body sites ``{0, L}`` on a chain; ``d_perp`` transverse dimensions."""

    L: int
    omega_0: float
    omega_p: float
    d_perp: int = 0

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise DomainError(f"L must be an integer >= 1, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))
        if not self.omega_0 > 0:
            raise DomainError("omega_0 must be positive")
        if not 0 <= self.omega_p <= self.omega_0:
            raise DomainError("need 0 <= omega_p <= omega_0")
        if self.d_perp not in (0, 1, 2):
            raise DomainError("d_perp must be 0, 1 or 2")

    def at(self, L):
        return replace(self, L=int(L))


@dataclass(frozen=True)
class PlateRecord:
    L: int
    k_perp_dim: int
    S: float
    S_R: float
    lambda_plus: float
    lambda_minus: float
    err_bound: float

    columns = ("L", "k_perp_dim", "S", "S_R", "lambda_plus", "lambda_minus", "err_bound")

    def row(self):
        return {c: getattr(self, c) for c in self.columns}


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Closed-form large-L coefficients next to the directly integrated values.

    ``theta`` is ``A_G A_H / (64 pi^6)`` from the closed forms;
    ``theta_numeric`` is the integrated single-body product ``G_00 H_00``,
    which is 1/4 for a decoupled site. The two differ by orders of magnitude
    because the closed-form prefactors are not normalized like the integrals.
    """

    A_G: float
    A_H: float
    theta: float
    theta_large_omega0: float
    theta_numeric: float
    splitting_coefficient: float
    entropy_coefficient: float

    def as_dict(self):
        return dict(self.__dict__)


# ---------------------------------------------------------------- propagator

def _propagator_parts(omega, k_perp):
    """(omega^2 G0(0,0), q) with the diagonal already multiplied by omega^2."""
    s = omega * omega + k_perp * k_perp
    root = np.sqrt(s)
    c = np.sqrt(1.0 + 0.25 * s)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = np.where(s > 0, omega * omega / (2.0 * np.where(s > 0, root, 1.0) * c), 0.0)
    q = 2.0 * np.arcsinh(0.5 * root)
    return diag, q


def lattice_propagator(n, m, omega, k_perp=0.0):
    """Free lattice Green's function ``exp(-q |n - m|) / (2 sinh q)``."""
    s = np.asarray(omega, dtype=float) ** 2 + k_perp ** 2
    if np.any(s <= 0):
        raise DomainError("propagator diverges at omega = k_perp = 0")
    q = 2.0 * np.arcsinh(0.5 * np.sqrt(s))
    sinh_q = np.sqrt(s) * np.sqrt(1.0 + 0.25 * s)
    return np.exp(-q * abs(n - m)) / (2.0 * sinh_q)


def kernel_matrix(sys, omega, k_perp=0.0):
    """2 x 2 Euclidean kernel M(omega) on the body sites."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    base = (omega ** 2 + sys.omega_0 ** 2) / EIGHT_PI2
    w2 = sys.omega_p ** 2 * omega ** 2
    g00 = lattice_propagator(0, 0, omega, k_perp)
    g01 = lattice_propagator(0, sys.L, omega, k_perp)
    return np.array([[base + w2 * g00, w2 * g01], [w2 * g01, base + w2 * g00]])


# ---------------------------------------------------------------- correlators

@lru_cache(maxsize=100_000)
def _elements(omega_0, omega_p, L, k_perp, tol):
    """Single-body values and two-body corrections of G and H, with error estimates.

    Returns a dict with keys ``G_inf, H_inf, dG00, G01, dH00, H01`` mapping to
    ``(value, error)``. ``L = 0`` means a single isolated body.
    """
    def parts(w):
        diag, q = _propagator_parts(w, k_perp)
        od = omega_p ** 2 * diag
        base = (w * w + omega_0 ** 2) / EIGHT_PI2
        a = base + od
        if L == 0:
            return a, od, np.zeros_like(w), a, a
        e = np.exp(-q * L)
        o = od * e
        return a, od, o, base - od * np.expm1(-q * L), a + o

    def g_inf(w):
        return 1.0 / parts(w)[0]

    def h_inf(w):
        a, od, *_ = parts(w)
        return H_PREFACTOR * (omega_0 ** 2 + EIGHT_PI2 * od) / a

    def dg00(w):
        a, _, o, amo, apo = parts(w)
        return o * o / (a * amo * apo)

    def g01(w):
        _, _, o, amo, apo = parts(w)
        return -o / (amo * apo)

    def dh00(w):
        a, _, o, amo, apo = parts(w)
        return -H_PREFACTOR * w * w * o * o / (a * amo * apo)

    def h01(w):
        _, _, o, amo, apo = parts(w)
        return H_PREFACTOR * w * w * o / (amo * apo)

    hints = [omega_0, 1.0, omega_p, k_perp] + ([1.0 / L] if L else [])
    out = {}
    fns = {"G_inf": g_inf, "H_inf": h_inf}
    if L and omega_p > 0:
        fns.update(dG00=dg00, G01=g01, dH00=dh00, H01=h01)
    for name, fn in fns.items():
        res = integrate_semi_infinite(fn, tol, breakpoints=hints)
        out[name] = (res.value / (2.0 * np.pi), res.error_estimate / (2.0 * np.pi))
    for name in ("dG00", "G01", "dH00", "H01"):
        out.setdefault(name, (0.0, 0.0))
    return out


def _elements_for(sys, k_perp, tol, L=None):
    L = sys.L if L is None else L
    return _elements(float(sys.omega_0), float(sys.omega_p), int(L), float(k_perp), tol)


def psi_correlator(sys, k_perp=0.0, tol=DEFAULT_TOL):
    """Equal-time matter-field correlator (2 x 2)."""
    el = _elements_for(sys, k_perp, tol)
    d = el["G_inf"][0] + el["dG00"][0]
    return np.array([[d, el["G01"][0]], [el["G01"][0], d]])


def pi_correlator(sys, k_perp=0.0, tol=DEFAULT_TOL):
    """Equal-time conjugate-momentum correlator (2 x 2)."""
    el = _elements_for(sys, k_perp, tol)
    d = el["H_inf"][0] + el["dH00"][0]
    return np.array([[d, el["H01"][0]], [el["H01"][0], d]])


@dataclass(frozen=True)
class _Pair:
    lam_inf: float
    n_inf: float
    lam: tuple          # (lambda_plus, lambda_minus)
    shift: tuple        # lambda_pm - lambda_inf, computed without cancellation
    err: tuple          # error bounds on the shifts


def _pair(sys, k_perp, tol, L=None):
    el = _elements_for(sys, k_perp, tol, L)
    G = el["G_inf"][0]
    H = el["H_inf"][0]
    lam_inf = math.sqrt(G * H)
    if sys.omega_p == 0:
        n_inf = 0.0
    else:
        n_inf = (G * H - 0.25) / (lam_inf + 0.5)
        if n_inf < -1e-8:
            raise NumericalError(f"single-body product G H = {G * H!r} below 1/4",
                                 residual=0.25 - G * H)
        n_inf = max(n_inf, 0.0)
    out = []
    for sign in (1.0, -1.0):
        dG = el["dG00"][0] + sign * el["G01"][0]
        dH = el["dH00"][0] + sign * el["H01"][0]
        delta = G * dH + H * dG + dG * dH
        lam = math.sqrt(lam_inf ** 2 + delta)
        # single-body errors are common to all L and drop out of S_R
        err_sq = (abs(H + dH) * (el["dG00"][1] + el["G01"][1])
                  + abs(G + dG) * (el["dH00"][1] + el["H01"][1]))
        out.append((lam, delta / (lam + lam_inf), err_sq / (2.0 * lam)))
    out.sort(key=lambda t: -t[0])
    if 2.0 * out[-1][0] < 1.0 - 1e-8:
        raise NumericalError(f"symplectic eigenvalue {2 * out[-1][0]!r} below one",
                             residual=1.0 - 2.0 * out[-1][0])
    return _Pair(lam_inf, n_inf, tuple(t[0] for t in out), tuple(t[1] for t in out),
                 tuple(t[2] for t in out))


def symplectic_pair(sys, k_perp=0.0, tol=DEFAULT_TOL):
    """``(lambda_plus, lambda_minus, mu_plus, mu_minus)``, descending; ``mu = 2 lambda``."""
    p = _pair(sys, k_perp, tol)
    lp, lm = p.lam
    return lp, lm, 2.0 * lp, 2.0 * lm


def entropy_shift(n, eps):
    """``F(n + eps) - F(n)`` for ``F(n) = (n+1) log(n+1) - n log n``, accurate for tiny ``eps``."""
    if n == 0:
        return float(occupation_entropy(max(eps, 0.0)))
    m = n + eps
    if m < 0:
        raise NumericalError(f"negative occupation {m!r}")
    tail = -eps * math.log(m) if m > 0 else 0.0
    return ((n + 1.0) * math.log1p(eps / (n + 1.0)) + eps * math.log(n + 1.0 + eps)
            - n * math.log1p(eps / n) + tail)


def _entropy_parts(sys, k_perp, tol, L=None):
    """(S, S - S_inf, error bound, lambda_plus, lambda_minus) at separation L."""
    p = _pair(sys, k_perp, tol, L)
    base = float(occupation_entropy(p.n_inf))
    delta = math.fsum(entropy_shift(p.n_inf, e) for e in p.shift)
    err = 0.0
    for lam, e in zip(p.lam, p.err):
        n = lam - 0.5
        err += e * (math.log1p(1.0 / n) if n > 0 else 0.0)
    return 2.0 * base + delta, delta, err, p.lam[0], p.lam[1]


def plate_entropy(sys, k_perp=0.0, tol=DEFAULT_TOL):
    """Matter entropy ``h(mu_+) + h(mu_-)`` (equal to the field entropy) at one k_perp."""
    return _entropy_parts(sys, k_perp, tol)[0]


def distance_entropy(sys, k_perp=0.0, tol=DEFAULT_TOL):
    """``S(L, k_perp) - S(inf, k_perp)`` evaluated without cancellation."""
    return _entropy_parts(sys, k_perp, tol)[1]


# ---------------------------------------------------------------- asymptotics

def theta_asymptotics(sys, tol=DEFAULT_TOL):
    """Closed-form large-L coefficients for ``omega_0 > 2`` plus the integrated theta."""
    w0, wp = float(sys.omega_0), float(sys.omega_p)
    if not w0 > 2:
        raise DomainError("closed-form asymptotics need omega_0 > 2")
    root = math.sqrt(w0 ** 2 - 4.0)
    acos = math.acos(2.0 / w0)
    A_G = (4.0 * np.pi ** 3 / w0
           - 32.0 * np.pi ** 4 * wp ** 2 * (w0 ** 2 * acos - 2.0 * root) / (w0 ** 2 * root ** 3))
    A_H = (w0 / (4.0 * np.pi)
           + 32.0 * np.pi ** 4 * wp ** 2 * (2.0 * root + (w0 ** 2 - 8.0) * acos) / root ** 3)
    theta = A_G * A_H / (64.0 * np.pi ** 6)
    large = 0.25 + 8.0 * np.pi * wp ** 2 / w0 ** 3 - 8.0 * np.pi ** 2 * wp ** 2 / w0 ** 4
    el = _elements_for(sys, 0.0, tol, L=0)
    numeric = el["G_inf"][0] * el["H_inf"][0]
    split = A_H * wp ** 2 / (4.0 * np.pi ** 2 * w0 ** 4 * math.sqrt(abs(theta)))
    return AsymptoticCoefficients(A_G, A_H, theta, large, numeric, split,
                                  32.0 * np.pi ** 7 * wp ** 2 / w0 ** 3)


def theta_numeric(omega_0, omega_p, tol=DEFAULT_TOL):
    """Integrated single-body product ``G_00 H_00`` (1/4 when decoupled)."""
    el = _elements(float(omega_0), float(omega_p), 0, 0.0, tol)
    return el["G_inf"][0] * el["H_inf"][0]


def theta_weak_coupling(omega_p, tol=DEFAULT_TOL):
    """``(integrated theta, closed form 1/4 + 2 pi w log(4/(e w)))`` at ``omega_0 = omega_p``."""
    closed = 0.25 + 2.0 * np.pi * omega_p * math.log(4.0 / (math.e * omega_p))
    return theta_numeric(omega_p, omega_p, tol), closed


# ---------------------------------------------------------------- scans

def _fit_positive(Ls, values):
    Ls = np.asarray(Ls, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(Ls) < 3 or np.any(values <= 0) or not np.all(np.isfinite(values)):
        return None
    return fit_power_law(Ls, values)


def _scan_point(sys, tol, L):
    return _entropy_parts(sys, 0.0, tol, L)


def entropy_vs_L(template, Ls, tol=DEFAULT_TOL, workers=1):
    """Entropy against separation with ``k_perp = 0``.

    ``S_R(L) = S(L) - S(L_ref)`` with ``L_ref = 8 max(Ls)``. The returned fit is a
    power law in ``S_R`` (``None`` if some ``S_R`` is not positive).

    Returns
    -------
    (list of PlateRecord, FitResult or None)
    """
    Ls = sorted(int(L) for L in Ls)
    if not Ls or Ls[0] < 1:
        raise DomainError("separations must be integers >= 1")
    L_ref = 8 * Ls[-1]
    points = parallel_map(partial(_scan_point, template, tol), Ls + [L_ref], workers)
    _, D_ref, err_ref, _, _ = points[-1]
    records = [PlateRecord(L, 0, S, D - D_ref, lp, lm, err + err_ref)
               for L, (S, D, err, lp, lm) in zip(Ls, points[:-1])]
    return records, _fit_positive(Ls, [r.S_R for r in records])


def _transverse_point(template, d, tol, cutoff_factor, L):
    sys = template.at(L)
    weight = TRANSVERSE_MEASURE[d]

    def integrand(k):
        return weight(k) * np.array([distance_entropy(sys, float(x), tol) for x in k])

    res = integrate_interval(integrand, 0.0, cutoff_factor / L, 1e-7, abs_tol=1e-300, initial=4)
    _, _, _, lp, lm = _entropy_parts(sys, 0.0, tol)
    return res.value, res.error_estimate, lp, lm


def entropy_vs_L_transverse(template, Ls, d_perp, tol=DEFAULT_TOL, cutoff_factor=40.0,
                            workers=1):
    """Distance-dependent entropy per transverse volume, ``int d^d k/(2 pi)^d [S(L,k) - S(inf,k)]``.

    The transverse integral is truncated at ``k_perp = cutoff_factor / L``,
    beyond which the integrand is exponentially small. ``S`` and ``S_R`` both
    hold this difference; ``lambda_pm`` are reported at ``k_perp = 0``.
    """
    if d_perp not in TRANSVERSE_MEASURE:
        raise DomainError("transverse dimension must be 1 or 2")
    Ls = sorted(int(L) for L in Ls)
    pts = parallel_map(partial(_transverse_point, template, d_perp, tol, cutoff_factor), Ls,
                       workers)
    records = [PlateRecord(L, d_perp, v, v, lp, lm, e) for L, (v, e, lp, lm) in zip(Ls, pts)]
    return records, _fit_positive(Ls, [r.S_R for r in records])


def transverse_support(sys, threshold=1e-6, tol=DEFAULT_TOL, k_max_factor=100.0, samples=400):
    """``k_perp`` at which ``S(L,k) - S(inf,k)`` first falls to ``threshold`` times its k=0 value.

    Located on a geometric grid up to ``k_max_factor / L`` and refined by
    log-linear interpolation.
    """
    ref = distance_entropy(sys, 0.0, tol)
    if ref <= 0:
        raise DomainError("no distance-dependent entropy at k_perp = 0")
    ks = np.geomspace(1e-3 / sys.L, k_max_factor / sys.L, samples)
    prev_k, prev_r = 0.0, 1.0
    for k in ks:
        r = distance_entropy(sys, float(k), tol) / ref
        if r <= threshold:
            if prev_k == 0.0 or r <= 0:
                return float(k)
            t = (math.log(threshold) - math.log(prev_r)) / (math.log(r) - math.log(prev_r))
            return float(math.exp(math.log(prev_k) + t * (math.log(k) - math.log(prev_k))))
        prev_k, prev_r = float(k), r
    raise NumericalError("integrand did not fall below the threshold on the scanned range")
