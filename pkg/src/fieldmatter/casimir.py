r"""Contour representation of the distance-dependent entropy of two bodies.

For :math:`\Gamma = \mathcal G\mathcal H` (decoupled value 1/4) and
:math:`K_X = (\Gamma_X - 1/4)/(x - 1/4 + i\varsigma)`,

.. math::

    S_R = -\frac{1}{\pi}\int_{1/2 - i\infty}^{1/2 + i\infty} dx\,
      \frac{\log\frac{\sqrt x + 1/2}{\sqrt x - 1/2}}{2\sqrt x}\,
      \mathrm{Tr}\log\Big(1 - (1-K_A)^{-1}(K_A K_B + K_{A\cup B} - K_A - K_B)(1-K_B)^{-1}\Big).

The formula is evaluated as written on :math:`x = 1/2 + iy`,
:math:`dx = i\,dy`, with the principal branch of :math:`\sqrt x`. The
direct difference :math:`S(A\cup B) - S(A) - S(B)` is authoritative; the
contour value is reported next to it together with its diagnostics.

``Gamma_A`` acts on both body sites and equals the decoupled value 1/4 on the
site of ``B`` (and vice versa).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContourError, DomainError
from .plates import _elements_for, distance_entropy

QUARTER = 0.25


@dataclass(frozen=True)
class BodyGammaSet:
    gamma_A: np.ndarray
    gamma_B: np.ndarray
    gamma_AB: np.ndarray

    def __post_init__(self):
        for name in ("gamma_A", "gamma_B", "gamma_AB"):
            g = np.asarray(getattr(self, name), dtype=float)
            if g.shape != (2, 2):
                raise DomainError(f"{name} must be 2 x 2")
            if np.min(np.linalg.eigvals(g).real) < QUARTER - 1e-8:
                raise DomainError(f"{name} has an eigenvalue below 1/4")
            object.__setattr__(self, name, g)

    @classmethod
    def from_plates(cls, sys, k_perp=0.0, tol=1e-9, decoupled=False):
        """Gamma matrices of the plate model; ``decoupled`` drops the propagator between bodies."""
        el = _elements_for(sys, k_perp, tol)
        G_inf, H_inf = el["G_inf"][0], el["H_inf"][0]
        theta = G_inf * H_inf
        if decoupled:
            gab = np.diag([theta, theta])
        else:
            d_g = G_inf + el["dG00"][0]
            d_h = H_inf + el["dH00"][0]
            G = np.array([[d_g, el["G01"][0]], [el["G01"][0], d_g]])
            H = np.array([[d_h, el["H01"][0]], [el["H01"][0], d_h]])
            gab = G @ H
        return cls(np.diag([theta, QUARTER]), np.diag([QUARTER, theta]), gab)


@dataclass(frozen=True)
class ContourSpec:
    """Line ``Re x = real_part``; ``x_max = None`` selects the height adaptively.

    ``nodes`` is the Gauss-Legendre order per decade panel.
    """

    real_part: float = 0.5
    x_max: float = None
    nodes: int = 64
    varsigma: float = 1e-6

    def __post_init__(self):
        if self.nodes < 16:
            raise DomainError("need at least 16 nodes")
        if self.x_max is not None and not self.x_max > 0:
            raise DomainError("x_max must be positive")


def _weight(x):
    r = np.sqrt(x)
    return np.log((r + 0.5) / (r - 0.5)) / (2.0 * r)


def _logdets(gammas, x, varsigma):
    """Tr log of the matrix argument at each node, phase unwrapped along the nodes."""
    eye = np.eye(2)
    out = np.empty(len(x), dtype=complex)
    for i, xi in enumerate(x):
        den = xi - QUARTER + 1j * varsigma
        KA = (gammas.gamma_A - QUARTER * eye) / den
        KB = (gammas.gamma_B - QUARTER * eye) / den
        KAB = (gammas.gamma_AB - QUARTER * eye) / den
        try:
            left = np.linalg.inv(eye - KA)
            right = np.linalg.inv(eye - KB)
        except np.linalg.LinAlgError:
            raise ContourError(f"1 - K singular at x = {xi!r}; try a larger varsigma") from None
        M = eye - left @ (KA @ KB + KAB - KA - KB) @ right
        sign, logabs = np.linalg.slogdet(M)
        if sign == 0 or not np.isfinite(logabs):
            raise ContourError(f"singular Tr log argument at x = {xi!r}")
        out[i] = logabs + 1j * np.angle(sign)
    out.imag = np.unwrap(out.imag)
    return out


def _line_integral(gammas, spec, height):
    """Integral over ``y in [-height, height]``.

    The variable ``u = asinh y`` is cut into equal panels no wider than
    ``log 10`` (roughly one decade of ``|y|`` each) with ``spec.nodes``
    Gauss-Legendre points per panel, placed symmetrically about ``y = 0``.
    Returns the integral and the integral of the integrand's modulus.
    """
    t, w = np.polynomial.legendre.leggauss(spec.nodes)
    umax = math.asinh(height)
    half = max(1, math.ceil(umax / math.log(10.0)))
    edges = np.linspace(-umax, umax, 2 * half + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    rad = 0.5 * (edges[1:] - edges[:-1])
    u = (mid[:, None] + rad[:, None] * t[None, :]).ravel()
    jac = (rad[:, None] * w[None, :]).ravel() * np.cosh(u)
    x = spec.real_part + 1j * np.sinh(u)
    f = _weight(x) * _logdets(gammas, x, spec.varsigma)
    # dx = i dy
    return -(1.0 / np.pi) * np.sum(1j * f * jac), float(np.sum(np.abs(f) * jac)) / np.pi


def s_r_contour(gammas, spec=ContourSpec()):
    """Contour value of S_R and diagnostics.

    Returns
    -------
    (float, dict)
        Real part of the integral; the dict has ``imag_residual`` (imaginary
        part relative to the real part), ``X_max``, ``nodes``, ``varsigma``,
        ``truncation`` (change from the last tenfold height extension,
        relative to the integral of the integrand's modulus) and
        ``eigenvalues_right_of_contour`` (eigenvalues of the Gamma matrices
        with real part above ``real_part``, which the line does not enclose).
    """
    eig = np.concatenate([np.linalg.eigvals(g).real
                          for g in (gammas.gamma_A, gammas.gamma_B, gammas.gamma_AB)])
    right = int(np.sum(eig > spec.real_part))
    if spec.x_max is not None:
        value, _ = _line_integral(gammas, spec, spec.x_max)
        height, change = spec.x_max, None
    else:
        height = 10.0
        value, _ = _line_integral(gammas, spec, height)
        change = float("inf")
        while height < 1e12:
            nxt, mass = _line_integral(gammas, spec, height * 10.0)
            # relative to the integral of |integrand|, since the value may cancel to ~0
            change = float(abs(nxt - value) / mass) if mass > 0 else 0.0
            value, height = nxt, height * 10.0
            if change < 1e-3:
                break
    real = float(value.real) + 0.0
    diag = {
        "imag_residual": float(abs(value.imag) / max(abs(real), 1e-300)) if value != 0 else 0.0,
        "imag_part": float(value.imag),
        "X_max": float(height),
        "nodes": int(spec.nodes),
        "varsigma": float(spec.varsigma),
        "truncation": change,
        "eigenvalues_right_of_contour": right,
    }
    return real, diag


def s_r_direct(sys, k_perp=0.0, tol=1e-9, decoupled=False):
    """``S(A u B) - S(A) - S(B)`` from the plate model (single bodies are one-site systems)."""
    if decoupled or sys.omega_p == 0:
        return 0.0
    return distance_entropy(sys, k_perp, tol)


def casimir_report(sys, spec=ContourSpec(), tol=1e-9, decoupled=False, agreement=0.05):
    """Side-by-side contour and direct values.

    ``status`` is ``"agree"`` when the relative difference is below
    ``agreement`` and ``"discrepancy"`` otherwise; the full diagnostics are
    included either way.
    """
    gammas = BodyGammaSet.from_plates(sys, tol=tol, decoupled=decoupled)
    contour, diag = s_r_contour(gammas, spec)
    direct = s_r_direct(sys, tol=tol, decoupled=decoupled)
    if direct == 0.0:
        rel = 0.0 if contour == 0.0 else float("inf")
    else:
        rel = abs(contour - direct) / abs(direct)
    report = {
        "s_r_contour": contour,
        "s_r_direct": direct,
        "rel_diff": rel,
        "status": "agree" if rel < agreement else "discrepancy",
        "L": int(sys.L),
        "omega_0": float(sys.omega_0),
        "omega_p": float(sys.omega_p),
    }
    report.update(diag)
    return report
