r"""Exact ground state of the coupled field-matter lattice.

Time-domain Lagrangian on a chain of ``N`` field sites with matter oscillators
on the body sites ``B``:

.. math::

    \mathcal L = \sum_x \tfrac12\dot\phi_x^2 - \tfrac12\sum_x(\phi_{x+1}-\phi_x)^2
      + \sum_{b\in B}\Big[\frac{\dot\psi_b^2 - \omega_0^2\psi_b^2}{16\pi^2}
      + \omega_p\,\psi_b\dot\phi_b\Big].

With :math:`\pi_\phi = \dot\phi + \omega_p\psi 1_B` and
:math:`\pi_\psi = \dot\psi/8\pi^2` the Hamiltonian is

.. math::

    H = \sum_x \tfrac12(\pi_{\phi,x} - \omega_p\psi_x 1_B)^2 + \tfrac12\sum_x(\phi_{x+1}-\phi_x)^2
      + \sum_{b}\Big[4\pi^2\pi_{\psi,b}^2 + \frac{\omega_0^2}{16\pi^2}\psi_b^2\Big].

Phase-space vectors in this module use block ordering
``(phi_0..phi_{N-1}, psi_1..psi_B, pi_phi..., pi_psi...)``; covariance matrices
are returned in the package-wide interleaved ordering with mode index
``x`` for ``phi_x`` and ``N + j`` for the j-th body oscillator.

``boundary='open'`` pins the field to zero just outside both chain ends
(Dirichlet); ``'periodic'`` closes the ring and needs ``phi_mass > 0`` to lift
the zero mode.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gaussian import (block_to_interleaved, entropy_of_spectrum, reduce, symplectic_spectrum,
                       williamson_decompose)
from .plates import PlateSystem, plate_entropy

EIGHT_PI2 = 8.0 * np.pi ** 2


@dataclass(frozen=True)
class CoupledLatticeModel:
    N: int
    body_sites: tuple
    omega_0: float
    omega_p: float
    boundary: str = "open"
    phi_mass: float = 0.0

    def __post_init__(self):
        sites = tuple(int(b) for b in self.body_sites)
        object.__setattr__(self, "body_sites", sites)
        if self.N < 2 or self.N < 2 * len(sites):
            raise DomainError("need N >= max(2, 2 |B|)")
        if len(set(sites)) != len(sites) or any(not 0 <= b < self.N for b in sites):
            raise DomainError(f"body sites must be distinct and inside [0, {self.N})")
        if not self.omega_0 > 0 or self.omega_p < 0:
            raise DomainError("need omega_0 > 0 and omega_p >= 0")
        if self.boundary not in ("open", "periodic"):
            raise DomainError("boundary must be 'open' or 'periodic'")
        if self.boundary == "periodic" and not self.phi_mass > 0:
            raise DomainError("periodic boundary needs phi_mass > 0 (zero mode)")

    @property
    def n_modes(self):
        return self.N + len(self.body_sites)


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """``H = x^T matrix x / 2`` in block ordering; ``n_phi`` field modes first."""

    matrix: np.ndarray
    n_phi: int
    n_psi: int


def laplacian(N, boundary, mass=0.0):
    lap = 2.0 * np.eye(N) - np.eye(N, k=1) - np.eye(N, k=-1)
    if boundary == "periodic" and N > 2:
        lap[0, -1] = lap[-1, 0] = -1.0
    return lap + mass ** 2 * np.eye(N)


def build_hamiltonian(model):
    """Quadratic Hamiltonian matrix; raises DomainError if it is not positive-definite."""
    N, nb = model.N, len(model.body_sites)
    n = N + nb
    H = np.zeros((2 * n, 2 * n))
    H[:N, :N] = laplacian(N, model.boundary, model.phi_mass)
    psi = np.arange(N, n)
    H[psi, psi] = model.omega_0 ** 2 / EIGHT_PI2 + model.omega_p ** 2
    H[n:n + N, n:n + N] = np.eye(N)
    H[n + psi, n + psi] = EIGHT_PI2
    for j, b in enumerate(model.body_sites):
        H[n + b, N + j] = H[N + j, n + b] = -model.omega_p
    low = float(np.linalg.eigvalsh(H)[0])
    if low <= 0:
        raise DomainError(f"unstable Hamiltonian: smallest eigenvalue {low!r}")
    return QuadraticHamiltonian(H, N, nb)


def ground_state_covariance(ham):
    """Ground-state covariance (interleaved ordering).

    With ``W Hm W^T = D`` from the Williamson form, ``y = W^{-T} x`` are normal
    coordinates of ``H = sum d_i (q_i^2 + p_i^2) / 2``, whose ground state has
    unit covariance, so ``gamma = W^T W``.
    """
    Hm = block_to_interleaved(ham.matrix)
    W, _ = williamson_decompose(Hm, check_physical=False)
    gamma = W.T @ W
    return 0.5 * (gamma + gamma.T)


def subsystem_entropies(model, gamma=None):
    """``(S_phi, S_psi, gamma_phi, gamma_psi)`` of the ground state."""
    if gamma is None:
        gamma = ground_state_covariance(build_hamiltonian(model))
    N, n = model.N, model.n_modes
    g_phi = reduce(gamma, range(N))
    g_psi = reduce(gamma, range(N, n))
    s_phi = entropy_of_spectrum(symplectic_spectrum(g_phi))
    s_psi = entropy_of_spectrum(symplectic_spectrum(g_psi))
    return s_phi, s_psi, g_phi, g_psi


def schur_self_energy(model, omega):
    """Field self-energy on all field sites from eliminating matter and momenta.

    The Euclidean quadratic form at imaginary frequency ``omega`` is
    ``Hm + omega J`` with ``J = [[0, I], [-I, 0]]``; its Schur complement on the
    field coordinates minus the decoupled one is the induced self-energy.
    """
    def field_kernel(m):
        Hm = build_hamiltonian(m).matrix
        n = m.n_modes
        J = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
        A = Hm + omega * J
        keep = np.arange(m.N)
        rest = np.arange(m.N, 2 * n)
        return A[np.ix_(keep, keep)] - A[np.ix_(keep, rest)] @ np.linalg.solve(
            A[np.ix_(rest, rest)], A[np.ix_(rest, keep)])

    free = CoupledLatticeModel(model.N, model.body_sites, model.omega_0, 0.0,
                               model.boundary, model.phi_mass)
    return field_kernel(model) - field_kernel(free)


def verify_effective_response(model, omegas=(0.1, 1.0, 10.0), tol=1e-10):
    """Compare the Schur-complement self-energy with ``w_p^2 w^2 8 pi^2 / (w^2 + w_0^2)``.

    Returns a dict with the expected and observed diagonal entries per
    frequency, the largest residual (relative to ``1 + |expected|``) and ``passed``.
    """
    rows = []
    worst = 0.0
    proj = np.zeros(model.N)
    proj[list(model.body_sites)] = 1.0
    for w in omegas:
        sigma = schur_self_energy(model, w)
        expected = model.omega_p ** 2 * w ** 2 * EIGHT_PI2 / (w ** 2 + model.omega_0 ** 2)
        resid = float(np.max(np.abs(sigma - expected * np.diag(proj)))) / (1.0 + abs(expected))
        worst = max(worst, resid)
        rows.append({"omega": float(w), "expected": float(expected),
                     "observed": float(sigma[model.body_sites[0], model.body_sites[0]]),
                     "residual": resid})
    return {"checks": rows, "residual": worst, "passed": bool(worst < tol)}


def centered_bodies(N, L):
    first = (N - L) // 2
    return (first, first + L)


def compare_with_plates(N, L, omega_0, omega_p, boundary="open", phi_mass=0.0):
    """Oracle field entropy against the plate-model entropy for two centered bodies."""
    model = CoupledLatticeModel(N, centered_bodies(N, L), omega_0, omega_p, boundary, phi_mass)
    s_phi, s_psi, _, _ = subsystem_entropies(model)
    s_plate = plate_entropy(PlateSystem(L, omega_0, omega_p))
    scale = max(abs(s_plate), 1e-300)
    return {
        "S_phi": s_phi,
        "S_psi": s_psi,
        "S_plate_module": s_plate,
        "rel_diff": abs(s_phi - s_plate) / scale,
        "N": int(N),
        "L": int(L),
        "omega_0": float(omega_0),
        "omega_p": float(omega_p),
    }
