r"""Gaussian bosonic states: covariance matrices, symplectic spectra, entropies.

Conventions
-----------
* Phase-space vectors are interleaved, :math:`(\phi_1, \pi_1, \dots, \phi_n, \pi_n)`.
  :func:`block_to_interleaved` and :func:`interleaved_to_block` convert from and
  to the :math:`(\phi_1..\phi_n, \pi_1..\pi_n)` ordering.
* Covariance matrices are :math:`\gamma_{jk} = 2\,\mathrm{Re}\langle \delta O_j
  \delta O_k\rangle` with :math:`\hbar = 1`, so the vacuum of
  :math:`\tfrac12(\phi^2+\pi^2)` is the identity and every symplectic
  eigenvalue of a physical state satisfies :math:`\mu \ge 1`.
* Entropies are in nats.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import InvalidStateError, NumericalError, UnphysicalStateError

SYMMETRY_TOL = 1e-9
PHYSICAL_TOL = 1e-9
PURE_TOL = 1e-12

#: ``mu = scale * sqrt(eig(G H))`` for continuum correlators g_k, h_k.
CONTINUUM_SCALE = 2.0 / np.pi
#: ``mu = scale * sqrt(eig(G H))`` for lattice correlators, where the
#: decoupled product G H equals 1/4.
LATTICE_SCALE = 2.0


def symplectic_form(n):
    """Return the 2n x 2n symplectic form in interleaved ordering."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _block_permutation(n):
    # interleaved index 2i -> phi_i (block i), 2i+1 -> pi_i (block n+i)
    perm = np.empty(2 * n, dtype=int)
    perm[0::2] = np.arange(n)
    perm[1::2] = np.arange(n, 2 * n)
    return perm


def block_to_interleaved(matrix):
    """Reorder a (phi..., pi...) matrix into interleaved (phi, pi) pairs."""
    matrix = np.asarray(matrix)
    perm = _block_permutation(matrix.shape[0] // 2)
    return matrix[np.ix_(perm, perm)]


def interleaved_to_block(matrix):
    """Inverse of :func:`block_to_interleaved`."""
    matrix = np.asarray(matrix)
    inv = np.argsort(_block_permutation(matrix.shape[0] // 2))
    return matrix[np.ix_(inv, inv)]


def _as_square_even(gamma):
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
        raise InvalidStateError(f"expected a 2n x 2n matrix, got shape {gamma.shape}")
    if gamma.shape[0] == 0:
        raise InvalidStateError("empty covariance matrix")
    if not np.all(np.isfinite(gamma)):
        raise InvalidStateError("covariance matrix has non-finite entries")
    return gamma


def check_covariance(gamma, tol=SYMMETRY_TOL):
    """Validate shape, symmetry and positive-definiteness; return a float array.

    Raises
    ------
    InvalidStateError
        If any structural check fails.
    """
    gamma = _as_square_even(gamma)
    scale = max(np.max(np.abs(gamma)), 1.0)
    asym = np.max(np.abs(gamma - gamma.T))
    if asym > tol * scale:
        raise InvalidStateError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    try:
        np.linalg.cholesky(0.5 * (gamma + gamma.T))
    except np.linalg.LinAlgError:
        raise InvalidStateError("matrix is not positive-definite") from None
    return 0.5 * (gamma + gamma.T)


def symplectic_spectrum(gamma, tol=PHYSICAL_TOL, check_physical=True):
    r"""Symplectic eigenvalues of a covariance matrix, in descending order.

    The eigenvalues of :math:`i\sigma\gamma` come in pairs :math:`\pm\mu_j`;
    their moduli are sorted and each pair is collapsed to one value.

    Parameters
    ----------
    gamma : (2n, 2n) array_like
        Covariance matrix in interleaved ordering.
    tol : float
        Allowed undershoot below one before the state is declared unphysical.
    check_physical : bool
        Disable the ``mu >= 1`` check, e.g. for Hamiltonian matrices.

    Returns
    -------
    numpy.ndarray
        ``n`` symplectic eigenvalues.

    Raises
    ------
    InvalidStateError
        Non-symmetric or non-positive input.
    UnphysicalStateError
        Some ``mu < 1 - tol``; ``err.value`` holds the offending value.
    """
    gamma = check_covariance(gamma)
    n = gamma.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ gamma)
    mods = np.sort(np.abs(ev))[::-1]
    mus = 0.5 * (mods[0::2] + mods[1::2])
    if check_physical and mus[-1] < 1.0 - tol:
        raise UnphysicalStateError(
            f"symplectic eigenvalue {mus[-1]!r} violates the uncertainty relation",
            value=float(mus[-1]),
        )
    return mus


def williamson_decompose(gamma, check_physical=True):
    r"""Williamson normal form of a positive-definite matrix.

    Returns ``(W, D)`` with ``W`` symplectic (``W.T @ sigma @ W == sigma``) and
    ``W @ gamma @ W.T == D``, ``D = diag(mu_1, mu_1, ..., mu_n, mu_n)``
    (interleaved, descending).

    The construction diagonalizes the Hermitian matrix
    :math:`i\gamma^{1/2}\sigma\gamma^{1/2}`, whose positive eigenvalues are the
    symplectic eigenvalues; real and imaginary parts of the eigenvectors give an
    orthonormal basis that brings the antisymmetric form to canonical blocks,
    also for degenerate spectra.
    """
    gamma = check_covariance(gamma)
    n = gamma.shape[0] // 2
    sigma = symplectic_form(n)
    evals, evecs = np.linalg.eigh(gamma)
    root = (evecs * np.sqrt(evals)) @ evecs.T
    inv_root = (evecs / np.sqrt(evals)) @ evecs.T
    a = root @ sigma @ root
    w, v = np.linalg.eigh(1j * 0.5 * (a - a.T))
    mus = w[n:][::-1]
    vecs = v[:, n:][:, ::-1]
    ortho = np.empty((2 * n, 2 * n))
    ortho[:, 0::2] = np.sqrt(2.0) * vecs.imag
    ortho[:, 1::2] = np.sqrt(2.0) * vecs.real
    d = np.repeat(mus, 2)
    W = np.sqrt(d)[:, None] * (ortho.T @ inv_root)
    residual = np.max(np.abs(W.T @ sigma @ W - sigma))
    if not np.isfinite(residual) or residual > 1e-7:
        raise NumericalError("Williamson decomposition failed", residual=residual)
    if check_physical and mus[-1] < 1.0 - PHYSICAL_TOL:
        raise UnphysicalStateError(
            f"symplectic eigenvalue {mus[-1]!r} violates the uncertainty relation",
            value=float(mus[-1]),
        )
    return W, np.diag(d)


def spectrum_from_gh(G, H, scale):
    """Symplectic eigenvalues from field and momentum correlators.

    Valid only when field-momentum cross correlations vanish; the caller is
    responsible for that. ``mu_i = scale * sqrt(eig_i(G @ H))``. Use
    :data:`CONTINUUM_SCALE` for the continuum g_k, h_k integrals and
    :data:`LATTICE_SCALE` for lattice correlators.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    ev = np.linalg.eigvals(G @ H)
    if np.any(np.abs(ev.imag) > 1e-9 * np.max(np.abs(ev))) or np.any(ev.real <= 0):
        raise NumericalError(f"G H has non-positive eigenvalues {ev}")
    return np.sort(scale * np.sqrt(ev.real))[::-1]


def _check_mus(mus, tol=PHYSICAL_TOL):
    mus = np.atleast_1d(np.asarray(mus, dtype=float))
    bad = mus < 1.0 - tol
    if np.any(bad):
        value = float(mus[bad][0])
        raise UnphysicalStateError(f"symplectic eigenvalue {value!r} is below one", value=value)
    return mus


def occupation_entropy(n):
    """Entropy ``(n+1) log(n+1) - n log n`` of a thermal mode with mean occupation n."""
    n = np.asarray(n, dtype=float)
    # log1p keeps full relative precision for n far below machine epsilon
    return (n + 1.0) * np.log1p(n) - xlogy(n, n)


def entropy_terms(mus):
    """Per-mode entropies h(mu); exactly zero within 1e-12 of mu = 1."""
    n = occupations(mus)
    return occupation_entropy(n)


def entropy_of_spectrum(mus):
    """Von Neumann entropy (nats) of a Gaussian state with symplectic spectrum ``mus``."""
    return float(np.sum(entropy_terms(mus)))


def occupations(mus):
    """Mean occupations ``(mu - 1) / 2`` of the normal modes."""
    mus = _check_mus(mus)
    n = 0.5 * (mus - 1.0)
    n[np.abs(mus - 1.0) < PURE_TOL] = 0.0
    return np.maximum(n, 0.0)


def mode_exponents(mus):
    """Exponents ``u = log((mu+1)/(mu-1))``; a pure mode (mu = 1) maps to ``inf``."""
    n = occupations(mus)
    with np.errstate(divide="ignore"):
        return np.where(n > 0, np.log1p(1.0 / np.where(n > 0, n, 1.0)), np.inf)


def reduce(gamma, modes):
    """Covariance matrix of the subsystem made of ``modes`` (mode indices)."""
    gamma = _as_square_even(gamma)
    n = gamma.shape[0] // 2
    modes = [int(m) for m in np.atleast_1d(modes)]
    if not modes:
        raise InvalidStateError("empty mode selection")
    if len(set(modes)) != len(modes):
        raise InvalidStateError("duplicate modes in selection")
    if min(modes) < 0 or max(modes) >= n:
        raise InvalidStateError(f"mode index out of range for n={n}: {modes}")
    idx = np.ravel([[2 * m, 2 * m + 1] for m in modes])
    return gamma[np.ix_(idx, idx)].copy()


@dataclass(frozen=True)
class GaussianState:
    """Normal-mode description of a Gaussian state.

    The density matrix is ``exp(-sum u_i a_i^+ a_i) / Z``; only the exponents,
    occupations and entropy are kept (Z is never needed).
    """

    spectrum: np.ndarray
    exponents: np.ndarray
    occupations: np.ndarray
    entropy: float

    @classmethod
    def from_covariance(cls, gamma):
        return cls.from_spectrum(symplectic_spectrum(gamma))

    @classmethod
    def from_spectrum(cls, mus):
        mus = _check_mus(mus)
        return cls(mus, mode_exponents(mus), occupations(mus), entropy_of_spectrum(mus))


def random_symplectic(n, rng=None, strength=0.5):
    """Random symplectic matrix ``expm(sigma @ S)`` with symmetric Gaussian ``S``.

    ``strength`` scales the generator and therefore the squeezing.
    """
    from scipy.linalg import expm

    rng = np.random.default_rng(rng)
    a = rng.normal(size=(2 * n, 2 * n))
    sym = strength * (a + a.T) / (2.0 * np.sqrt(2 * n))
    return expm(symplectic_form(n) @ sym)


def random_covariance(n, rng=None, max_mu=5.0, pure=False, strength=0.5):
    """Random physical covariance matrix ``S.T @ D @ S``.

    Returns ``(gamma, mus)`` where ``mus`` is the spectrum used to build it
    (descending).
    """
    rng = np.random.default_rng(rng)
    mus = np.ones(n) if pure else np.sort(rng.uniform(1.0, max_mu, size=n))[::-1]
    S = random_symplectic(n, rng, strength)
    gamma = S.T @ np.diag(np.repeat(mus, 2)) @ S
    return 0.5 * (gamma + gamma.T), mus
