r"""Susceptibility models on the imaginary frequency axis.

All models are evaluated at :math:`\omega \to i\omega` with real
:math:`\omega \ge 0`, where they are real and non-negative. The permittivity
convention is :math:`\epsilon = 1 + 4\pi\chi` with the oscillator strength
:math:`\omega_p^2` carried by :math:`\chi` itself, so a pure plasma gives the
field a mass :math:`4\pi\omega_p^2` (not :math:`\omega_p^2`).

Besides ``chi`` and ``epsilon`` each model exposes the pieces needed for a
cancellation-free evaluation of the mode correlators: the high-frequency
background ``eps_inf(k)``, the asymptotic plasma mass
``mass2(k) = lim omega^2 (eps/eps_inf - 1)`` and the residual
``residual(omega, k) = mass2 - omega^2 (eps/eps_inf - 1)`` and the loading
``loading(omega, k) = omega^2 (eps/eps_inf - 1) = mass2 - residual``, both in
closed form so that neither is obtained by cancellation.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import ConfigError, DomainError

FOUR_PI = 4.0 * np.pi


def _nonneg(**params):
    for name, value in params.items():
        if not np.isfinite(value) or value < 0:
            raise DomainError(f"{name} must be a non-negative finite number, got {value!r}")


@dataclass(frozen=True)
class Susceptibility:
    """Base class; subclasses are frozen dataclasses of their parameters."""

    name = "base"

    def chi(self, omega, k=0.0):
        """Susceptibility chi(i omega, k)."""
        raise NotImplementedError

    def epsilon(self, omega, k=0.0):
        """Permittivity 1 + 4 pi chi(i omega, k)."""
        return 1.0 + FOUR_PI * self.chi(omega, k)

    def eps_inf(self, k=0.0):
        return 1.0

    def mass2(self, k=0.0):
        raise NotImplementedError

    def residual(self, omega, k=0.0):
        raise NotImplementedError

    def loading(self, omega, k=0.0):
        raise NotImplementedError

    def frequency_scales(self):
        """Characteristic frequencies used as quadrature breakpoints."""
        return ()

    def to_dict(self):
        return {"model": self.name, **asdict(self)}


@dataclass(frozen=True)
class Vacuum(Susceptibility):
    name = "vacuum"

    def chi(self, omega, k=0.0):
        return np.zeros_like(np.asarray(omega, dtype=float))

    def mass2(self, k=0.0):
        return 0.0

    def residual(self, omega, k=0.0):
        return np.zeros_like(np.asarray(omega, dtype=float))

    loading = residual


@dataclass(frozen=True)
class PurePlasma(Susceptibility):
    """chi = omega_p^2 / omega^2: a mass term, no dissipation."""

    omega_p: float = 1.0
    name = "plasma"

    def __post_init__(self):
        _nonneg(omega_p=self.omega_p)

    def chi(self, omega, k=0.0):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0) and self.omega_p > 0:
            raise DomainError("pure plasma susceptibility diverges at omega = 0")
        return self.omega_p ** 2 / omega ** 2

    def mass2(self, k=0.0):
        return FOUR_PI * self.omega_p ** 2

    def residual(self, omega, k=0.0):
        return np.zeros_like(np.asarray(omega, dtype=float))

    def loading(self, omega, k=0.0):
        return np.full_like(np.asarray(omega, dtype=float), self.mass2())

    def frequency_scales(self):
        return (np.sqrt(self.mass2()),)


@dataclass(frozen=True)
class Lorentz(Susceptibility):
    """chi = omega_p^2 / (omega_0^2 + omega^2 + gamma_p omega) on the imaginary axis."""

    omega_p: float = 1.0
    omega_0: float = 1.0
    gamma_p: float = 0.0
    name = "lorentz"

    def __post_init__(self):
        _nonneg(omega_p=self.omega_p, omega_0=self.omega_0, gamma_p=self.gamma_p)
        if self.omega_0 == 0 and self.gamma_p == 0 and self.omega_p > 0:
            raise DomainError("Lorentz model with omega_0 = gamma_p = 0 is a pure plasma")

    def _den(self, omega):
        return self.omega_0 ** 2 + omega ** 2 + self.gamma_p * omega

    def chi(self, omega, k=0.0):
        omega = np.asarray(omega, dtype=float)
        return self.omega_p ** 2 / self._den(omega)

    def mass2(self, k=0.0):
        return FOUR_PI * self.omega_p ** 2

    def residual(self, omega, k=0.0):
        omega = np.asarray(omega, dtype=float)
        return self.mass2() * (self.omega_0 ** 2 + self.gamma_p * omega) / self._den(omega)

    def loading(self, omega, k=0.0):
        omega = np.asarray(omega, dtype=float)
        return self.mass2() * omega ** 2 / self._den(omega)

    def frequency_scales(self):
        return (self.omega_0, self.gamma_p, np.sqrt(self.mass2()))


@dataclass(frozen=True)
class Drude(Susceptibility):
    """chi = omega_c^2 / (omega (gamma_c + omega)) on the imaginary axis."""

    omega_c: float = 1.0
    gamma_c: float = 1.0
    name = "drude"

    def __post_init__(self):
        _nonneg(omega_c=self.omega_c, gamma_c=self.gamma_c)

    def chi(self, omega, k=0.0):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0) and self.omega_c > 0:
            raise DomainError("Drude susceptibility diverges at omega = 0")
        return self.omega_c ** 2 / (omega * (self.gamma_c + omega))

    def mass2(self, k=0.0):
        return FOUR_PI * self.omega_c ** 2

    def residual(self, omega, k=0.0):
        omega = np.asarray(omega, dtype=float)
        return self.mass2() * self.gamma_c / (self.gamma_c + omega)

    def loading(self, omega, k=0.0):
        omega = np.asarray(omega, dtype=float)
        if self.gamma_c == 0:
            return np.full_like(omega, self.mass2())
        return self.mass2() * omega / (self.gamma_c + omega)

    def frequency_scales(self):
        m2 = self.mass2()
        scales = [self.gamma_c, np.sqrt(m2)]
        if self.gamma_c > 0:
            scales.append(m2 / self.gamma_c)
        return tuple(scales)


@dataclass(frozen=True)
class LorentzPlusDrude(Susceptibility):
    omega_p: float = 1.0
    omega_0: float = 1.0
    gamma_p: float = 0.0
    omega_c: float = 1.0
    gamma_c: float = 1.0
    name = "lorentz-drude"

    def __post_init__(self):
        _nonneg(omega_p=self.omega_p, omega_0=self.omega_0, gamma_p=self.gamma_p,
                omega_c=self.omega_c, gamma_c=self.gamma_c)

    @property
    def parts(self):
        return (Lorentz(self.omega_p, self.omega_0, self.gamma_p),
                Drude(self.omega_c, self.gamma_c))

    def chi(self, omega, k=0.0):
        lor, dru = self.parts
        return lor.chi(omega, k) + dru.chi(omega, k)

    def mass2(self, k=0.0):
        return sum(p.mass2(k) for p in self.parts)

    def residual(self, omega, k=0.0):
        lor, dru = self.parts
        return lor.residual(omega, k) + dru.residual(omega, k)

    def loading(self, omega, k=0.0):
        lor, dru = self.parts
        return lor.loading(omega, k) + dru.loading(omega, k)

    def frequency_scales(self):
        return tuple(s for p in self.parts for s in p.frequency_scales())


@dataclass(frozen=True)
class SpatialDispersion(Susceptibility):
    r"""eps(i omega, k) = eps0 (1 + f / (A k^2 + gamma omega + omega^2 + omega_0^2)).

    The constant background ``eps0`` is divided out before the correlators
    are computed (a canonical rescaling of the field), so only the dispersive
    factor enters the momentum correlator.
    """

    eps0: float = 1.0
    f: float = 0.0
    A: float = 0.0
    gamma: float = 0.0
    omega_0: float = 1.0
    name = "spatial"

    def __post_init__(self):
        _nonneg(eps0=self.eps0, f=self.f, A=self.A, gamma=self.gamma, omega_0=self.omega_0)
        if self.eps0 < 1:
            raise DomainError("eps0 must be >= 1")

    def _den(self, omega, k):
        return self.A * k ** 2 + self.gamma * omega + omega ** 2 + self.omega_0 ** 2

    def chi(self, omega, k=0.0):
        omega = np.asarray(omega, dtype=float)
        return (self.eps0 - 1.0) / FOUR_PI + self.eps0 * self.f / (FOUR_PI * self._den(omega, k))

    def eps_inf(self, k=0.0):
        return self.eps0

    def mass2(self, k=0.0):
        return self.f

    def residual(self, omega, k=0.0):
        omega = np.asarray(omega, dtype=float)
        return self.f * (self.A * k ** 2 + self.gamma * omega + self.omega_0 ** 2) / self._den(omega, k)

    def loading(self, omega, k=0.0):
        omega = np.asarray(omega, dtype=float)
        return self.f * omega ** 2 / self._den(omega, k)

    def frequency_scales(self):
        return (self.omega_0, self.gamma, np.sqrt(self.f))


def chi_imaginary(model, omega, k=0.0):
    """chi(i omega, k) for ``model``; real and non-negative."""
    return model.chi(omega, k)


def epsilon_imaginary(model, omega, k=0.0):
    """eps(i omega, k) = 1 + 4 pi chi(i omega, k)."""
    return model.epsilon(omega, k)


MODELS = {cls.name: cls for cls in (Vacuum, PurePlasma, Lorentz, Drude, LorentzPlusDrude,
                                    SpatialDispersion)}

# config keys -> dataclass field names
_KEY_ALIASES = {"gamma_p": {"spatial": "gamma"}}


def model_from_dict(config):
    """Build a model from a dict with key ``model`` plus its parameters.

    Keys follow the JSON config names (``omega_p``, ``omega_0``, ``gamma_p``,
    ``omega_c``, ``gamma_c``, ``A``, ``f``, ``eps0``); for the spatial-dispersion
    model ``gamma_p`` is accepted as its damping ``gamma``. Parameters that the
    chosen model does not use are ignored when ``None``, rejected otherwise.
    """
    config = dict(config)
    name = config.pop("model", None)
    if name not in MODELS:
        raise ConfigError(f"unknown model {name!r}; choose from {sorted(MODELS)}")
    cls = MODELS[name]
    allowed = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in config.items():
        if value is None:
            continue
        target = _KEY_ALIASES.get(key, {}).get(name, key)
        if target not in allowed:
            raise ConfigError(f"parameter {key!r} does not apply to model {name!r}")
        kwargs[target] = float(value)
    try:
        return cls(**kwargs)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
