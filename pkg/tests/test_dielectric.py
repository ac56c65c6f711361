import math

import numpy as np
import pytest

from fieldmatter.dielectric import (Drude, Lorentz, LorentzPlusDrude, PurePlasma,
                                    SpatialDispersion, Vacuum, chi_imaginary, epsilon_imaginary,
                                    model_from_dict)
from fieldmatter.errors import ConfigError, DomainError

ALL = [Vacuum(), PurePlasma(0.7), Lorentz(0.3, 1.2, 0.4), Drude(0.2, 0.5),
       LorentzPlusDrude(0.3, 1.0, 0.1, 0.2, 0.3), SpatialDispersion(1.5, 0.8, 2.0, 0.3, 1.1)]


def test_lorentz_value():
    assert chi_imaginary(Lorentz(1, 1, 0), 1.0) == pytest.approx(0.5)
    assert epsilon_imaginary(Lorentz(1, 1, 0), 1.0) == pytest.approx(1 + 2 * math.pi)


def test_plasma_value():
    assert chi_imaginary(PurePlasma(2), 1.0) == pytest.approx(4.0)


def test_vacuum_is_one():
    w = np.linspace(0, 100, 11)
    assert np.all(epsilon_imaginary(Vacuum(), w) == 1.0)


def test_drude_adds_to_lorentz():
    w = np.array([0.3, 2.0])
    combo = LorentzPlusDrude(0.5, 1.0, 0.2, 0.3, 0.4)
    expected = 0.25 / (1 + w ** 2 + 0.2 * w) + 0.09 / (w * (0.4 + w))
    assert np.allclose(chi_imaginary(combo, w), expected, rtol=1e-14)


def test_spatial_normalization():
    m = SpatialDispersion(eps0=2.0, f=0.5, A=1.0, gamma=0.1, omega_0=1.0)
    w, k = 0.7, 0.4
    den = k ** 2 + 0.1 * w + w ** 2 + 1.0
    assert epsilon_imaginary(m, w, k) == pytest.approx(2.0 * (1 + 0.5 / den))


@pytest.mark.parametrize("model", [PurePlasma(1.0), Drude(0.1, 0.1)])
def test_pole_at_zero_rejected(model):
    with pytest.raises(DomainError):
        chi_imaginary(model, 0.0)


@pytest.mark.parametrize("model", [Lorentz(0.3, 1.2, 0.4), Drude(0.2, 0.5),
                                   LorentzPlusDrude(0.3, 1.0, 0.1, 0.2, 0.3)])
def test_decays_monotonically(model):
    w = np.geomspace(1e-2, 1e6, 200)
    chi = chi_imaginary(model, w)
    assert np.all(np.diff(chi) < 0)
    assert chi[-1] < 1e-10


@pytest.mark.parametrize("model", ALL)
def test_residual_and_loading_are_consistent(model):
    w = np.geomspace(1e-3, 1e3, 25)
    k = 0.6
    excess = 4 * np.pi * chi_imaginary(model, w, k) - (model.eps_inf(k) - 1)
    loading = w ** 2 * excess / model.eps_inf(k)
    assert np.allclose(model.loading(w, k), loading, rtol=1e-8, atol=1e-14)
    assert np.allclose(model.residual(w, k) + model.loading(w, k), model.mass2(k), rtol=1e-12)


@pytest.mark.parametrize("model", ALL)
def test_non_negative(model):
    w = np.geomspace(1e-3, 1e3, 25)
    assert np.all(chi_imaginary(model, w) >= 0)
    assert np.all(model.residual(w) >= 0)


def test_bounded_loading_at_infinity():
    for model in ALL:
        w = np.array([1e6, 1e8])
        assert np.all(np.abs(model.loading(w) - model.mass2()) < 1e-4 * (1 + model.mass2()))


@pytest.mark.parametrize("kwargs", [dict(omega_p=-1), dict(omega_p=float("nan"))])
def test_rejects_bad_parameters(kwargs):
    with pytest.raises(DomainError):
        Lorentz(**kwargs)


def test_lorentz_without_restoring_force_rejected():
    with pytest.raises(DomainError):
        Lorentz(1.0, 0.0, 0.0)


def test_model_from_dict():
    m = model_from_dict({"model": "drude", "omega_c": 0.1, "gamma_c": 0.2, "omega_p": None})
    assert m == Drude(0.1, 0.2)
    s = model_from_dict({"model": "spatial", "gamma_p": 0.3})
    assert s.gamma == 0.3
    assert model_from_dict({"model": "lorentz"}).to_dict()["model"] == "lorentz"


@pytest.mark.parametrize("cfg", [{"model": "nope"}, {"model": "drude", "omega_0": 1.0},
                                 {"model": "lorentz", "omega_p": -1.0}])
def test_model_from_dict_errors(cfg):
    with pytest.raises(ConfigError):
        model_from_dict(cfg)
