"""Direct time-ordered propagation oracle tests."""
import math

import numpy as np
import pytest

from floqmet.models import (SIGMA_X, RashbaModel, RotatingFieldModel,
                            rotating_generator_analytic)
from floqmet.reference import (OracleConfig, generator_direct,
                               propagate_direct, unitarity_defect)
from floqmet.sambe import PeriodicHamiltonian


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(step_count=0)
    with pytest.raises(ValueError):
        OracleConfig(scheme="euler")


def test_static_hamiltonian_matches_expm():
    h0 = 0.7 * SIGMA_X
    t = 2.3
    expected = (math.cos(0.7 * t) * np.eye(2)
                - 1j * math.sin(0.7 * t) * SIGMA_X)
    for scheme in ("midpoint-exponential", "rk4"):
        u = propagate_direct(lambda _t: h0, t, OracleConfig(2000, scheme))
        np.testing.assert_allclose(u, expected, atol=1e-10)


def test_midpoint_preserves_unitarity():
    model = RashbaModel(2.0, 1.0, 1.0)
    u = propagate_direct(model.h_at, 2 * model.period, OracleConfig(4000))
    assert unitarity_defect(u) < 1e-11


def test_midpoint_second_order_convergence():
    model = RashbaModel(2.0, 1.0, 1.0)
    t = model.period
    truth = propagate_direct(model.h_at, t, OracleConfig(20000, "rk4"))

    def err(steps):
        u = propagate_direct(model.h_at, t, OracleConfig(steps))
        return float(np.max(np.abs(u - truth)))

    ratio = err(2000) / err(4000)
    assert ratio > 3.5  # second order: doubling steps gains ~4x


def test_schemes_agree():
    model = RashbaModel(1.0, 2.0, 1.0)
    t = 1.7
    u_mid = propagate_direct(model.h_at, t, OracleConfig(20000))
    u_rk4 = propagate_direct(model.h_at, t, OracleConfig(20000, "rk4"))
    np.testing.assert_allclose(u_mid, u_rk4, atol=1e-7)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        propagate_direct(lambda t: SIGMA_X, -0.1)


def test_generator_spectator_parameter():
    def comp(n, params):
        return params["a"] * SIGMA_X if n == 0 else np.zeros((2, 2))

    model = PeriodicHamiltonian(levels=2, omega=1.0,
                                params={"a": 0.5, "idle": 3.0},
                                fourier_component=comp, max_harmonic=0)
    h = generator_direct(model, "idle", 1.0, cfg=OracleConfig(200))
    np.testing.assert_allclose(h, 0, atol=1e-9)


def test_generator_matches_rotating_closed_forms():
    model = RotatingFieldModel(0.5, 1.0)
    ham = model.hamiltonian()
    for param in ("b", "omega"):
        numeric = generator_direct(ham, param, model.period,
                                   cfg=OracleConfig(20000))
        analytic = rotating_generator_analytic(model, param)
        np.testing.assert_allclose(numeric, analytic, atol=1e-5)


def test_generator_rejects_bad_delta():
    model = RotatingFieldModel(0.5, 1.0).hamiltonian()
    with pytest.raises(ValueError):
        generator_direct(model, "b", 1.0, delta=0.0)
