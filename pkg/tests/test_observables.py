import math
import warnings

import numpy as np
import pytest
from scipy.integrate import trapezoid

from rotfric import observables as obs
from rotfric import materials as mat
from rotfric.errors import DomainError, QuadratureError
from rotfric.greens import HalfSpace, IdealConductor, Vacuum
from rotfric.observables import (Environment, QuadratureConfig, SpinningBody,
                                 friction_torque, power_spectral_density, radiated_power,
                                 separation_sweep, spectrum, torque_spectral_density)
from rotfric.response import Polarizability

DIELECTRIC = mat.Lorentz(((4.0, 1.0, 0.5),))

ENVS = {
    "vacuum": lambda T0: Environment(Vacuum(), T0),
    "mirror": lambda T0: Environment(IdealConductor(3.0), T0),
    # a Lorentz medium: loss vanishes linearly at omega -> 0 as it must
    "dielectric": lambda T0: Environment(HalfSpace(DIELECTRIC, 0.5), T0),
}


def test_null_case_is_exact(make_body):
    for name, env in ENVS.items():
        for T in (0.0, 0.7):
            body = make_body(T, 0.0)
            P, M = radiated_power(body, env(T)), friction_torque(body, env(T))
            assert P.value == 0.0 and M.value == 0.0, name


@pytest.mark.parametrize("name", list(ENVS))
def test_zero_temperature_window(make_body, name):
    w0 = 2.0
    body, env = make_body(0.0, w0), ENVS[name](0.0)
    for w in np.linspace(0.01, 1.99, 25):
        assert power_spectral_density(body, env, w).total > 0
        assert torque_spectral_density(body, env, w).total < 0
    for w in (2.0 + 1e-9, 2.5, 10.0):
        assert power_spectral_density(body, env, w).total == 0
        assert torque_spectral_density(body, env, w).total == 0
    assert obs.frequency_window(body, env) == (2.0, True)


def test_density_rejects_nonpositive_omega(make_body):
    with pytest.raises(DomainError):
        power_spectral_density(make_body(0.0, 1.0), Environment(), 0.0)
    with pytest.raises(DomainError):
        torque_spectral_density(make_body(0.0, 1.0), Environment(), -1.0)


def test_vacuum_low_frequency_closed_form(units, gold):
    # Im alpha ~ 3 a^3 x / S for x << S; at T = T0 = 0 in free space
    #   P = a^3 w0^6 / (30 pi^2 S),  M = -a^3 w0^5 / (20 pi^2 S)
    a, S, w0 = 4.0e-6, gold.sigma0 / gold.eps0, 1e-2
    body = SpinningBody(Polarizability(a, gold), 0.0, w0)
    P = radiated_power(body, Environment()).value
    M = friction_torque(body, Environment()).value
    scale = a**3 / (math.pi**2 * S)
    assert P == pytest.approx(scale * w0**6 / 30, rel=1e-6)
    assert M == pytest.approx(-scale * w0**5 / 20, rel=1e-6)
    assert -M * w0 / P == pytest.approx(1.5, rel=1e-6)


@pytest.mark.parametrize("name", list(ENVS))
@pytest.mark.parametrize("T, T0", [(0.0, 0.0), (0.5, 0.5), (0.8, 0.2)])
def test_parity(make_body, name, T, T0):
    env = ENVS[name](T0)
    P1, M1 = radiated_power(make_body(T, 1.3), env), friction_torque(make_body(T, 1.3), env)
    P2, M2 = radiated_power(make_body(T, -1.3), env), friction_torque(make_body(T, -1.3), env)
    assert M2.value == pytest.approx(-M1.value, rel=1e-10)
    assert P2.value == pytest.approx(P1.value, rel=1e-10)


def test_friction_sign_random(make_body):
    rng = np.random.default_rng(3)
    for _ in range(10):
        T = rng.choice([0.0, rng.uniform(0.05, 2.0)])
        w0 = rng.uniform(-3, 3)
        name = rng.choice(list(ENVS))
        body, env = make_body(T, w0), ENVS[name](T)
        assert friction_torque(body, env).value * w0 <= 0


def test_thermal_balance_without_rotation(make_body):
    for name, env in ENVS.items():
        hot = radiated_power(make_body(1.0, 0.0), env(0.3))
        cold = radiated_power(make_body(0.3, 0.0), env(1.0))
        assert hot.value > 0 > cold.value, name
        assert friction_torque(make_body(1.0, 0.0), env(0.3)).value == 0


def test_energy_bookkeeping_zero_temperature(make_body):
    # work done against friction pays for the emitted power
    for name, env in ENVS.items():
        body = make_body(0.0, 2.0)
        P, M = radiated_power(body, env(0.0)), friction_torque(body, env(0.0))
        assert -M.value * 2.0 >= P.value > 0, name


@pytest.mark.parametrize("name", ["vacuum", "dielectric"])
def test_totals_match_fine_trapezoid(make_body, name):
    body, env = make_body(0.4, 1.5), ENVS[name](0.2)
    P, M = radiated_power(body, env), friction_torque(body, env)
    wmax = P.parts["omega_max"]
    grid = np.union1d(np.geomspace(1e-4, wmax, 10000), [1.5])
    sp = spectrum(body, env, grid, totals=False)
    assert trapezoid(sp.dP_domega["total"], grid) == pytest.approx(P.value, rel=5e-3)
    assert trapezoid(sp.dM_domega["total"], grid) == pytest.approx(M.value, rel=5e-3)


def test_spectrum_channels_and_totals(make_body):
    body, env = make_body(0.3, 1.0), ENVS["mirror"](0.1)
    grid = np.linspace(0.1, 3.0, 12)
    sp = spectrum(body, env, grid)
    dp, dm = sp.dP_domega, sp.dM_domega
    assert np.allclose(dp["zz"] + dp["xx_minus"] + dp["xx_plus"], dp["total"], rtol=1e-14)
    assert np.allclose(dm["plus"] - dm["minus"], dm["total"], rtol=1e-14)
    assert sp.total_power == radiated_power(body, env).value
    assert sp.total_torque == friction_torque(body, env).value
    assert np.isnan(spectrum(body, env, grid, totals=False).total_power)
    with pytest.raises(DomainError):
        spectrum(body, env, grid[::-1])


def test_parts_sum_to_total(make_body):
    body, env = make_body(0.5, 1.2), ENVS["dielectric"](0.3)
    P = radiated_power(body, env)
    assert P.parts["zz"] + P.parts["xx_minus"] + P.parts["xx_plus"] == pytest.approx(
        P.value, rel=1e-12)
    M = friction_torque(body, env, split=True)
    assert M.parts["plus"] - M.parts["minus"] == pytest.approx(M.value, rel=1e-12)
    assert M.parts["M_P"] + M.parts["M_E"] == pytest.approx(M.value, rel=1e-5)


def test_tighter_tolerance_within_error(make_body):
    body, env = make_body(0.5, 1.2), ENVS["mirror"](0.3)
    for fn in (radiated_power, friction_torque):
        a = fn(body, env, QuadratureConfig(rel_tol=1e-6))
        b = fn(body, env, QuadratureConfig(rel_tol=5e-7))
        assert abs(a.value - b.value) <= a.error


def test_quadrature_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(rel_tol=0.1)
    with pytest.raises(DomainError):
        QuadratureConfig(rel_tol=1e-13)


def test_nonconvergence_raises(make_body):
    body, env = make_body(0.5, 1.2), ENVS["dielectric"](0.3)
    with pytest.raises(QuadratureError) as info:
        radiated_power(body, env, QuadratureConfig(rel_tol=1e-10, max_refinements=2))
    assert info.value.partial is not None


def test_relativistic_warning(gold_sphere):
    a = gold_sphere.radius
    with pytest.warns(RuntimeWarning, match="rim speed"):
        SpinningBody(gold_sphere, 0.0, 0.02 / a)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        SpinningBody(gold_sphere, 0.0, 0.005 / a)
    with pytest.raises(DomainError):
        SpinningBody(gold_sphere, -1.0, 0.0)


def test_sweep_order_and_failures(make_body, monkeypatch):
    body = make_body(0.5, 1.0)
    zs = [0.2, 0.5, 1.0, 2.0, 4.0]
    env = Environment(IdealConductor(1.0), 0.1)
    ref = [radiated_power(body, Environment(IdealConductor(z), 0.1)).value for z in zs]
    real = obs.radiated_power

    def flaky(b, e, q=None):
        if e.geometry.z == 1.0:
            raise QuadratureError("injected")
        return real(b, e, q)

    monkeypatch.setattr(obs, "radiated_power", flaky)
    for workers in (1, 4):
        out = separation_sweep(body, env, zs, workers=workers)
        assert [p.z for p in out] == zs
        assert out[2].power is None and "injected" in out[2].error
        for p, r in zip(out, ref):
            if p.error is None:
                assert p.power.value == r
    with pytest.raises(DomainError):
        separation_sweep(body, env, [1.0, 0.5])


def test_default_workers(monkeypatch):
    monkeypatch.setenv(obs.THREADS_ENV, "6")
    assert obs.default_workers() == 6
    monkeypatch.setenv(obs.THREADS_ENV, "junk")
    assert obs.default_workers() == 1
    monkeypatch.delenv(obs.THREADS_ENV)
    assert obs.default_workers() == 1


def test_constant_loss_torque_diverges(make_body):
    # constant Im eps is odd but discontinuous at omega = 0; the thermal near
    # field then makes dM/domega ~ 1/omega and the torque integral diverges
    env = Environment(HalfSpace(mat.Constant(4.0 + 1.0j), 0.5), 0.5)
    body = make_body(0.5, 1.3)
    small = [torque_spectral_density(body, env, w).total * w for w in (1e-6, 1e-8)]
    assert small[0] == pytest.approx(small[1], rel=1e-3) and small[0] < 0


@pytest.mark.parametrize("name", ["mirror", "dielectric"])
def test_error_estimate_bounds_true_error(make_body, name):
    body, env = make_body(0.6, 1.7), ENVS[name](0.2)
    for fn in (radiated_power, friction_torque):
        loose = fn(body, env, QuadratureConfig(rel_tol=1e-4))
        ref = fn(body, env, QuadratureConfig(rel_tol=1e-9))
        assert abs(loose.value - ref.value) <= loose.error
        assert loose.error <= 1e-4 * abs(loose.value)
