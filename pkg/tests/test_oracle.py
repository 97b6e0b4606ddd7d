import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rotfric import oracle
from rotfric.errors import DomainError, PassivityError
from rotfric.response import BodySusceptibility

NU0, GAMMA = 1.0, 0.1


@pytest.fixture(scope="module")
def chi0():
    return BodySusceptibility.lorentz(1.0, NU0, GAMMA, zz=(0.7, 1.3, 0.2))


@pytest.fixture(scope="module")
def bath(chi0):
    nu, w = oracle.log_grid(NU0, oracle.DEFAULT_MODES)
    return oracle.couplings_from_chi(chi0, nu, w)


def off_resonance(bath, step=10):
    mids = oracle.staggered_frequencies(bath)
    keep = (np.abs(mids - NU0) > 5 * GAMMA) & (mids > NU0 / 20) & (mids < 20 * NU0)
    return mids[keep][::step]


def test_grid():
    nu, w = oracle.log_grid(2.0, 100)
    assert nu[0] == pytest.approx(0.02) and nu[-1] == pytest.approx(200.0)
    assert w.sum() == pytest.approx(nu[-1] - nu[0])
    with pytest.raises(DomainError):
        oracle.log_grid(-1.0, 100)


def test_zero_coupling():
    nu, w = oracle.log_grid(1.0, 200)
    b = oracle.couplings_from_chi(BodySusceptibility.zero(), nu, w, 1, 0.3)
    assert not np.any(b.f_xx) and not np.any(b.f_zz)
    assert not oracle.response_from_modes(b, 0.7).any()
    assert oracle.gamma_from_modes(b, 0.7, 1.0) == (0, 0, 0)
    rep = oracle.verify_gamma(b, BodySusceptibility.zero(), 1.0, [0.5, 1.5])
    assert rep.passed and rep.worst.rel_error == 0


def test_couplings_peak_near_line():
    nu, w = oracle.log_grid(NU0, 1000)
    b = oracle.couplings_from_chi(BodySusceptibility.lorentz(1.0, NU0, 0.01), nu, w)
    assert np.argmax(b.f_xx) == np.argmin(np.abs(nu - NU0))
    assert np.all(b.f_xx >= 0)


def test_active_bath_rejected():
    bad = BodySusceptibility(lambda x: -1j * np.asarray(x, float), lambda x: 0 * np.asarray(x, float))
    nu, w = oracle.log_grid(1.0, 50)
    with pytest.raises(PassivityError):
        oracle.couplings_from_chi(bad, nu, w)


def test_bath_validation():
    nu, w = oracle.log_grid(1.0, 50)
    with pytest.raises(DomainError):
        oracle.DiscreteBath(nu[::-1], w, w, w)
    with pytest.raises(DomainError):
        oracle.DiscreteBath(nu, -w, w, w)
    with pytest.raises(DomainError):
        oracle.DiscreteBath(nu, w, w[:-1], w)


def test_chi_reconstruction(bath, chi0):
    rep = oracle.verify_chi(bath, chi0, off_resonance(bath), threshold=0.01)
    assert rep.passed, rep.to_text()
    assert "PASS" in rep.to_text()


def test_chi_convergence_with_modes(chi0):
    # off the midpoints the error is set by the grid spacing and shrinks as N grows
    probe = np.linspace(0.2, 0.4, 41)
    errs = []
    for n in (1000, 4000, 16000):
        nu, w = oracle.log_grid(NU0, n)
        b = oracle.couplings_from_chi(chi0, nu, w)
        errs.append(oracle.verify_chi(b, chi0, probe).worst.rel_error)
    assert errs[2] < 0.5 * errs[1] < 0.25 * errs[0]


def test_static_response_matches_body(bath):
    t = oracle.response_from_modes(bath, 0.37)
    assert t[0, 0] == oracle.body_chi(bath, "xx", 0.37)
    assert t[2, 2] == oracle.body_chi(bath, "zz", 0.37)
    assert t[0, 1] == 0


def test_xy_needs_inplane_coupling(bath):
    b = oracle.DiscreteBath(bath.nu_grid, bath.weights, np.zeros_like(bath.f_xx),
                            bath.f_zz, 1, 0.2)
    assert oracle.response_from_modes(b, 0.8)[0, 1] == 0


def test_shift_identity(bath):
    probe = bath.with_rotation(1, 0.13)
    assert oracle.shift_identity_error(probe, np.linspace(0.1, 3, 30)) <= 1e-12


@pytest.mark.parametrize("m, omega0, T", [(0, 0.0, 0.5), (1, 0.1, 0.5), (-2, 0.07, 0.0)])
def test_gamma_two_paths(bath, chi0, m, omega0, T):
    b = bath.with_rotation(m, omega0)
    rep = oracle.verify_gamma(b, chi0, T, np.linspace(0.3, 2.5, 23), threshold=0.01)
    assert rep.passed, rep.to_text()
    if omega0 == 0:
        assert all(r.analytic == 0 and r.oracle == 0 for r in rep.rows if r.component == "Gamma_xy")


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(0, 2), st.floats(-0.3, 0.3), st.integers(-2, 2))
def test_gamma_zz_positive_both_paths(w, T, omega0, m):
    nu, wt = oracle.log_grid(NU0, 400)
    chi0 = BodySusceptibility.lorentz(1.0, NU0, GAMMA)
    b = oracle.couplings_from_chi(chi0, nu, wt, m, omega0)
    from rotfric.response import gamma_kernels
    assert gamma_kernels(chi0, w, m, T, omega0).zz.real >= 0
    assert oracle.gamma_from_modes(b, w, T)[0].real >= 0


def test_fault_injection_detected(bath, chi0):
    idx = int(np.argmin(np.abs(bath.nu_grid - NU0)))
    bad = oracle.corrupt_mode(bath, idx)
    rep = oracle.verify_gamma(bad, chi0, 0.5, np.linspace(0.3, 2.5, 23))
    assert not rep.passed
    assert rep.worst.component == "Gamma_xx"
    assert "FAIL" in rep.to_text()
    # the original bath is untouched
    assert oracle.verify_gamma(bath, chi0, 0.5, np.linspace(0.3, 2.5, 23)).passed


def test_noise_density_rejects_negative_temperature(bath):
    with pytest.raises(DomainError):
        oracle.noise_density(bath, "xx", 1.0, -1.0)
