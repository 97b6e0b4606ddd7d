"""Acceptance criteria 1-9.

Each test prints one ``criterion N: PASS|FAIL`` line with its measured
quantity and runtime, and fails if either the check or the time limit is
missed.  Run alone with::

    pytest tests/test_acceptance.py -v -s
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from rotfric import cli, oracle
from rotfric import materials as mat
from rotfric.config import ScenarioConfig
from rotfric.greens import (HalfSpace, IdealConductor, Vacuum, direct_term_quadrature,
                            im_g_conductor, im_g_halfspace)
from rotfric.observables import (Environment, QuadratureConfig, SpinningBody,
                                 friction_torque, power_spectral_density, radiated_power,
                                 spectrum, torque_spectral_density)
from rotfric.response import BodySusceptibility, Polarizability
from rotfric.units import UnitSystem

FIG2 = Path(__file__).resolve().parent.parent / "configs" / "fig2_separation.yaml"
UNITS = UnitSystem()
GOLD = mat.Drude(UNITS.to_internal(1.6e7, "conductivity"))
RADIUS = UNITS.to_internal(10e-9, "length")


class Criterion:
    """Times a block and reports one PASS/FAIL line."""

    def __init__(self, capsys, number, limit_s):
        self.capsys, self.number, self.limit = capsys, number, limit_s

    def __enter__(self):
        self.t0 = time.perf_counter()
        self.detail = ""
        self.ok = False
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        in_time = self.limit is None or dt < self.limit
        passed = exc_type is None and self.ok and in_time
        limit = "" if self.limit is None else f" (limit {self.limit:g} s)"
        why = ""
        if exc_type is not None:
            why = f" [{exc_type.__name__}: {exc}]"
        elif not in_time:
            why = " [too slow]"
        with self.capsys.disabled():
            print(f"\ncriterion {self.number}: {'PASS' if passed else 'FAIL'}: "
                  f"{self.detail}; {dt:.2f} s{limit}{why}")
        if exc_type is None:
            assert self.ok, self.detail
            assert in_time, f"criterion {self.number} took {dt:.1f} s > {self.limit} s"
        return False


def random_material(rng):
    kind = rng.integers(3)
    if kind == 0:
        return mat.Drude(10 ** rng.uniform(1, 7))
    if kind == 1:
        return mat.Lorentz(((10 ** rng.uniform(-1, 1), rng.uniform(0.3, 3),
                             rng.uniform(0.05, 1)),))
    return mat.Lorentz(((rng.uniform(1, 10), 0.0, rng.uniform(0.1, 10)),))


def random_geometry(rng):
    kind = rng.integers(3)
    z = 10 ** rng.uniform(-1.5, 1)
    if kind == 0:
        return Vacuum()
    if kind == 1:
        return IdealConductor(z)
    return HalfSpace(random_material(rng), z)


def random_body(rng, T, omega0):
    return SpinningBody(Polarizability(RADIUS, random_material(rng)), T, omega0)


# 1 ------------------------------------------------------------------------

def test_criterion_1_equilibrium_null(capsys):
    rng = np.random.default_rng(101)
    with Criterion(capsys, 1, 1.0) as c:
        worst = 0.0
        for _ in range(20):
            T = float(rng.choice([0.0, rng.uniform(0.01, 5)]))
            env = Environment(random_geometry(rng), T)
            body = random_body(rng, T, 0.0)
            worst = max(worst, abs(radiated_power(body, env).value),
                        abs(friction_torque(body, env).value))
        c.detail = f"max |P|, |M| over 20 draws = {worst:.1e} (< 1e-14)"
        c.ok = worst < 1e-14


# 2 ------------------------------------------------------------------------

def test_criterion_2_zero_temperature_window(capsys):
    w0 = 2.0
    body = SpinningBody(Polarizability(RADIUS, GOLD), 0.0, w0)
    envs = [Environment(Vacuum()), Environment(IdealConductor(1.0)),
            Environment(HalfSpace(GOLD, 0.3))]
    grid = np.linspace(0.0, 2 * w0, 201)[1:]
    with Criterion(capsys, 2, 10.0) as c:
        bad = 0
        for env in envs:
            for w in grid:
                p = power_spectral_density(body, env, w).total
                m = torque_spectral_density(body, env, w).total
                if w < w0:
                    bad += not (p > 0 and m < 0)
                elif w > w0:
                    bad += not (p == 0 and m == 0)
        c.detail = (f"{bad} violations on a 200-point grid x {len(envs)} geometries "
                    "(dP>0, dM<0 below omega0; exactly 0 above)")
        c.ok = bad == 0


# 3 ------------------------------------------------------------------------

def test_criterion_3_parity_and_friction_sign(capsys):
    rng = np.random.default_rng(303)
    with Criterion(capsys, 3, 120.0) as c:
        worst, wrong = 0.0, 0
        for _ in range(50):
            T = float(rng.choice([0.0, rng.uniform(0.05, 3)]))
            w0 = float(rng.uniform(0.05, 4))
            env = Environment(random_geometry(rng), T)
            pol = Polarizability(RADIUS, random_material(rng))
            mp = friction_torque(SpinningBody(pol, T, w0), env).value
            mm = friction_torque(SpinningBody(pol, T, -w0), env).value
            worst = max(worst, abs(mp + mm) / abs(mp))
            wrong += (mp * w0 > 0) + (mm * -w0 > 0)
        c.detail = (f"max |M(w0) + M(-w0)| / |M| = {worst:.1e} (<= 1e-10); "
                    f"{wrong} draws with M w0 > 0")
        c.ok = worst <= 1e-10 and wrong == 0


# 4 and 9: the shipped separation scenario -------------------------------------------------------------------

@pytest.fixture(scope="module")
def fig2():
    cfg = ScenarioConfig.from_file(FIG2)
    sc = cfg.build()
    t0 = time.perf_counter()
    rows = cli.evaluate(sc, workers=1)
    return cfg, sc, rows, cli.render_csv(cfg, sc, rows), time.perf_counter() - t0


def test_criterion_4_vacuum_limit(capsys, fig2):
    cfg, sc, rows, _, elapsed = fig2
    with Criterion(capsys, 4, 300.0 - elapsed) as c:
        assert all(r[-1] == "" for r in rows), "sweep points failed"
        ratio = np.array([r[1] / r[2] for r in rows])
        dev = ratio - 1
        # count sign changes of P - P_vac that clear the quadrature noise
        err = np.array([r[4] / r[2] for r in rows])
        sig = np.abs(dev) > 10 * err
        signs = np.sign(dev[sig])
        crossings = int(np.sum(signs[1:] != signs[:-1]))
        # dominant emitted frequency in free space, against the largest z
        grid = np.geomspace(1e-2, 10, 400) * abs(sc.body.omega0)
        sp = spectrum(sc.body, Environment(Vacuum(), sc.environment.T0), grid, totals=False)
        w_dom = grid[np.argmax(np.abs(sp.dP_domega["total"]))]
        kz = w_dom * sc.grid[-1]
        c.detail = (f"{crossings} crossings of P_vac (>= 2); |P/P_vac - 1| = "
                    f"{abs(dev[-1]):.2e} at z_max (< 1e-2); omega z / c = {kz:.0f} (>= 50)")
        c.ok = crossings >= 2 and abs(dev[-1]) < 1e-2 and kz >= 50


def test_criterion_9_determinism(capsys, fig2):
    cfg, sc, _, text1, _ = fig2
    with Criterion(capsys, 9, None) as c:
        text8 = cli.render_csv(cfg, sc, cli.evaluate(sc, workers=8))
        c.detail = (f"separation sweep CSV at 1 and 8 threads: "
                    f"{'byte-identical' if text1 == text8 else 'DIFFERENT'} "
                    f"({len(text1.encode())} bytes)")
        c.ok = text1 == text8


# 5 ------------------------------------------------------------------------

def test_criterion_5_conductor_limit(capsys):
    # pairs with omega z / c >= 1, where a finite |eps| = 1e8 is already a mirror
    pairs = [(0.5, 2.0), (1.0, 1.0), (1.0, 3.7), (2.0, 0.8), (2.0, 5.0),
             (3.0, 1.1), (5.0, 0.5), (5.0, 4.0), (10.0, 0.25), (10.0, 3.0)]
    m = mat.Constant(1.0 + 1e8j)
    with Criterion(capsys, 5, 60.0) as c:
        worst = 0.0
        for w, z in pairs:
            a, b = im_g_halfspace(w, z, m), im_g_conductor(w, z)
            for x, y in ((a.im_gxx, b.im_gxx), (a.im_gyy, b.im_gyy), (a.im_gzz, b.im_gzz)):
                worst = max(worst, abs(x - y) / abs(y))
        c.detail = f"max relative deviation over 10 (omega, z) pairs = {worst:.2e} (<= 5e-3)"
        c.ok = worst <= 5e-3


# 6 ------------------------------------------------------------------------

def test_criterion_6_free_space_anchor(capsys):
    with Criterion(capsys, 6, 30.0) as c:
        worst = 0.0
        for w in np.geomspace(1e-2, 10, 13):
            ref = w / (6 * math.pi)
            xx, zz = direct_term_quadrature(w)
            worst = max(worst, abs(xx - ref) / ref, abs(zz - ref) / ref)
        c.detail = f"direct-term integral vs omega/(6 pi c), 3 decades: max rel dev {worst:.1e} (<= 1e-3)"
        c.ok = worst <= 1e-3


# 7 ------------------------------------------------------------------------

def test_criterion_7_oracle_closure(capsys):
    nu0, g = 1.0, 0.1
    chi0 = BodySusceptibility.lorentz(1.0, nu0, g, zz=(0.7, 1.3, 0.2))
    with Criterion(capsys, 7, 60.0) as c:
        nu, wt = oracle.log_grid(nu0, 4000)
        bath = oracle.couplings_from_chi(chi0, nu, wt)
        mids = oracle.staggered_frequencies(bath)
        keep = (np.abs(mids - nu0) > 5 * g) & (mids > nu0 / 20) & (mids < 20 * nu0)
        chi_rep = oracle.verify_chi(bath, chi0, mids[keep], 0.01)
        gam = []
        for m, w0, T in ((0, 0.0, 0.5), (1, 0.1, 0.5), (2, 0.05, 0.0)):
            rep = oracle.verify_gamma(bath.with_rotation(m, w0), chi0, T,
                                      np.linspace(0.3, 2.5, 45), 0.01)
            gam += [r.rel_error for r in rep.rows if r.component == "Gamma_xx"]
        shift = oracle.shift_identity_error(bath.with_rotation(1, 0.13), np.linspace(0.1, 3, 60))
        c.detail = (f"Re chi max rel err {chi_rep.worst.rel_error:.1e} (<= 1e-2); "
                    f"Gamma_xx {max(gam):.1e} (<= 1e-2); shift identity {shift:.1e} (<= 1e-12)")
        c.ok = chi_rep.passed and max(gam) <= 0.01 and shift <= 1e-12


# 8 ------------------------------------------------------------------------

def test_criterion_8_quadrature_self_consistency(capsys):
    rng = np.random.default_rng(808)
    with Criterion(capsys, 8, 300.0) as c:
        worst = 0.0
        for _ in range(10):
            T = float(rng.uniform(0, 2))
            T0 = float(rng.choice([T, rng.uniform(0, 2)]))
            body = random_body(rng, T, float(rng.uniform(0.1, 4)))
            env = Environment(random_geometry(rng), T0)
            coarse, fine = QuadratureConfig(rel_tol=1e-6), QuadratureConfig(rel_tol=5e-7)
            for fn in (radiated_power, friction_torque):
                a, b = fn(body, env, coarse), fn(body, env, fine)
                ratio = abs(a.value - b.value) / a.error if a.error else (
                    0.0 if a.value == b.value else math.inf)
                worst = max(worst, ratio)
        c.detail = (f"max |X(tol/2) - X(tol)| / reported error = {worst:.2e} (< 1) "
                    "over 10 scenarios, X = P and M")
        c.ok = worst < 1


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
