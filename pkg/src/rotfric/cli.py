"""Command-line front end.

    rotfric run SCENARIO.yaml        evaluate a sweep and write CSV
    rotfric verify SCENARIO.yaml     discrete-bath check of the noise kernels
    rotfric print-defaults           print the default scenario

Exit codes: 0 success, 1 invalid input, 2 every sweep point failed,
3 verification failed.  ``ROTFRIC_THREADS`` (or ``--threads``) sets the
number of worker threads; output does not depend on it.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from . import __version__, oracle
from .config import Scenario, ScenarioConfig, default_config
from .errors import ConfigError, QuadratureError, RotfricError
from .greens import Vacuum
from .observables import (Environment, default_workers, friction_torque,
                          power_spectral_density, radiated_power,
                          torque_spectral_density)
from .response import BodySusceptibility

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3

COLUMNS = {
    "separation": ("z_m", "P_W", "P_vacuum_W", "M_Nm", "P_abserr_W", "M_abserr_Nm", "error"),
    "spectrum": ("omega_rad_s", "dP_zz", "dP_xx_minus", "dP_xx_plus", "dP_total",
                 "dP_vacuum_total", "dM_plus", "dM_minus", "dM_total", "error"),
    "torque_curve": ("omega0_rad_s", "M_Nm", "M_abserr_Nm", "P_W", "P_abserr_W", "error"),
}

_FAILURES = (QuadratureError, ArithmeticError, ValueError)


def _map(fn, items, workers):
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))   # map keeps input order


def _env_at(sc: Scenario, z):
    g = sc.environment.geometry
    if isinstance(g, Vacuum):
        return sc.environment
    return replace(sc.environment, geometry=replace(g, z=z))


def _fmt(v, prec):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "nan"
    return f"{float(v):.{prec}g}"


def _failure(exc):
    return f"{type(exc).__name__}: {exc}"


def evaluate(sc: Scenario, workers=1):
    """Rows (tuples of numbers plus an error string) in grid order."""
    u = sc.units
    P, M, F = u.power, u.torque, u.frequency
    if sc.kind == "separation":
        try:
            pvac, vac_err = radiated_power(
                sc.body, Environment(Vacuum(), sc.environment.T0), sc.quad).value * P, ""
        except _FAILURES as exc:
            pvac, vac_err = None, "vacuum reference " + _failure(exc)

        def point(z):
            try:
                p = radiated_power(sc.body, _env_at(sc, z), sc.quad)
                m = friction_torque(sc.body, _env_at(sc, z), sc.quad)
            except _FAILURES as exc:
                return (z * u.length, None, pvac, None, None, None, _failure(exc))
            # a failed reference does not spoil the point itself
            return (z * u.length, p.value * P, pvac, m.value * M,
                    p.error * P, m.error * M, vac_err)
        return _map(point, sc.grid, workers)

    if sc.kind == "spectrum":
        env = sc.environment
        env_vac = Environment(Vacuum(), env.T0)
        # densities per unit angular frequency: W s / rad and N m s / rad
        dP, dM = P / F, M / F

        def point(w):
            try:
                p = power_spectral_density(sc.body, env, w, quad=sc.quad)
                pv = power_spectral_density(sc.body, env_vac, w)
                m = torque_spectral_density(sc.body, env, w, quad=sc.quad)
            except _FAILURES as exc:
                return (w * F,) + (None,) * 8 + (_failure(exc),)
            return (w * F, p.zz * dP, p.xx_minus * dP, p.xx_plus * dP, p.total * dP,
                    pv.total * dP, m.plus * dM, m.minus * dM, m.total * dM, "")
        return _map(point, sc.grid, workers)

    def point(w0):
        body = replace(sc.body, omega0=w0)
        try:
            m = friction_torque(body, sc.environment, sc.quad)
            p = radiated_power(body, sc.environment, sc.quad)
        except _FAILURES as exc:
            return (w0 * F, None, None, None, None, _failure(exc))
        return (w0 * F, m.value * M, m.error * M, p.value * P, p.error * P, "")
    return _map(point, sc.grid, workers)


def render_csv(cfg: ScenarioConfig, sc: Scenario, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# rotfric {__version__}\n")
    buf.write(f"# config_sha256 {cfg.canonical_hash()}\n")
    buf.write(f"# sweep {sc.kind}\n")
    for line in cfg.to_text().splitlines():
        buf.write(f"# config {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS[sc.kind])
    for r in rows:
        w.writerow([_fmt(v, sc.precision) for v in r[:-1]] + [r[-1]])
    return buf.getvalue()


def _failed(sc: Scenario, row):
    """A row whose primary values are missing."""
    return row[1] is None


def _summary(sc: Scenario, rows):
    ok = [r for r in rows if not _failed(sc, r)]
    head = f"{sc.kind}: {len(ok)}/{len(rows)} points ok"
    if not ok:
        return head
    last = ok[-1]
    if sc.kind == "separation":
        vac = "n/a" if last[2] is None else f"{last[2]:.6g} W"
        return (f"{head}; at z = {last[0]:.4g} m: P = {last[1]:.6g} +- {last[4]:.2g} W "
                f"(vacuum {vac}), M = {last[3]:.6g} +- {last[5]:.2g} N m")
    if sc.kind == "spectrum":
        w = np.array([r[0] for r in ok])
        p = np.array([r[4] for r in ok])
        m = np.array([r[8] for r in ok])
        return (f"{head}; on-grid trapezoid totals: P = {trapezoid(p, w):.6g} W, "
                f"M = {trapezoid(m, w):.6g} N m")
    return (f"{head}; at omega0 = {last[0]:.4g} rad/s: M = {last[1]:.6g} +- {last[2]:.2g} N m, "
            f"P = {last[3]:.6g} +- {last[4]:.2g} W")


def cmd_run(args) -> int:
    cfg = ScenarioConfig.from_file(args.config)
    sc = cfg.build()
    out = Path(args.output) if args.output else Path(sc.output_path)
    rows = evaluate(sc, args.threads or default_workers())
    text = render_csv(cfg, sc, rows)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    print(_summary(sc, rows))
    for r in rows:
        if r[-1]:
            kind = "failed" if _failed(sc, r) else "warning"
            print(f"point {r[0]:.6g} {kind}: {r[-1]}", file=sys.stderr)
    if all(_failed(sc, r) for r in rows):
        return EXIT_NUMERICAL
    return EXIT_OK


def run_verification(settings):
    """Oracle checks for one verify block; returns (reports, shift_error)."""
    s = settings
    chi0 = BodySusceptibility.lorentz(s["strength"], s["resonance"], s["damping"])
    nu, w = oracle.log_grid(s["resonance"], s["modes"])
    bath = oracle.couplings_from_chi(chi0, nu, w, s["m"], s["omega0"])
    if s["corrupt_mode"] is not None:
        idx = (int(np.argmin(np.abs(nu - s["resonance"]))) if s["corrupt_mode"] == "peak"
               else int(s["corrupt_mode"]))
        bath = oracle.corrupt_mode(bath, idx)
    nu0, g = s["resonance"], s["damping"]
    mids = oracle.staggered_frequencies(bath)
    keep = (np.abs(mids - nu0) > 5 * g) & (mids > nu0 / 20) & (mids < 20 * nu0)
    chi_report = oracle.verify_chi(bath, chi0, mids[keep][::10], s["threshold"])
    gamma_report = oracle.verify_gamma(bath, chi0, s["T"],
                                       np.linspace(0.3, 2.5, 23) * nu0, s["threshold"])
    probe = bath.with_rotation(1, s["omega0"] if s["omega0"] else 0.1 * nu0)
    shift = oracle.shift_identity_error(probe, np.linspace(0.1, 3.0, 30) * nu0)
    return (chi_report, gamma_report), shift


def cmd_verify(args) -> int:
    cfg = ScenarioConfig.from_file(args.config)
    settings = cfg.verify_settings()
    reports, shift = run_verification(settings)
    wc = float(cfg.data["units"]["omega_c_rad_s"])
    print(f"frequencies in units of omega_c = {wc:.6g} rad/s\n")
    for rep in reports:
        print(rep.to_text())
        print()
    shift_ok = shift <= 1e-12
    print(f"{'PASS' if shift_ok else 'FAIL'}: shift identity max rel error {shift:.3e} (threshold 1e-12)")
    failed = [r for r in reports if not r.passed]
    if failed or not shift_ok:
        # worst offender of every component over threshold, worst first
        worst = {}
        for rep in failed:
            for row in rep.rows:
                if row.rel_error > rep.threshold and (
                        row.component not in worst
                        or row.rel_error > worst[row.component].rel_error):
                    worst[row.component] = row
        for row in sorted(worst.values(), key=lambda x: -x.rel_error):
            print(f"verification failed: {row.component} at omega = {row.omega:.6g} "
                  f"(rel error {row.rel_error:.3e})", file=sys.stderr)
        if not shift_ok:
            print("verification failed: shift identity", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_print_defaults(args) -> int:
    sys.stdout.write(default_config().to_text())
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="rotfric", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rotfric {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="evaluate a sweep and write CSV")
    r.add_argument("config")
    r.add_argument("-o", "--output", help="override output.path")
    r.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $ROTFRIC_THREADS or 1)")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("verify", help="discrete-bath check of the noise kernels")
    v.add_argument("config")
    v.set_defaults(func=cmd_verify)
    d = sub.add_parser("print-defaults", help="print the default scenario")
    d.set_defaults(func=cmd_print_defaults)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:   # argparse usage errors count as invalid input
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except QuadratureError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except RotfricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
