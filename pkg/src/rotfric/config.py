"""Scenario files.

A scenario is a YAML mapping.  Physical quantities are SI with the unit in
the key name; everything is converted to internal units by
:meth:`ScenarioConfig.build`.  Unknown keys are rejected so that typos do
not silently fall back to defaults.

Example (the defaults, printed by ``rotfric print-defaults``)::

    body:
      radius_m: 1.0e-08
      material: {model: drude, sigma0_S_per_m: 16000000.0}
      T_K: 10.0
      omega0_rad_s: 30000000000000.0
    environment:
      geometry: conductor
      T0_K: 1.0
    sweep:
      kind: separation
      z_m: {start: 1.0e-05, stop: 0.001, num: 60, spacing: log}
    ...
"""
from __future__ import annotations

import copy
import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from . import materials as mat
from .errors import ConfigError, RotfricError
from .greens import HalfSpace, IdealConductor, Vacuum
from .observables import Environment, QuadratureConfig, SpinningBody
from .response import Polarizability
from .units import HBAR_SI, KB_SI, UnitSystem

SWEEP_KINDS = ("separation", "spectrum", "torque_curve")
GEOMETRIES = ("vacuum", "halfspace", "conductor")

# 10 nm gold sphere at 10 K over a 1 K mirror.  The rotation rate is not
# fixed by the reference setup; 3e13 rad/s puts the emission edge at omega0
# well above the thermal scale, which is what makes P(z) oscillate.
DEFAULTS: dict = {
    "body": {
        "radius_m": 1.0e-8,
        "material": {"model": "drude", "sigma0_S_per_m": 1.6e7},
        "T_K": 10.0,
        "omega0_rad_s": 3.0e13,
    },
    "environment": {"geometry": "conductor", "T0_K": 1.0},
    "sweep": {
        "kind": "separation",
        "z_m": {"start": 1.0e-5, "stop": 1.0e-3, "num": 60, "spacing": "log"},
    },
    "quadrature": {"rel_tol": 1.0e-6, "abs_tol": 0.0, "max_refinements": 2000},
    "units": {"omega_c_rad_s": KB_SI * 1.0 / HBAR_SI},   # 1 K
    "output": {"path": "rotfric.csv", "precision": 9},
}

VERIFY_DEFAULTS: dict = {
    "susceptibility": {"strength_rad2_s2": None, "resonance_rad_s": None,
                       "damping_rad_s": None},
    "modes": 4000,
    "T_K": 0.5,
    "omega0_rad_s": 0.0,
    "m": 0,
    "threshold": 0.01,
    "corrupt_mode": None,
}


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads 1e10-style floats (YAML 1.2 rule)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                   |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                   |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                   |[-+]?\.(?:inf|Inf|INF)
                   |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."))


def _fail(path, msg):
    raise ConfigError(path, msg)


def _mapping(obj, path):
    if not isinstance(obj, dict):
        _fail(path, f"expected a mapping, got {type(obj).__name__}")
    return obj


def _check_keys(obj, allowed, path):
    extra = sorted(set(obj) - set(allowed))
    if extra:
        _fail(f"{path}.{extra[0]}" if path else extra[0], "unknown key")


def _number(obj, key, path, *, positive=False, nonneg=False, default=Any):
    p = f"{path}.{key}"
    if key not in obj:
        if default is Any:
            _fail(p, "required")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(p, f"expected a number, got {v!r}")
    v = float(v)
    if not np.isfinite(v):
        _fail(p, "must be finite")
    if positive and not v > 0:
        _fail(p, "must be > 0")
    if nonneg and v < 0:
        _fail(p, "must be >= 0")
    return v


def _grid(obj, path, *, positive=True):
    """Either a list of values or {start, stop, num, spacing}."""
    if isinstance(obj, (list, tuple)):
        vals = []
        for i, v in enumerate(obj):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                _fail(f"{path}[{i}]", f"expected a number, got {v!r}")
            vals.append(float(v))
        g = np.array(vals)
    else:
        obj = _mapping(obj, path)
        _check_keys(obj, ("start", "stop", "num", "spacing"), path)
        start = _number(obj, "start", path, positive=positive)
        stop = _number(obj, "stop", path, positive=positive)
        num = obj.get("num")
        if isinstance(num, bool) or not isinstance(num, int) or num < 1:
            _fail(f"{path}.num", "must be an integer >= 1")
        spacing = obj.get("spacing", "log")
        if spacing == "log":
            g = np.geomspace(start, stop, num)
        elif spacing == "linear":
            g = np.linspace(start, stop, num)
        else:
            _fail(f"{path}.spacing", "must be 'log' or 'linear'")
    if g.size == 0:
        _fail(path, "grid is empty")
    if positive and np.any(g <= 0):
        _fail(path, "values must be > 0")
    if np.any(np.diff(g) <= 0):
        _fail(path, "values must be strictly increasing")
    return g


def _material(obj, path, units: UnitSystem, base: Optional[Path]):
    obj = _mapping(obj, path)
    model = obj.get("model")
    if model == "drude":
        _check_keys(obj, ("model", "sigma0_S_per_m"), path)
        s = _number(obj, "sigma0_S_per_m", path, positive=True)
        return mat.Drude(units.to_internal(s, "conductivity"))
    if model == "lorentz":
        _check_keys(obj, ("model", "terms"), path)
        terms = obj.get("terms")
        if not isinstance(terms, list) or not terms:
            _fail(f"{path}.terms", "expected a non-empty list")
        out = []
        for i, t in enumerate(terms):
            tp = f"{path}.terms[{i}]"
            t = _mapping(t, tp)
            _check_keys(t, ("strength_rad2_s2", "resonance_rad_s", "damping_rad_s"), tp)
            wc = units.omega_c
            out.append((_number(t, "strength_rad2_s2", tp, nonneg=True) / wc**2,
                        _number(t, "resonance_rad_s", tp, nonneg=True) / wc,
                        _number(t, "damping_rad_s", tp, positive=True) / wc))
        return mat.Lorentz(tuple(out))
    if model == "constant":
        _check_keys(obj, ("model", "eps_re", "eps_im"), path)
        return mat.Constant(complex(_number(obj, "eps_re", path),
                                    _number(obj, "eps_im", path, nonneg=True)))
    if model == "tabulated":
        _check_keys(obj, ("model", "path"), path)
        fp = obj.get("path")
        if not isinstance(fp, str):
            _fail(f"{path}.path", "expected a file name")
        fp = Path(fp)
        if base is not None and not fp.is_absolute():
            fp = base / fp
        try:
            t = mat.load_tabulated(fp)
        except OSError as exc:
            _fail(f"{path}.path", str(exc))
        except RotfricError as exc:
            _fail(f"{path}.path", str(exc))
        return mat.Tabulated(t.omega / units.omega_c, t.eps)
    _fail(f"{path}.model", f"expected one of drude, lorentz, constant, tabulated; got {model!r}")


# sections taken whole from the user file instead of merged with defaults
_REPLACED = ("material", "material_zz", "sweep")


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in _REPLACED:
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass(frozen=True, eq=False)
class Scenario:
    """A validated scenario in internal units, ready to run."""

    units: UnitSystem
    body: SpinningBody
    environment: Environment
    kind: str
    grid: np.ndarray            # z, omega or omega0 (internal units)
    z: Optional[float]          # fixed separation for spectrum / torque_curve
    quad: QuadratureConfig
    output_path: str
    precision: int


@dataclass(frozen=True)
class ScenarioConfig:
    """Raw, validated scenario mapping (SI units, defaults filled in)."""

    data: dict
    base_dir: Optional[str] = None

    @classmethod
    def from_text(cls, text, base_dir=None):
        try:
            raw = yaml.load(text, Loader=_Loader)
        except yaml.YAMLError as exc:
            raise ConfigError("<file>", f"not valid YAML: {exc}") from None
        if raw is None:
            raw = {}
        _mapping(raw, "<root>")
        _check_keys(raw, tuple(DEFAULTS) + ("verify",), "")
        cfg = cls(_merge(DEFAULTS, raw), base_dir)
        cfg.build()
        return cfg

    @classmethod
    def from_file(cls, path):
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(str(p), str(exc)) from None
        return cls.from_text(text, base_dir=str(p.parent))

    def to_text(self):
        return yaml.safe_dump(self.data, sort_keys=True, default_flow_style=False)

    def canonical_hash(self):
        blob = json.dumps(self.data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def build(self) -> Scenario:
        d = self.data
        base = Path(self.base_dir) if self.base_dir else None

        u = _mapping(d["units"], "units")
        _check_keys(u, ("omega_c_rad_s",), "units")
        units = UnitSystem(_number(u, "omega_c_rad_s", "units", positive=True))

        b = _mapping(d["body"], "body")
        _check_keys(b, ("radius_m", "material", "material_zz", "T_K", "omega0_rad_s"), "body")
        radius = units.to_internal(_number(b, "radius_m", "body", positive=True), "length")
        m_xx = _material(b["material"], "body.material", units, base)
        m_zz = (_material(b["material_zz"], "body.material_zz", units, base)
                if b.get("material_zz") is not None else None)
        T = units.to_internal(_number(b, "T_K", "body", nonneg=True), "temperature")
        w0 = units.to_internal(_number(b, "omega0_rad_s", "body"), "frequency")
        body = SpinningBody(Polarizability(radius, m_xx, m_zz), T, w0)

        e = _mapping(d["environment"], "environment")
        _check_keys(e, ("geometry", "material", "T0_K"), "environment")
        T0 = units.to_internal(_number(e, "T0_K", "environment", nonneg=True), "temperature")
        geom = e.get("geometry")
        if geom not in GEOMETRIES:
            _fail("environment.geometry", f"expected one of {', '.join(GEOMETRIES)}; got {geom!r}")
        if geom == "halfspace" and "material" not in e:
            _fail("environment.material", "required for a half-space")
        if geom != "halfspace" and "material" in e:
            _fail("environment.material", f"not used with geometry {geom!r}")
        env_mat = (_material(e["material"], "environment.material", units, base)
                   if geom == "halfspace" else None)

        s = _mapping(d["sweep"], "sweep")
        kind = s.get("kind")
        if kind not in SWEEP_KINDS:
            _fail("sweep.kind", f"expected one of {', '.join(SWEEP_KINDS)}; got {kind!r}")
        grid_key = {"separation": "z_m", "spectrum": "omega_rad_s",
                    "torque_curve": "omega0_rad_s"}[kind]
        allowed = ("kind", grid_key) + (() if kind == "separation" else ("z_m",))
        _check_keys(s, allowed, "sweep")
        if grid_key not in s:
            _fail(f"sweep.{grid_key}", f"required for kind {kind!r}")
        qty = "length" if kind == "separation" else "frequency"
        grid = units.to_internal(_grid(s[grid_key], f"sweep.{grid_key}",
                                       positive=kind != "torque_curve"), qty)
        z = None
        if kind == "separation":
            if geom == "vacuum":
                _fail("environment.geometry", "a separation sweep needs a surface")
        elif geom != "vacuum":
            z = units.to_internal(_number(s, "z_m", "sweep", positive=True), "length")

        def geometry_at(zz):
            if geom == "vacuum":
                return Vacuum()
            if geom == "conductor":
                return IdealConductor(zz)
            return HalfSpace(env_mat, zz)

        env = Environment(geometry_at(grid[0] if kind == "separation" else z), T0)

        q = _mapping(d["quadrature"], "quadrature")
        _check_keys(q, ("rel_tol", "abs_tol", "max_refinements"), "quadrature")
        rel = _number(q, "rel_tol", "quadrature", positive=True)
        if not 1e-12 < rel < 1e-2:
            _fail("quadrature.rel_tol", "must lie in (1e-12, 1e-2)")
        ref = q.get("max_refinements")
        if isinstance(ref, bool) or not isinstance(ref, int) or ref < 1:
            _fail("quadrature.max_refinements", "must be an integer >= 1")
        quad = QuadratureConfig(rel, _number(q, "abs_tol", "quadrature", nonneg=True), ref)

        o = _mapping(d["output"], "output")
        _check_keys(o, ("path", "precision"), "output")
        if not isinstance(o.get("path"), str) or not o["path"]:
            _fail("output.path", "expected a file name")
        prec = o.get("precision")
        if isinstance(prec, bool) or not isinstance(prec, int) or not 1 <= prec <= 17:
            _fail("output.precision", "must be an integer in [1, 17]")
        out = o["path"]
        if base is not None and not Path(out).is_absolute():
            out = str(base / out)

        if "verify" in d:
            self.verify_settings()
        return Scenario(units, body, env, kind, grid, z, quad, out, prec)

    def verify_settings(self):
        """Validated oracle settings in internal units."""
        v = _merge(VERIFY_DEFAULTS, _mapping(self.data.get("verify") or {}, "verify"))
        _check_keys(v, tuple(VERIFY_DEFAULTS), "verify")
        wc = float(self.data["units"]["omega_c_rad_s"])
        units = UnitSystem(wc)
        s = _mapping(v["susceptibility"], "verify.susceptibility")
        _check_keys(s, ("strength_rad2_s2", "resonance_rad_s", "damping_rad_s"),
                    "verify.susceptibility")
        # unset line parameters default to a line at omega_c of width 0.1 omega_c
        for k, dflt in (("strength_rad2_s2", wc**2), ("resonance_rad_s", wc),
                        ("damping_rad_s", 0.1 * wc)):
            if s.get(k) is None:
                s[k] = dflt
        strength = _number(s, "strength_rad2_s2", "verify.susceptibility", nonneg=True) / wc**2
        res = _number(s, "resonance_rad_s", "verify.susceptibility", positive=True) / wc
        damp = _number(s, "damping_rad_s", "verify.susceptibility", positive=True) / wc
        modes = v["modes"]
        if isinstance(modes, bool) or not isinstance(modes, int) or modes < 2:
            _fail("verify.modes", "must be an integer >= 2")
        m = v["m"]
        if isinstance(m, bool) or not isinstance(m, int):
            _fail("verify.m", "must be an integer")
        cm = v["corrupt_mode"]
        if cm is not None and cm != "peak" and (isinstance(cm, bool) or not isinstance(cm, int)
                                                 or not 0 <= cm < modes):
            _fail("verify.corrupt_mode", "must be null, 'peak' or a mode index")
        return {
            "strength": strength, "resonance": res, "damping": damp, "modes": modes,
            "T": units.to_internal(_number(v, "T_K", "verify", nonneg=True), "temperature"),
            "omega0": units.to_internal(_number(v, "omega0_rad_s", "verify"), "frequency"),
            "m": m,
            "threshold": _number(v, "threshold", "verify", positive=True),
            "corrupt_mode": cm,
        }


def default_config() -> ScenarioConfig:
    return ScenarioConfig(copy.deepcopy(DEFAULTS))
