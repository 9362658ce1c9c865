"""Run configuration: one JSON document, defaults in one table.

Every field is listed in :data:`DEFAULTS`.  Loading rejects unknown keys and
validates ranges before anything is computed; the builders turn a validated
configuration into library objects.

=============================  ===========  ==========================================
key                            default      meaning
=============================  ===========  ==========================================
weight.kind                    "standard"   "standard" or "custom"
weight.alpha                   0.0          standard weight exponent (also kernel alpha)
weight.profile                 null         custom profile, expression in u = r^2
weight.delta                   null         admissibility exponent of a custom profile
measure.variant                "lebesgue"   lebesgue, weighted, standard, density,
                                            atomic, boundary_atoms, pullback, zero
measure.alpha                  0.0          exponent of the "standard" measure dA_alpha
measure.density                null         radial density, expression in u = |z|^2
measure.support_radius         null         truncate the measure to |z| < radius
measure.atoms                  []           list of [re, im, mass]
measure.count                  40           number of atoms in boundary_atoms
measure.n                      1            iterate of the pullback measure
p, q                           2.0, 2.0     exponents
t                              null         Berezin exponent (null: 2, or threshold + 1)
R                              0.5          averaging radius
lattice_r                      0.5          lattice separation
truncation_radius              0.999        outermost probe radius
quadrature.shells              256          global radial panels
quadrature.angular             256          global angular nodes
quadrature.cutoff              0.9995       start of the boundary tail panel
quadrature.seed                42           seed for sampled audits
compop.psi                     "1"          multiplier, expression in z
compop.phi                     "z"          self-map, expression in z
compop.n_max                   12           largest iterate in power diagnostics
output.path                    null         null writes to stdout
output.format                  "csv"        "csv" or "json"
=============================  ===========  ==========================================
"""

import copy
import json
import math

import numpy as np

from . import expr as _expr
from .errors import ParameterError
from .measure import atomic, lebesgue, radial_density, truncated, weighted_area, zero_measure
from .quadrature import QuadratureSpec
from .weights import make_custom_weight, make_standard_weight

DEFAULTS = {
    "weight": {"kind": "standard", "alpha": 0.0, "profile": None, "delta": None},
    "measure": {"variant": "lebesgue", "alpha": 0.0, "density": None, "support_radius": None,
                "atoms": [], "count": 40, "n": 1},
    "p": 2.0,
    "q": 2.0,
    "t": None,
    "R": 0.5,
    "lattice_r": 0.5,
    "truncation_radius": 0.999,
    "quadrature": {"shells": 256, "angular": 256, "cutoff": 0.9995, "seed": 42},
    "compop": {"psi": "1", "phi": "z", "n_max": 12},
    "output": {"path": None, "format": "csv"},
}

MEASURE_VARIANTS = ("lebesgue", "weighted", "standard", "density", "atomic",
                    "boundary_atoms", "pullback", "zero")


class ConfigError(ParameterError):
    """Malformed or out-of-range configuration."""


def _merge(base, update, path=""):
    for key, value in update.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown configuration key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"configuration key {where!r} must be an object")
            _merge(base[key], value, where + ".")
        else:
            base[key] = value


def load_config(text=None, overrides=None):
    """Defaults, then the JSON document ``text``, then dotted ``overrides``."""
    cfg = copy.deepcopy(DEFAULTS)
    if text:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"configuration is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
        _merge(cfg, doc)
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        node = cfg
        parts = dotted.split(".")
        for part in parts[:-1]:
            node = node[part]
        node[parts[-1]] = value
    validate(cfg)
    return cfg


def _number(cfg, key, value, lo=None, hi=None, open_lo=True, open_hi=True, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number")
    if integer and int(value) != value:
        raise ConfigError(f"{key} must be an integer")
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    if lo is not None and (value <= lo if open_lo else value < lo):
        raise ConfigError(f"{key}={value} is out of range")
    if hi is not None and (value >= hi if open_hi else value > hi):
        raise ConfigError(f"{key}={value} is out of range")


def validate(cfg):
    """Range checks on every field; raises :class:`ConfigError`."""
    w = cfg["weight"]
    if w["kind"] not in ("standard", "custom"):
        raise ConfigError("weight.kind must be 'standard' or 'custom'")
    _number(cfg, "weight.alpha", w["alpha"], 0.0, open_lo=False)
    if w["kind"] == "custom":
        if not isinstance(w["profile"], str):
            raise ConfigError("weight.profile is required for a custom weight")
        _number(cfg, "weight.delta", w["delta"], 0.0)
    m = cfg["measure"]
    if m["variant"] not in MEASURE_VARIANTS:
        raise ConfigError(f"measure.variant must be one of {', '.join(MEASURE_VARIANTS)}")
    _number(cfg, "measure.alpha", m["alpha"], 0.0, open_lo=False)
    if m["variant"] == "density" and not isinstance(m["density"], str):
        raise ConfigError("measure.density is required for the density variant")
    if m["support_radius"] is not None:
        _number(cfg, "measure.support_radius", m["support_radius"], 0.0, 1.0)
    if not isinstance(m["atoms"], list):
        raise ConfigError("measure.atoms must be a list of [re, im, mass]")
    for atom in m["atoms"]:
        if not (isinstance(atom, list) and len(atom) == 3):
            raise ConfigError("each atom must be [re, im, mass]")
        for v in atom:
            _number(cfg, "measure.atoms entry", v)
    _number(cfg, "measure.count", m["count"], 0, integer=True)
    _number(cfg, "measure.n", m["n"], 0, integer=True)
    _number(cfg, "p", cfg["p"], 0.0)
    _number(cfg, "q", cfg["q"], 0.0)
    if cfg["t"] is not None:
        _number(cfg, "t", cfg["t"], 0.0)
    _number(cfg, "R", cfg["R"], 0.0, 1.0)
    _number(cfg, "lattice_r", cfg["lattice_r"], 0.0, 1.0)
    _number(cfg, "truncation_radius", cfg["truncation_radius"], 0.0, 1.0)
    qd = cfg["quadrature"]
    _number(cfg, "quadrature.shells", qd["shells"], 4, open_lo=False, integer=True)
    _number(cfg, "quadrature.angular", qd["angular"], 8, open_lo=False, integer=True)
    _number(cfg, "quadrature.cutoff", qd["cutoff"], 0.0, 1.0)
    _number(cfg, "quadrature.seed", qd["seed"], 0, open_lo=False, integer=True)
    c = cfg["compop"]
    for key in ("psi", "phi"):
        if not isinstance(c[key], str):
            raise ConfigError(f"compop.{key} must be an expression string")
        _expr.parse(c[key])
    _number(cfg, "compop.n_max", c["n_max"], 0, integer=True)
    o = cfg["output"]
    if o["format"] not in ("csv", "json"):
        raise ConfigError("output.format must be 'csv' or 'json'")
    if o["path"] is not None and not isinstance(o["path"], str):
        raise ConfigError("output.path must be a string or null")


# --------------------------------------------------------------------------
# builders

def build_quadrature(cfg):
    qd = cfg["quadrature"]
    return QuadratureSpec(radial_shells=int(qd["shells"]), angular_nodes=int(qd["angular"]),
                          boundary_cutoff=float(qd["cutoff"]), seed=int(qd["seed"]))


def build_weight(cfg):
    w = cfg["weight"]
    if w["kind"] == "standard":
        return make_standard_weight(w["alpha"])
    func = _expr.radial_function(_expr.parse_radial(w["profile"]))
    return make_custom_weight(lambda r: func(np.asarray(r, dtype=float) ** 2), w["delta"],
                              label=f"custom({w['profile']})")


def truncations(tau):
    """Three nested truncations ending at ``tau`` (0.9, 0.99, 0.999 for 0.999)."""
    return tuple(1.0 - (1.0 - tau) ** (k / 3.0) for k in (1, 2)) + (float(tau),)


def build_params(cfg, weight=None):
    from .carleson import CarlesonParams

    weight = weight or build_weight(cfg)
    alpha = cfg["weight"]["alpha"] if cfg["weight"]["kind"] == "standard" else 0.0
    tau = float(cfg["truncation_radius"])
    return CarlesonParams(p=float(cfg["p"]), q=float(cfg["q"]), t=cfg["t"], R=float(cfg["R"]),
                          alpha=float(alpha), weight=weight,
                          lattice_r=float(cfg["lattice_r"]), lattice_truncation=tau,
                          truncations=truncations(tau))


def build_compop(cfg, weight=None, p=None):
    from .compop import CompOpSpec, expr_map

    weight = weight or build_weight(cfg)
    alpha = cfg["weight"]["alpha"] if cfg["weight"]["kind"] == "standard" else 0.0
    c = cfg["compop"]
    return CompOpSpec(_expr.parse(c["psi"]), expr_map(c["phi"]), float(p or cfg["p"]),
                      weight, float(alpha))


def boundary_atoms(count, p, q, alpha):
    """Atoms at ``1 - 2^-j`` with masses ``(1 - |z_j|^2)^(q(alpha+2)/p) * j``."""
    j = np.arange(1, int(count) + 1, dtype=float)
    z = 1.0 - 2.0 ** -j
    keep = z < 1.0
    j, z = j[keep], z[keep]
    return atomic(z, (1.0 - z * z) ** (q * (alpha + 2.0) / p) * j, "boundary atoms")


def build_measure(cfg, weight=None):
    from .compop import pullback_measure

    weight = weight or build_weight(cfg)
    m = cfg["measure"]
    v = m["variant"]
    if v == "lebesgue":
        out = lebesgue()
    elif v == "weighted":
        out = weighted_area(weight)
    elif v == "standard":
        out = weighted_area(make_standard_weight(m["alpha"]))
    elif v == "density":
        func = _expr.radial_function(_expr.parse_radial(m["density"]))
        out = radial_density(func, f"density({m['density']})")
    elif v == "atomic":
        atoms = np.array(m["atoms"], dtype=float).reshape(-1, 3)
        out = atomic(atoms[:, 0] + 1j * atoms[:, 1], atoms[:, 2])
    elif v == "boundary_atoms":
        alpha = cfg["weight"]["alpha"] if cfg["weight"]["kind"] == "standard" else 0.0
        out = boundary_atoms(m["count"], cfg["p"], cfg["q"], alpha)
    elif v == "pullback":
        out = pullback_measure(build_compop(cfg, weight), int(m["n"]))
    else:
        out = zero_measure()
    if m["support_radius"] is not None:
        out = truncated(out, float(m["support_radius"]))
    return out
