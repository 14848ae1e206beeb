"""Run configuration: TOML documents plus command-line overrides."""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .hidden_time_sim import Arc, AngularDistribution, TwoSlitConfig, default_two_slit

#: Seed used when neither the command line nor the config document gives one.
DEFAULT_SEED = 20011213

DEFAULT_TOLERANCES = {
    "dirac_residual": 1e-12,
    "lorentz_norm": 1e-12,
    "sandwich": 1e-10,
    "hyperbolic": 1e-12,
    "time_field": 1e-12,
    "bw_residual": 1e-10,
    "symmetry": 1e-12,
    "quantization": 1e-12,
    "winding_residue": 1e-3,
    "sigmas": 4.0,
}

DEFAULT_KINEMATICS = (
    {"m": 1.0, "v": [0.0, 0.0, 0.0]},
    {"m": 1.0, "v": [0.0, 0.0, 0.6]},
    {"m": 1.0, "v": [0.6, 0.0, 0.0]},
    {"m": 2.5, "v": [0.0, 0.0, 0.0]},
    {"m": 2.0, "v": [0.3, -0.4, 0.5]},
)

DEFAULT_G_VALUES = ("0", "1/2", "1", "3/2")


@dataclass
class RunConfig:
    command: str
    seed: int = DEFAULT_SEED
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    kinematics: list = field(default_factory=lambda: [dict(k) for k in DEFAULT_KINEMATICS])
    output_format: str = "json"
    output_path: str | None = None
    random_cases: int = 100
    g_values: list = field(default_factory=lambda: [Fraction(g) for g in DEFAULT_G_VALUES])
    loop_samples: int = 360
    order: int = 2
    bw_cases: int = 20
    n: int = 1_000_000
    partitions: int = 1
    experiment: object = None

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}", "seed")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.output_format!r}", "format")
        if self.experiment is None:
            self.experiment = default_two_slit()


def load_document(path: str | Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(str(exc), "config") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"not a valid TOML document ({exc})", "config") from None


def _number(value, name: str, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", name)
    out = kind(value)
    if kind is float and not math.isfinite(out):
        raise ConfigError("must be finite", name)
    return out


def _fraction(value, name: str) -> Fraction:
    try:
        if isinstance(value, float):
            return Fraction(repr(value))
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(f"not a rational number: {value!r}", name) from None


def _arc(item, name: str, label_key: str) -> Arc:
    if not isinstance(item, dict):
        raise ConfigError("arc entries must be tables", name)
    for key in ("start", "end", label_key):
        if key not in item:
            raise ConfigError(f"missing key {key!r}", name)
    payload = item.get("payload")
    return Arc(
        _number(item["start"], f"{name}.start"),
        _number(item["end"], f"{name}.end"),
        str(item[label_key]),
        None if payload is None else _number(payload, f"{name}.payload"),
    )


def parse_experiment(doc: dict):
    """Build a :class:`TwoSlitConfig` (kind ``two_slit``) or an
    ``(AngularDistribution, bins)`` pair (kind ``arcs``)."""
    kind = doc.get("kind", "two_slit")
    if kind == "two_slit":
        for key in ("slits", "paths", "bins"):
            if key not in doc:
                raise ConfigError("missing", f"experiment.{key}")
        slits = tuple(_arc(a, "experiment.slits", "label") for a in doc["slits"])
        paths = tuple(_arc(a, "experiment.paths", "bin") for a in doc["paths"])
        bins = tuple(str(b) for b in doc["bins"])
        open_slits = doc.get("open_slits")
        try:
            return TwoSlitConfig(slits, paths, bins, None if open_slits is None else frozenset(map(str, open_slits)))
        except ConfigError as exc:
            raise ConfigError(str(exc).split(": ", 1)[-1], f"experiment.{exc.field}") from None
    if kind == "arcs":
        if "arcs" not in doc:
            raise ConfigError("missing", "experiment.arcs")
        arcs = [_arc(a, "experiment.arcs", "label") for a in doc["arcs"]]
        try:
            dist = AngularDistribution(arcs)
        except ConfigError as exc:
            raise ConfigError(str(exc).split(": ", 1)[-1], "experiment.arcs") from None
        return dist, tuple(dist.labels)
    raise ConfigError(f"unknown experiment kind {kind!r}", "experiment.kind")


def build_config(command: str, doc: dict | None = None, **overrides) -> RunConfig:
    """Merge a config document with command-line overrides (``None`` means unset)."""
    doc = dict(doc or {})
    cfg = RunConfig(command)
    if "seed" in doc:
        cfg.seed = _number(doc["seed"], "seed", int)
    tol = doc.get("tolerances", {})
    for key, value in tol.items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError("unknown tolerance", f"tolerances.{key}")
        cfg.tolerances[key] = _number(value, f"tolerances.{key}")

    verify = doc.get("verify", {})
    if "random_cases" in verify:
        cfg.random_cases = _number(verify["random_cases"], "verify.random_cases", int)
    if "kinematics" in verify:
        cases = []
        for i, case in enumerate(verify["kinematics"]):
            name = f"verify.kinematics[{i}]"
            if not isinstance(case, dict) or "m" not in case or "v" not in case:
                raise ConfigError("each case needs m and v", name)
            v = case["v"]
            if not isinstance(v, list) or len(v) != 3:
                raise ConfigError("v must be a list of 3 numbers", f"{name}.v")
            entry = {"m": _number(case["m"], f"{name}.m"), "v": [_number(c, f"{name}.v") for c in v]}
            if "operator_mass" in case:
                entry["operator_mass"] = _number(case["operator_mass"], f"{name}.operator_mass")
            cases.append(entry)
        cfg.kinematics = cases

    winding = doc.get("winding", {})
    if "g" in winding:
        cfg.g_values = [_fraction(g, "winding.g") for g in winding["g"]]
    if "samples" in winding:
        cfg.loop_samples = _number(winding["samples"], "winding.samples", int)

    bw = doc.get("bw", {})
    if "order" in bw:
        cfg.order = _number(bw["order"], "bw.order", int)
    if "cases" in bw:
        cfg.bw_cases = _number(bw["cases"], "bw.cases", int)

    sim = doc.get("simulate", {})
    if "n" in sim:
        cfg.n = _number(sim["n"], "simulate.n", int)
    if "experiment" in doc:
        cfg.experiment = parse_experiment(doc["experiment"])

    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    cfg.__post_init__()
    return cfg
