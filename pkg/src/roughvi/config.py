"""Scenario configuration: an INI-style key/value file.

Exponents and scales are kept as exact rationals (``"1/2"``) so the regime
boundary ``gamma = 1 - k`` is represented exactly.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .assembly import InterfaceConductance, PeriodicCoefficient, Source
from .errors import GeometryError, ValidationError
from .geometry import DomainSpec, InterfaceProfile, as_fraction


class ConfigError(ValidationError):
    """Invalid configuration; the message starts with the offending field path."""


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _fractions(text):
    return tuple(as_fraction(v) for v in text.split(","))


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


# (section, key, attribute, parser); order fixes the serialized layout
_SCHEMA = [
    ("scenario", "name", "name", str),
    ("domain", "L", "L", as_fraction),
    ("domain", "ell", "ell", float),
    ("profile", "preset", "profile_preset", str),
    ("profile", "amplitude", "profile_amplitude", float),
    ("profile", "mean", "profile_mean", float),
    ("profile", "samples_y", "profile_samples_y", _floats),
    ("profile", "samples_values", "profile_samples_values", _floats),
    ("coefficient", "preset", "coefficient_preset", str),
    ("coefficient", "alpha", "coefficient_alpha", float),
    ("coefficient", "beta", "coefficient_beta", float),
    ("coefficient", "matrix", "coefficient_matrix", _floats),
    ("conductance", "preset", "conductance_preset", str),
    ("conductance", "value", "conductance_value", float),
    ("conductance", "h0", "conductance_h0", float),
    ("conductance", "zero", "conductance_zero", _bool),
    ("conductance", "samples_y", "conductance_samples_y", _floats),
    ("conductance", "samples_values", "conductance_samples_values", _floats),
    ("exponents", "k", "k", as_fraction),
    ("exponents", "gamma", "gamma", as_fraction),
    ("source", "preset", "source_preset", str),
    ("source", "c", "source_c", float),
    ("source", "flip_x1", "source_flip_x1", as_fraction),
    ("mesh", "nx_per_period", "nx_per_period", int),
    ("mesh", "ny", "ny", int),
    ("mesh", "flat_nx", "flat_nx", int),
    ("mesh", "cell_n", "cell_n", int),
    ("sweep", "eps", "eps_list", _fractions),
    ("sweep", "limit", "limit_regime", str),
    ("sweep", "max_over_median", "max_over_median", float),
    ("solver", "tol", "tol", float),
    ("solver", "max_iter", "max_iter", int),
    ("solver", "relaxation", "relaxation", float),
    ("output", "dir", "out_dir", str),
]

_COEFF_PARAMS = ("mean", "amp", "angle", "sway", "lam_min", "lam_max")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    L: Fraction = Fraction(1)
    ell: float = 1.0
    profile_preset: str = "sine"
    profile_amplitude: float = 0.5
    profile_mean: float = 1.0
    profile_samples_y: tuple | None = None
    profile_samples_values: tuple | None = None
    coefficient_preset: str = "identity"
    coefficient_params: tuple = ()
    coefficient_alpha: float | None = None
    coefficient_beta: float | None = None
    coefficient_matrix: tuple | None = None
    conductance_preset: str = "constant"
    conductance_value: float = 1.0
    conductance_h0: float | None = None
    conductance_zero: bool = False
    conductance_samples_y: tuple | None = None
    conductance_samples_values: tuple | None = None
    k: Fraction = Fraction(1)
    gamma: Fraction = Fraction(0)
    source_preset: str = "split-sign"
    source_c: float = 1.0
    source_flip_x1: Fraction | None = None
    nx_per_period: int = 16
    ny: int = 8
    flat_nx: int | None = None
    cell_n: int = 64
    eps_list: tuple = (Fraction(1, 4), Fraction(1, 8), Fraction(1, 16), Fraction(1, 32))
    limit_regime: str | None = None
    max_over_median: float = 3.0
    tol: float = 1e-10
    max_iter: int = 200000
    relaxation: float = 1.5
    out_dir: str = "out"

    # -- builders -----------------------------------------------------------

    def profile(self) -> InterfaceProfile:
        if self.profile_preset == "sine":
            return InterfaceProfile.sine(self.profile_amplitude, self.profile_mean)
        if self.profile_preset == "sawtooth":
            return InterfaceProfile.sawtooth(self.profile_amplitude, self.profile_mean)
        if self.profile_preset == "user-samples":
            if self.profile_samples_y is None or self.profile_samples_values is None:
                raise ValidationError("user-samples profile needs samples_y and samples_values")
            return InterfaceProfile.from_samples(self.profile_samples_y, self.profile_samples_values)
        raise ValidationError(f"unknown profile preset {self.profile_preset!r}")

    def coefficient(self, scale=1.0) -> PeriodicCoefficient:
        matrix = None if self.coefficient_matrix is None else np.reshape(self.coefficient_matrix, (2, 2))
        return PeriodicCoefficient(self.coefficient_preset, dict(self.coefficient_params),
                                   matrix=matrix, scale=scale,
                                   alpha=self.coefficient_alpha, beta=self.coefficient_beta)

    def conductance(self) -> InterfaceConductance:
        return InterfaceConductance(self.conductance_preset, self.conductance_value,
                                    self.conductance_samples_y, self.conductance_samples_values,
                                    h0=self.conductance_h0, zero=self.conductance_zero)

    def source(self) -> Source:
        flip = None if self.source_flip_x1 is None else float(self.source_flip_x1)
        return Source(self.source_preset, self.source_c, flip)

    def domain(self, eps) -> DomainSpec:
        return DomainSpec(self.L, self.ell, eps, self.k, self.gamma)

    def finest_nx(self):
        return max(self.domain(e).periods for e in self.eps_list) * self.nx_per_period

    # -- validation ---------------------------------------------------------

    def validate(self):
        """Re-check every modelling assumption; raises :class:`ConfigError`."""
        checks = [
            ("profile", self.profile),
            ("coefficient", self.coefficient),
            ("conductance", self.conductance),
            ("source", self.source),
        ]
        built = {}
        for path, build in checks:
            try:
                built[path] = build()
            except (ValidationError, GeometryError) as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        if self.k <= 0:
            raise ConfigError("exponents.k: oscillation exponent must be positive")
        if not self.eps_list:
            raise ConfigError("sweep.eps: empty list")
        prof = built["profile"]
        for e in self.eps_list:
            try:
                d = self.domain(e)
                d.periods
            except ValidationError as exc:
                raise ConfigError(f"sweep.eps: {exc}") from exc
            if d.amplitude_scale * prof.max_value >= d.ell:
                raise ConfigError(f"sweep.eps: interface leaves Q for eps = {e}")
        if self.limit_regime not in (None, "A", "B", "C"):
            raise ConfigError(f"sweep.limit: unknown regime {self.limit_regime!r}")
        if self.nx_per_period < 8:
            raise ConfigError("mesh.nx_per_period: must be >= 8")
        if self.ny < 4:
            raise ConfigError("mesh.ny: must be >= 4")
        return self

    # -- text round trip ----------------------------------------------------

    def to_text(self):
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        for section, key, attr, _ in _SCHEMA:
            value = getattr(self, attr)
            if value is None:
                continue
            if not parser.has_section(section):
                parser.add_section(section)
            parser.set(section, key, _fmt(value))
            if attr == "coefficient_preset":
                for pk, pv in self.coefficient_params:
                    parser.set(section, pk, _fmt(pv))
        lines = []
        for section in parser.sections():
            lines.append(f"[{section}]")
            lines += [f"{k} = {v}" for k, v in parser.items(section)]
            lines.append("")
        return "\n".join(lines)

    def with_overrides(self, **changes):
        return replace(self, **changes)


def parse_config(text, validate=True) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"syntax: {exc}") from exc
    known = {(s, k) for s, k, _, _ in _SCHEMA}
    values = {}
    for section, key, attr, conv in _SCHEMA:
        if parser.has_option(section, key):
            raw = parser.get(section, key)
            try:
                values[attr] = conv(raw)
            except (ValueError, ValidationError, ZeroDivisionError) as exc:
                raise ConfigError(f"{section}.{key}: cannot parse {raw!r} ({exc})") from exc
    params = []
    for section in parser.sections():
        for key in parser.options(section):
            if (section, key) in known:
                continue
            if section == "coefficient" and key in _COEFF_PARAMS:
                try:
                    params.append((key, float(parser.get(section, key))))
                except ValueError as exc:
                    raise ConfigError(f"coefficient.{key}: {exc}") from exc
            else:
                raise ConfigError(f"{section}.{key}: unknown setting")
    if params:
        values["coefficient_params"] = tuple(sorted(params))
    cfg = ScenarioConfig(**values)
    return cfg.validate() if validate else cfg


def load_config(path, validate=True) -> ScenarioConfig:
    return parse_config(Path(path).read_text(), validate)


def canonical_config(case: str) -> Path:
    """Path of a shipped scenario file: ``"A"``, ``"B"``, ``"C"`` or ``"negative"``."""
    name = {"A": "case_a.cfg", "B": "case_b.cfg", "C": "case_c.cfg",
            "negative": "negative_control.cfg"}[case]
    return Path(__file__).with_name("scenarios") / name


def field_names():
    return [f.name for f in fields(ScenarioConfig)]
