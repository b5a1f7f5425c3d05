"""Run configuration: an INI document with one section per model component.

Every key is optional. Unknown sections or keys are errors. Precedence is
``--set`` overrides > file > built-in defaults. Floats are written with
``repr`` so that parse -> serialize -> parse is the identity.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace

from . import constants as const
from .atomic_structure import (POPULATION_PRESETS, ProbeGeometry, hyperfine_shift,
                               population_preset, sr87_blue_manifold)
from .cycle_simulator import SequenceConfig
from .heating_retention import LatticeSettings
from .modulation_signal import ModulationSettings
from .noise_shot import DetectionSettings
from .snr_optimizer import SnrBudget

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "apply_overrides"]


class ConfigError(Exception):
    """Malformed configuration; the message names the section, key and line."""


def _default_offset(Fp: str) -> float:
    return hyperfine_shift(Fp, 1, "9/2", const.SR87_1P1_A, const.SR87_1P1_B)


@dataclass(frozen=True)
class ManifoldSection:
    wavelength_nm: float = 461.0
    linewidth_MHz: float = 30.0  # Gamma / 2 pi
    saturation_power_uW: float = 1.2
    line_offset_7_2_MHz: float = _default_offset("7/2")
    line_offset_9_2_MHz: float = _default_offset("9/2")
    line_offset_11_2_MHz: float = _default_offset("11/2")


@dataclass(frozen=True)
class PopulationsSection:
    preset: str = "sr87_blue_unpolarized"
    atom_number: float = 1e4
    polarization: int = 0


@dataclass(frozen=True)
class GeometrySection:
    cloud_radius_um: float = 10.0
    beam_waist_um: float = 37.0


@dataclass(frozen=True)
class ModulationSection:
    depth_rad: float = 2.4
    frequency_MHz: float = 90.0
    max_order: int = 8


@dataclass(frozen=True)
class DetectionSection:
    probe_power_nW: float = 12.0
    pulse_duration_ms: float = 3.0
    efficiency: float = 0.43
    sampling_rate_kHz: float = 500.0
    electronic_floor_rad2_per_Hz: float = 1e-11
    flicker_corner_Hz: float = 0.0


@dataclass(frozen=True)
class LatticeSection:
    depth: float = 0.1
    depth_unit: str = "mK"  # Er, mK, uK, K or Hz
    n_gamma: float = 103.0
    atom_mass_u: float = const.SR87_MASS_U


@dataclass(frozen=True)
class SequenceSection:
    inter_pulse_gap_ms: float = 7.0
    transfer_efficiency: float = 1.0
    projection_noise: bool = False
    drift_rate_rad_per_s: float = 0.0
    phase_offset_rad: float = 0.0


@dataclass(frozen=True)
class SnrSection:
    target_n_gamma: float = 80.0


_SECTIONS = {
    "manifold": ManifoldSection,
    "populations": PopulationsSection,
    "geometry": GeometrySection,
    "modulation": ModulationSection,
    "detection": DetectionSection,
    "lattice": LatticeSection,
    "sequence": SequenceSection,
    "snr": SnrSection,
}

_DEPTH_UNITS = {"Er": (1.0, "Er"), "K": (1.0, "K"), "mK": (1e-3, "K"), "uK": (1e-6, "K"),
                "Hz": (1.0, "Hz")}


@dataclass(frozen=True)
class RunConfig:
    manifold: ManifoldSection = field(default_factory=ManifoldSection)
    populations: PopulationsSection = field(default_factory=PopulationsSection)
    geometry: GeometrySection = field(default_factory=GeometrySection)
    modulation: ModulationSection = field(default_factory=ModulationSection)
    detection: DetectionSection = field(default_factory=DetectionSection)
    lattice: LatticeSection = field(default_factory=LatticeSection)
    sequence: SequenceSection = field(default_factory=SequenceSection)
    snr: SnrSection = field(default_factory=SnrSection)

    def serialize(self) -> str:
        out = []
        for name in _SECTIONS:
            section = getattr(self, name)
            out.append(f"[{name}]")
            for f in fields(section):
                out.append(f"{f.name} = {_format(getattr(section, f.name))}")
            out.append("")
        return "\n".join(out)

    # model builders

    def manifold_model(self):
        m = self.manifold
        offsets = {"7/2": m.line_offset_7_2_MHz * 1e6, "9/2": m.line_offset_9_2_MHz * 1e6,
                   "11/2": m.line_offset_11_2_MHz * 1e6}
        return sr87_blue_manifold(2 * math.pi * m.linewidth_MHz * 1e6, offsets,
                                  m.saturation_power_uW * 1e-6, m.wavelength_nm * 1e-9)

    def populations_model(self, preset: str | None = None):
        return population_preset(preset or self.populations.preset, self.populations.atom_number)

    def geometry_model(self) -> ProbeGeometry:
        return ProbeGeometry(self.geometry.cloud_radius_um * 1e-6,
                             self.geometry.beam_waist_um * 1e-6)

    def modulation_model(self) -> ModulationSettings:
        m = self.modulation
        return ModulationSettings(m.depth_rad, 2 * math.pi * m.frequency_MHz * 1e6, m.max_order)

    def detection_model(self) -> DetectionSettings:
        d = self.detection
        return DetectionSettings(d.probe_power_nW * 1e-9, d.pulse_duration_ms * 1e-3,
                                 d.efficiency, d.sampling_rate_kHz * 1e3,
                                 d.electronic_floor_rad2_per_Hz, d.flicker_corner_Hz)

    def lattice_model(self) -> LatticeSettings:
        scale, unit = _DEPTH_UNITS[self.lattice.depth_unit]
        return LatticeSettings(self.lattice.depth * scale, unit, self.manifold.wavelength_nm * 1e-9,
                               self.lattice.atom_mass_u * const.amu)

    def sequence_model(self, seed: int | None = None) -> SequenceConfig:
        s = self.sequence
        return SequenceConfig(self.detection_model(), self.modulation_model(),
                              self.manifold_model(), self.geometry_model(),
                              s.inter_pulse_gap_ms * 1e-3, self.populations.polarization,
                              s.transfer_efficiency, s.projection_noise, s.drift_rate_rad_per_s,
                              s.phase_offset_rad, False, seed)

    def snr_budget(self) -> SnrBudget:
        return SnrBudget(self.snr.target_n_gamma, self.manifold_model(), self.populations_model(),
                         self.geometry_model(), self.detection_model(),
                         self.populations.polarization, self.modulation.max_order)

    def validate(self) -> "RunConfig":
        """Build every model once so that invalid values surface as ConfigError."""
        if self.populations.preset not in POPULATION_PRESETS:
            raise ConfigError(f"[populations] preset: unknown preset {self.populations.preset!r}")
        if self.lattice.depth_unit not in _DEPTH_UNITS:
            raise ConfigError(f"[lattice] depth_unit: expected one of {sorted(_DEPTH_UNITS)}")
        try:
            self.manifold_model()
            self.populations_model()
            self.geometry_model()
            self.modulation_model()
            self.detection_model()
            self.lattice_model()
            self.sequence_model()
            self.snr_budget()
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from None
        return self


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _convert(kind, raw: str, where: str):
    raw = raw.strip()
    try:
        if kind is bool or kind == "bool":
            low = raw.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if kind is int or kind == "int":
            return int(raw)
        if kind is float or kind == "float":
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
            if key is None and current == section:
                return lineno
        elif current == section and key is not None and "=" in s:
            if s.split("=", 1)[0].strip() == key:
                return lineno
    return None


def _where(text, section, key=None) -> str:
    lineno = _line_of(text, section, key) if text else None
    loc = f"[{section}]" + (f" {key}" if key else "")
    return f"line {lineno}: {loc}" if lineno else loc


def _field_types(cls) -> dict:
    return {f.name: f.type for f in fields(cls)}


def _set(cfg: RunConfig, section: str, key: str, raw: str, text: str = "") -> RunConfig:
    if section not in _SECTIONS:
        raise ConfigError(f"{_where(text, section)}: unknown section")
    types = _field_types(_SECTIONS[section])
    if key not in types:
        raise ConfigError(f"{_where(text, section, key)}: unknown key")
    value = _convert(types[key], raw, _where(text, section, key))
    return replace(cfg, **{section: replace(getattr(cfg, section), **{key: value})})


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, strict=True,
                                       inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case sensitive
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from None
    cfg = RunConfig()
    for section in parser.sections():
        for key, raw in parser.items(section):
            cfg = _set(cfg, section, key, raw, text)
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def apply_overrides(cfg: RunConfig, overrides) -> RunConfig:
    """Apply ``section.key=value`` strings in order."""
    for item in overrides or ():
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"--set {item!r}: expected section.key=value")
        path, raw = item.split("=", 1)
        section, key = path.strip().split(".", 1)
        cfg = _set(cfg, section, key, raw)
    return cfg
