"""
Scenario files: TOML in, validated frozen dataclasses out.

Every table and key is optional; anything missing takes the default below,
which reproduces the 40-satellite evaluation setup.  Unknown tables or keys
are rejected.  Section dataclasses keep the file's own units (degrees, dBm,
Hz) so a scenario dumps and reloads unchanged; their ``build`` methods produce
the radian/SI domain objects.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import tomli
import tomli_w

from .fl_engine import Dataset, TrainingConfig, load_idx_dataset, synthetic_blobs
from .link_model import LinkBudget, PayloadSpec
from .orbital_mechanics import ConstellationSpec, GroundStation, PhysicalConstants, WindowSolver


class ScenarioError(ValueError):
    """A scenario file failed to parse or validate."""


@dataclass(frozen=True)
class ConstellationConfig:
    num_orbits: int = 5
    sats_per_orbit: int = 8
    altitude_m: float = 1_500_000.0
    inclination_deg: float = 80.0
    raan_spread_deg: float = 180.0
    phasing_factor: int = 1

    def build(self) -> ConstellationSpec:
        return ConstellationSpec.walker_delta(
            self.num_orbits,
            self.sats_per_orbit,
            self.altitude_m,
            math.radians(self.inclination_deg),
            math.radians(self.raan_spread_deg),
            self.phasing_factor,
        )


@dataclass(frozen=True)
class GroundStationConfig:
    name: str = "Rolla"
    latitude_deg: float = 37.9514
    longitude_deg: float = -91.7713
    min_elevation_deg: float = 10.0

    def build(self) -> GroundStation:
        return GroundStation(
            math.radians(self.latitude_deg),
            math.radians(self.longitude_deg),
            math.radians(self.min_elevation_deg),
            self.name,
        )


@dataclass(frozen=True)
class ConstantsConfig:
    gm: float = 3.986004418e14
    earth_radius_m: float = 6_371_000.0
    earth_rotation_rate: float = 7.2921159e-5
    light_speed: float = 299_792_458.0
    boltzmann: float = 1.380649e-23

    def build(self) -> PhysicalConstants:
        return PhysicalConstants(
            self.gm, self.earth_radius_m, self.earth_rotation_rate, self.light_speed, self.boltzmann
        )


@dataclass(frozen=True)
class LinkConfig:
    # "fixed-rate" uses data_rate_bps in both directions; "shannon" derives
    # rates from the SNRs.  Bandwidths, RB count and ISL efficiency are
    # assumptions: the evaluation setup lists only powers, gains, f, T and R.
    mode: str = "fixed-rate"
    tx_power_sat_dbm: float = 40.0
    tx_power_gs_dbm: float = 40.0
    gain_sat_dbi: float = 6.98
    gain_gs_dbi: float = 6.98
    carrier_freq_hz: float = 2.4e9
    noise_temp_k: float = 354.81
    data_rate_bps: float = 16e6
    total_bandwidth_hz: float = 1e6
    num_resource_blocks: int = 0  # 0 means one block per orbit
    isl_bandwidth_hz: float = 16e6
    isl_spectral_efficiency: float = 1.0
    payload_sample_bits: float = 8.0
    payload_num_samples: float = 1_000_000.0
    aloha_slot_s: float = 1.0
    aloha_max_backoff: int = 8

    def build(self, num_orbits: int) -> LinkBudget:
        if self.mode not in ("fixed-rate", "shannon"):
            raise ScenarioError(f"link.mode must be 'fixed-rate' or 'shannon', got {self.mode!r}")
        return LinkBudget(
            tx_power_sat=self.tx_power_sat_dbm,
            tx_power_gs=self.tx_power_gs_dbm,
            gain_sat=self.gain_sat_dbi,
            gain_gs=self.gain_gs_dbi,
            carrier_freq=self.carrier_freq_hz,
            noise_temp=self.noise_temp_k,
            total_bandwidth=self.total_bandwidth_hz,
            num_resource_blocks=self.num_resource_blocks or num_orbits,
            isl_bandwidth=self.isl_bandwidth_hz,
            isl_spectral_efficiency=self.isl_spectral_efficiency,
            fixed_rate=self.data_rate_bps if self.mode == "fixed-rate" else None,
        )

    def payload(self) -> PayloadSpec:
        return PayloadSpec(self.payload_sample_bits, self.payload_num_samples)


@dataclass(frozen=True)
class TrainingSection:
    local_epochs: int = 100
    learning_rate: float = 0.001
    batch_size: int = 32
    cycles_per_sample: float = 1e3
    cpu_freq_hz: float = 1e9

    def build(self, seed: int = 0) -> TrainingConfig:
        return TrainingConfig(
            self.local_epochs, self.learning_rate, self.batch_size,
            self.cycles_per_sample, self.cpu_freq_hz, seed,
        )


@dataclass(frozen=True)
class DatasetConfig:
    source: str = "synthetic"
    num_samples: int = 5000
    num_features: int = 16
    num_classes: int = 10
    separation: float = 1.0
    test_fraction: float = 0.1
    idx_images: str = ""
    idx_labels: str = ""

    def build(self, seed: int, base_dir: Optional[Path] = None) -> Dataset:
        if self.source == "synthetic":
            return synthetic_blobs(self.num_samples, self.num_features, self.num_classes, self.separation, seed)
        if self.source == "idx":
            if not (self.idx_images and self.idx_labels):
                raise ScenarioError("dataset.source = 'idx' needs idx_images and idx_labels")
            base = base_dir or Path.cwd()
            return load_idx_dataset(base / self.idx_images, base / self.idx_labels, self.num_classes)
        raise ScenarioError(f"dataset.source must be 'synthetic' or 'idx', got {self.source!r}")


@dataclass(frozen=True)
class SolverConfig:
    scan_step_s: float = 10.0
    tolerance_s: float = 0.01
    lookahead_s: float = 86_400.0
    strict_admission: bool = False
    reweight: str = "none"

    def build(self) -> WindowSolver:
        return WindowSolver(self.scan_step_s, self.tolerance_s)


@dataclass(frozen=True)
class Scenario:
    seed: int = 7
    horizon_s: float = 259_200.0
    max_rounds: int = 30
    target_accuracy: float = 0.9
    partition: str = "non-iid"
    constellation: ConstellationConfig = field(default_factory=ConstellationConfig)
    ground_station: GroundStationConfig = field(default_factory=GroundStationConfig)
    constants: ConstantsConfig = field(default_factory=ConstantsConfig)
    link: LinkConfig = field(default_factory=LinkConfig)
    training: TrainingSection = field(default_factory=TrainingSection)
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    base_dir: Optional[str] = field(default=None, compare=False)

    def validate(self) -> "Scenario":
        """Build every domain object once so invariant violations surface here."""
        try:
            if not self.horizon_s > 0:
                raise ValueError(f"horizon_s must be > 0, got {self.horizon_s}")
            if self.max_rounds < 1:
                raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")
            if not 0.0 <= self.target_accuracy <= 1.0:
                raise ValueError(f"target_accuracy must lie in [0, 1], got {self.target_accuracy}")
            if self.seed < 0:
                raise ValueError(f"seed must be non-negative, got {self.seed}")
            if self.partition not in ("iid", "non-iid"):
                raise ValueError(f"partition must be 'iid' or 'non-iid', got {self.partition!r}")
            if self.solver.reweight not in ("none", "inverse_frequency"):
                raise ValueError(f"solver.reweight must be 'none' or 'inverse_frequency', got {self.solver.reweight!r}")
            if not 0 < self.dataset.test_fraction < 1:
                raise ValueError(f"dataset.test_fraction must lie in (0, 1), got {self.dataset.test_fraction}")
            spec = self.constellation.build()
            self.ground_station.build()
            self.constants.build()
            self.link.build(spec.num_orbits)
            self.link.payload()
            self.training.build()
            self.solver.build()
        except ScenarioError:
            raise
        except (ValueError, TypeError) as exc:
            raise ScenarioError(str(exc)) from exc
        return self

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out.pop("base_dir")
        return out

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def with_overrides(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes).validate()


_SECTION_TYPES = {
    "constellation": ConstellationConfig,
    "ground_station": GroundStationConfig,
    "constants": ConstantsConfig,
    "link": LinkConfig,
    "training": TrainingSection,
    "dataset": DatasetConfig,
    "solver": SolverConfig,
}
_TOP_LEVEL = {"seed", "horizon_s", "max_rounds", "target_accuracy", "partition"}


def _coerce(where: str, name: str, default: Any, value: Any) -> Any:
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ScenarioError(f"{where}{name}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not (isinstance(value, int) or (isinstance(value, float) and value.is_integer())):
            raise ScenarioError(f"{where}{name}: expected an integer, got {value!r}")
        return int(value)
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"{where}{name}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ScenarioError(f"{where}{name}: expected a string, got {value!r}")
        return value
    return value


def _build_section(cls, table: Any, where: str):
    if not isinstance(table, dict):
        raise ScenarioError(f"[{where}] must be a table")
    defaults = cls()
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(table) - known)
    if unknown:
        raise ScenarioError(f"[{where}] unknown key(s): {', '.join(unknown)}")
    values = {k: _coerce(f"{where}.", k, getattr(defaults, k), v) for k, v in table.items()}
    return cls(**values)


def scenario_from_dict(doc: dict[str, Any], base_dir: Optional[str] = None) -> Scenario:
    unknown = sorted(set(doc) - _TOP_LEVEL - set(_SECTION_TYPES))
    if unknown:
        raise ScenarioError(f"unknown top-level key(s): {', '.join(unknown)}")
    defaults = Scenario()
    values: dict[str, Any] = {}
    for key in _TOP_LEVEL & set(doc):
        values[key] = _coerce("", key, getattr(defaults, key), doc[key])
    for name, cls in _SECTION_TYPES.items():
        if name in doc:
            values[name] = _build_section(cls, doc[name], name)
    return Scenario(base_dir=base_dir, **values).validate()


def loads_scenario(text: str, base_dir: Optional[str] = None) -> Scenario:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"TOML parse error: {exc}") from exc
    return scenario_from_dict(doc, base_dir)


BUNDLED = ("paper_default", "fig3")


def resolve_scenario_path(name_or_path: str) -> Path:
    path = Path(name_or_path)
    if path.exists():
        return path
    stem = path.name[:-5] if path.name.endswith(".toml") else path.name
    if stem in BUNDLED:
        return Path(str(resources.files("orbitfed") / "scenarios" / f"{stem}.toml"))
    raise FileNotFoundError(f"scenario file not found: {name_or_path}")


def load_scenario(path: str | Path) -> Scenario:
    """Load a scenario file, or a bundled scenario by name (``paper_default``, ``fig3``)."""
    resolved = resolve_scenario_path(str(path))
    text = resolved.read_text(encoding="utf-8")
    try:
        return loads_scenario(text, str(resolved.parent))
    except ScenarioError as exc:
        raise ScenarioError(f"{resolved}: {exc}") from exc
