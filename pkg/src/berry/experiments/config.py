"""Experiment configuration: parsing, validation and content hashing."""
import hashlib
import json
from dataclasses import dataclass, field, fields

import numpy as np
import yaml

from ..errors import ConfigError, InvalidArgumentError
from ..geometry.domains import Rectangle, domain_from_dict, union_bbox
from ..geometry.lattice import MIN_GRID_FACTOR
from ..sampler import DEFAULT_J, DIRECTION_RULES, MODELS, WaveSpec, auto_directions

EXPERIMENTS = ("clt", "vortex", "chaos", "sheet", "superposition", "variance-scaling", "asymptotics")
SAMPLER_KEYS = {"model", "J", "direction_rule", "M"}
OUTPUT_KEYS = {"path", "format"}
FORMATS = ("csv", "json")


@dataclass
class ExperimentConfig:
    experiment: str = "clt"
    energies: list = field(default_factory=lambda: [100.0])
    domains: list = field(default_factory=lambda: [{"type": "rectangle", "x0": 0.0, "y0": 0.0,
                                                     "width": 1.0, "height": 1.0}])
    replicates: int = 100
    grid_factor: int = 16
    sampler: dict = field(default_factory=dict)
    seed: int = 0
    output: dict = field(default_factory=dict)
    jobs: int = 1
    chaos: bool = False
    stat: str = "length"
    J_values: list = field(default_factory=list)
    sheet_lattice: int = 8
    kolmogorov_pairs: int = 20
    pairs: list = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    # -- validation -------------------------------------------------------
    def validate(self):
        if isinstance(self.experiment, str):
            self.experiment = self.experiment.replace("_", "-")
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        try:
            self.energies = [float(e) for e in self.energies]
        except (TypeError, ValueError):
            raise ConfigError("energies must be a list of numbers") from None
        if not self.energies or any(not np.isfinite(e) or e <= 1 for e in self.energies):
            raise ConfigError("energies must be a non-empty list of values above 1")
        if not isinstance(self.domains, list) or not self.domains:
            raise ConfigError("domains must be a non-empty list")
        try:
            self._domains = [domain_from_dict(d) for d in self.domains]
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from None
        for name in ("replicates", "grid_factor", "seed", "jobs", "sheet_lattice", "kolmogorov_pairs"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ConfigError(f"{name} must be an integer")
        if self.replicates < 2:
            raise ConfigError("replicates must be at least 2")
        if self.grid_factor < MIN_GRID_FACTOR:
            raise ConfigError(f"grid_factor must be at least {MIN_GRID_FACTOR}")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if not isinstance(self.sampler, dict) or set(self.sampler) - SAMPLER_KEYS:
            raise ConfigError(f"unknown sampler keys {sorted(set(self.sampler) - SAMPLER_KEYS)}")
        if self.sampler.get("model", "gaussian-spectral") not in MODELS:
            raise ConfigError(f"unknown sampler model {self.sampler.get('model')!r}")
        if self.sampler.get("direction_rule", "equispaced") not in DIRECTION_RULES:
            raise ConfigError(f"unknown direction rule {self.sampler.get('direction_rule')!r}")
        J = self.sampler.get("J")
        if J is not None and (not isinstance(J, int) or J < 1):
            raise ConfigError("sampler J must be a positive integer")
        if not isinstance(self.output, dict) or set(self.output) - OUTPUT_KEYS:
            raise ConfigError(f"unknown output keys {sorted(set(self.output) - OUTPUT_KEYS)}")
        if self.output.get("format", "csv") not in FORMATS:
            raise ConfigError("output format must be csv or json")
        if self.stat not in ("length", "count"):
            raise ConfigError("stat must be 'length' or 'count'")
        if self.experiment == "superposition" and not self.J_values:
            raise ConfigError("superposition needs J_values")
        if any(not isinstance(j, int) or j < 1 for j in self.J_values):
            raise ConfigError("J_values must be positive integers")
        if self.experiment == "variance-scaling":
            if len(self.energies) < 3 or max(self.energies) / min(self.energies) < 100 * (1 - 1e-12):
                raise ConfigError("variance-scaling needs at least 3 energies spanning two decades")
        if self.experiment == "sheet":
            if self.sheet_lattice < 1:
                raise ConfigError("sheet_lattice must be positive")
            if len(self.energies) != 1:
                raise ConfigError("sheet runs at a single energy")
        if self.experiment == "asymptotics":
            from ..asymptotics import parse_pair
            if not self.pairs:
                raise ConfigError("asymptotics needs a list of pairs")
            try:
                for p in self.pairs:
                    parse_pair(p)
            except InvalidArgumentError as exc:
                raise ConfigError(str(exc)) from None

    # -- derived ----------------------------------------------------------
    @property
    def domain_objects(self):
        return list(self._domains)

    def sheet_domain(self):
        return Rectangle(0.0, 0.0, 1.0, 1.0)

    def wave_spec(self, E, seed, J=None, model=None):
        model = model or self.sampler.get("model", "gaussian-spectral")
        doms = [self.sheet_domain()] if self.experiment == "sheet" else self._domains
        x0, y0, x1, y1 = union_bbox(doms)
        if J is None:
            J = self.sampler.get("J")
        if J is None:
            J = auto_directions(E, float(np.hypot(x1 - x0, y1 - y0)), DEFAULT_J)
        radius = None
        if model == "bessel-series":
            radius = float(max(np.hypot(a, b) for a in (x0, x1) for b in (y0, y1)))
        return WaveSpec(E=E, J=int(J), model=model,
                        direction_rule=self.sampler.get("direction_rule", "equispaced"),
                        M=self.sampler.get("M"), seed=int(seed), radius=radius)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def content_hash(self):
        return content_hash(self.to_dict())


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def content_hash(obj):
    """Git-style blob hash (sha1 of ``"blob <len>\\0" + canonical JSON``)."""
    data = canonical_json(obj).encode()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a mapping of fields")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    try:
        return ExperimentConfig(**d)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse YAML (or JSON, which is a subset) configuration text."""
    try:
        d = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from None
    return config_from_dict(d or {})


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())
