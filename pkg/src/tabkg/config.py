"""Run configuration: defaults, TOML loading, validation."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SERVICE_TYPES = ("local", "sparql", "lookup-api", "wiki-api")


@dataclass
class ServiceSpec:
    """One lookup service entry from the run config."""

    type: str
    endpoint: str = ""
    timeout: float = 10.0
    enabled: bool = True
    iri_template: str = "{title}"


@dataclass
class RunConfig:
    alpha: int = 100
    beta: float = 0.5
    w1: float = 1.0
    w2: float = 1.0
    w3: float = 1.0
    w4: float = 1.0
    w5: float = 1.0
    w6: float = 1.0
    w7: float = 1.0
    w8: float = 1.0
    w9: float = 1.0
    w10: float = 1.0
    aggregation: str = "sum"
    pair_aggregation: str = "max"
    s8_source: str = "lookup"
    vote_weighting: str = "uniform"
    cache_dir: str | None = None
    seed: int = 13
    workers: int = 1
    ner_mapping: str | None = None
    gazetteer: str | None = None
    services: list[ServiceSpec] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.alpha < 1:
            raise ConfigError("alpha must be >= 1")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError("beta must lie in [0, 1]")
        weights = self.weight_map()
        if any(w < 0 for w in weights.values()):
            raise ConfigError("weights must be non-negative")
        for bundle in (("w1", "w2", "w3", "w4"), ("w5", "w6"), ("w7", "w8", "w9", "w10")):
            if all(weights[name] == 0.0 for name in bundle):
                raise ConfigError(f"weight bundle {'/'.join(bundle)} has no positive weight")
        if self.aggregation not in ("sum", "product"):
            raise ConfigError("aggregation must be 'sum' or 'product'")
        if self.pair_aggregation not in ("max", "sum"):
            raise ConfigError("pair_aggregation must be 'max' or 'sum'")
        if self.s8_source not in ("lookup", "fused"):
            raise ConfigError("s8_source must be 'lookup' or 'fused'")
        if self.vote_weighting not in ("uniform", "probability"):
            raise ConfigError("vote_weighting must be 'uniform' or 'probability'")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for service in self.services:
            if service.type not in SERVICE_TYPES:
                raise ConfigError(f"unknown service type {service.type!r}")
            if service.type != "local" and not service.endpoint:
                raise ConfigError(f"service {service.type!r} requires an endpoint")

    def weight_map(self) -> dict[str, float]:
        return {f"w{i}": getattr(self, f"w{i}") for i in range(1, 11)}

    def type_weights(self) -> tuple[float, float, float, float]:
        return (self.w1, self.w2, self.w3, self.w4)

    def entity_weights(self) -> tuple[float, float, float, float]:
        return (self.w7, self.w8, self.w9, self.w10)

    def to_dict(self) -> dict:
        out: dict = {}
        for spec in fields(self):
            value = getattr(self, spec.name)
            if spec.name == "services":
                value = [vars(s).copy() for s in value]
            out[spec.name] = value
        return out

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            with open(path, "rb") as handle:
                data = tomllib.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid config file {path}: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        weights = data.pop("weights", {})
        if not isinstance(weights, dict):
            raise ConfigError("'weights' must be a table of w1..w10")
        for name, value in weights.items():
            if name not in {f"w{i}" for i in range(1, 11)}:
                raise ConfigError(f"unknown weight {name!r}")
            data[name] = value
        raw_services = data.pop("services", [])
        services = []
        for entry in raw_services:
            if not isinstance(entry, dict):
                raise ConfigError("each [[services]] entry must be a table")
            unknown = set(entry) - {f.name for f in fields(ServiceSpec)}
            if unknown:
                raise ConfigError(f"unknown service keys: {sorted(unknown)}")
            services.append(ServiceSpec(**entry))
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(services=services, **data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
