"""Typed run configuration: a structured OmegaConf schema plus validation."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from omegaconf import DictConfig, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from scdensity.errors import ConfigError
from scdensity.semiclassical.grids import Method
from scdensity.semiclassical.quantize import parse_gamma
from scdensity.utils.common import init_conf, load_config

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "default.yaml"


@dataclass
class PotentialConfig:
    name: str = "harmonic"
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SystemConfig:
    hbar: float = 1.0
    mass: float = 1.0
    n_particles: int = 4


@dataclass
class GridConfig:
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    points: int = 1200
    margin: float = 4.0


@dataclass
class ScanConfig:
    gamma_list: List[str] = field(default_factory=lambda: ["1", "1/2", "1/4"])


@dataclass
class ReferenceConfig:
    points: Optional[int] = None
    depth: float = 25.0
    richardson: bool = True


@dataclass
class OutputConfig:
    path: Optional[str] = None
    float_format: str = "%.12e"
    snapshot_dir: Optional[str] = None


@dataclass
class RunConfig:
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    system: SystemConfig = field(default_factory=SystemConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    methods: List[str] = field(default_factory=lambda: [m.value for m in Method])
    scan: ScanConfig = field(default_factory=ScanConfig)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    n_jobs: int = 1
    progress: bool = False
    logging: Dict[str, Any] = field(default_factory=dict)


def _split_list(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    if isinstance(value, (int, float)):
        return [str(value)]
    return value


def _normalize(cfg: DictConfig) -> DictConfig:
    """Accept comma-separated strings where the schema expects lists."""
    if "methods" in cfg:
        cfg.methods = _split_list(cfg.methods)
    if "scan" in cfg and isinstance(cfg.scan, DictConfig) and "gamma_list" in cfg.scan:
        cfg.scan.gamma_list = [str(g) for g in _split_list(cfg.scan.gamma_list)]
    return cfg


def flag_overrides(out=None, grid_points=None, methods=None, gamma=None) -> DictConfig:
    flags = {}
    if out is not None:
        flags["output"] = {"path": str(out)}
    if grid_points is not None:
        flags["grid"] = {"points": int(grid_points)}
    if methods is not None:
        flags["methods"] = _split_list(methods)
    if gamma is not None:
        flags["scan"] = {"gamma_list": _split_list(gamma)}
    return OmegaConf.create(flags)


def validate(cfg: DictConfig) -> DictConfig:
    def fail(message):
        raise ConfigError(message, "validate")

    known = [m.value for m in Method]
    for method in cfg.methods:
        if method not in known:
            fail(f"unknown method '{method}'; choose from {', '.join(known)}")
    if len(cfg.methods) == 0:
        fail("methods must not be empty")
    if cfg.system.hbar <= 0 or cfg.system.mass <= 0:
        fail(f"hbar and mass must be positive, got hbar={cfg.system.hbar} mass={cfg.system.mass}")
    if cfg.system.n_particles < 1:
        fail(f"n_particles must be >= 1, got {cfg.system.n_particles}")
    if cfg.grid.points < 3:
        fail(f"grid.points must be >= 3, got {cfg.grid.points}")
    if cfg.grid.margin <= 0:
        fail(f"grid.margin must be positive, got {cfg.grid.margin}")
    if cfg.grid.x_min is not None and cfg.grid.x_max is not None and cfg.grid.x_min >= cfg.grid.x_max:
        fail(f"empty grid [{cfg.grid.x_min}, {cfg.grid.x_max}]")
    if cfg.reference.depth <= 0:
        fail(f"reference.depth must be positive, got {cfg.reference.depth}")
    if cfg.reference.points is not None and cfg.reference.points < 3:
        fail(f"reference.points must be >= 3, got {cfg.reference.points}")
    if cfg.n_jobs == 0:
        fail("n_jobs must be nonzero")
    for gamma in cfg.scan.gamma_list:
        try:
            parse_gamma(gamma)
        except (ValueError, ZeroDivisionError) as e:
            fail(str(e))
    return cfg


def build_run_config(config_path=None, overrides: Optional[Iterable[str]] = None,
                     flags: Optional[DictConfig] = None) -> DictConfig:
    """Schema <- packaged defaults <- config file (+ its defaults list) <- overrides <- flags."""
    try:
        schema = OmegaConf.structured(RunConfig)
        layers = [load_config(DEFAULT_CONFIG_PATH), init_conf(config_path, overrides)]
        if flags is not None:
            layers.append(flags)
        cfg = OmegaConf.merge(schema, *[_normalize(layer) for layer in layers])
    except OmegaConfBaseException as e:
        raise ConfigError(str(e).splitlines()[0], "build_run_config") from e
    return validate(cfg)
