import importlib
import logging
from pathlib import Path
from typing import Iterable, Optional

from omegaconf import DictConfig, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from scdensity.errors import ConfigError

YAML_SUFFIXES = (".yaml", ".yml")

logger = logging.getLogger(__name__)


def init_obj_cls(string_def):
    string_parts = string_def.split(".")
    try:
        obj_cls = getattr(importlib.import_module(
            ".".join(string_parts[:-1])), string_parts[-1])
    except (ImportError, AttributeError, ValueError) as e:
        raise ConfigError(f"cannot import '{string_def}': {e}", "init_obj_cls") from e
    return obj_cls


def init_obj(string_def, params):
    obj_cls = init_obj_cls(string_def)
    if params is None:
        params = {}
    try:
        return obj_cls(**params)
    except (TypeError, AssertionError) as e:
        raise ConfigError(f"cannot build {string_def} with {dict(params)}: {e}", "init_obj") from e


def read_flat_config(path) -> DictConfig:
    """Flat ``dotted.key=value`` lines; blank lines and '#' comments are skipped."""
    entries = []
    for number, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key=value, got '{line}'", "load_config")
        key, value = (part.strip() for part in line.split("=", 1))
        entries.append(f"{key}={value}")
    return OmegaConf.from_dotlist(entries)


def load_config(path) -> DictConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist", "load_config")
    try:
        if path.suffix.lower() in YAML_SUFFIXES:
            config = OmegaConf.load(str(path))
        else:
            config = read_flat_config(path)
    except OmegaConfBaseException as e:
        raise ConfigError(f"cannot parse {path}: {e}", "load_config") from e
    if config is None:
        config = OmegaConf.create()
    if not isinstance(config, DictConfig):
        raise ConfigError(f"{path} must hold a mapping", "load_config")
    return config


def init_conf(conf_path, overrides: Optional[Iterable[str]] = None) -> DictConfig:
    """Load ``conf_path``, resolve its ``defaults`` list and apply CLI overrides.

    A ``defaults`` entry ``- experiment: NAME`` merges ``<conf dir>/experiment/NAME.yaml``;
    an override ``experiment=OTHER`` swaps the choice.
    """
    try:
        conf_cli = OmegaConf.from_dotlist(list(overrides or []))
    except OmegaConfBaseException as e:
        raise ConfigError(f"bad override in {list(overrides)}: {e}", "init_conf") from e
    if conf_path is None:
        return conf_cli

    conf_path = Path(conf_path)
    config = load_config(conf_path)
    defaults = config.pop("defaults", None) or []
    for entry in defaults:
        if not isinstance(entry, DictConfig) or len(entry) != 1:
            raise ConfigError(f"defaults entries must be single 'group: name' pairs, got {entry}",
                              "init_conf")
        for k, v in entry.items():
            if k in conf_cli:
                v = conf_cli.pop(k)
            entry_path = conf_path.parent / k / f"{v}.yaml"
            logger.debug(f"Merging {k}={v} from {entry_path}")
            config = OmegaConf.merge(config, load_config(entry_path))

    return OmegaConf.merge(config, conf_cli)


def write_config_to_snapshot(cfg, snapshot_dir):
    snapshot_dir = Path(snapshot_dir)
    snapshot_dir.mkdir(parents=True, exist_ok=True)

    with open(snapshot_dir / "config.yaml", "w") as f:
        OmegaConf.save(cfg, f)
    return snapshot_dir / "config.yaml"
