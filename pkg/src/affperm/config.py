"""Workbench configuration via a YAML file plus environment overrides."""

import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import yaml

CONFIG_FILE = ".affperm.yaml"
ENV_CONFIG = "AFFPERM_CONFIG"
ENV_CAP = "AFFPERM_CAP"
ENV_WORKERS = "AFFPERM_WORKERS"


@dataclass
class AffpermConfig:
    """Tunable limits and defaults."""
    cap: int = 7  # largest N for brute-force enumeration
    sum_cap: int = 400  # largest N for exact composition sums
    w_cap: int = 300  # largest k * max(n_i) for W enumeration
    workers: int = 1
    swap_prob: float = 0.8
    offset_prob: float = 0.1  # MCMC block-offset proposals (k >= 2)
    segments_per_n: int = 10


def find_config_path(start: Path | None = None) -> Path | None:
    """Find the config file.

    First checks AFFPERM_CONFIG, then walks up from start/cwd.
    """
    env_path = os.environ.get(ENV_CONFIG)
    if env_path:
        path = Path(env_path).resolve()
        if path.is_file():
            return path

    path = (start or Path.cwd()).resolve()
    while True:
        candidate = path / CONFIG_FILE
        if candidate.is_file():
            return candidate
        if path == path.parent:
            return None
        path = path.parent


def _env_int(name: str) -> int | None:
    value = os.environ.get(name)
    if value is None or not value.strip():
        return None
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}") from None


def load_config(start: Path | None = None) -> AffpermConfig:
    """Load config from the nearest .affperm.yaml, then apply env overrides."""
    config = AffpermConfig()
    path = find_config_path(start)
    if path:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        known = {f.name for f in fields(AffpermConfig)}
        for key, value in data.items():
            if key in known:
                setattr(config, key, type(getattr(config, key))(value))

    cap = _env_int(ENV_CAP)
    if cap is not None:
        config.cap = cap
    workers = _env_int(ENV_WORKERS)
    if workers is not None:
        config.workers = workers
    return config


def save_config(config: AffpermConfig, path: Path | None = None) -> Path:
    """Save config as YAML, defaulting to ./.affperm.yaml."""
    path = path or Path.cwd() / CONFIG_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        yaml.dump(asdict(config), f, default_flow_style=False, sort_keys=False)
    return path


def resolve_cap(cap: int | None, field_name: str = "cap") -> int:
    """Explicit cap if given, else the configured one."""
    if cap is not None:
        return cap
    return getattr(load_config(), field_name)
