"""Configuration loading: built-in defaults overlaid with config/config.yaml."""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from .utils import merge_dicts

logger = logging.getLogger(__name__)

SEED_ENV_VAR = 'VECTOR_MACLAURIN_SEED'
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / 'config' / 'config.yaml'

DEFAULTS: Dict[str, Any] = {
    'tolerances': {
        'verdict': 1e-10,
        'sandwich': 1e-10,
        'chain': 1e-9,
    },
    'enumeration': {
        'subset_cap': 10 ** 8,
    },
    'search': {
        'dims': [[3, 3]],
        'targets': [{'kind': 'maclaurin', 'k': 2, 'p': -1}],
        'restarts': 100,
        'steps': 400,
        'perturbation_scale': 0.25,
        'seed': 20240613,
        'distribution': 'gaussian',
        'epsilon': 0.1,
        'patience': 20,
        'min_step_ratio': 1e-8,
    },
    'sweep': {
        'families': 200,
        'seed': 7,
    },
    'performance': {
        'threads': 1,
    },
    'logging': {
        'level': 'INFO',
        'file': None,
    },
}


def load_config(path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """
    Load configuration, merging the YAML file over built-in defaults.

    Args:
        path: Config file; defaults to config/config.yaml next to the package

    Returns:
        Dict with every section of DEFAULTS present
    """
    config_path = Path(path) if path else DEFAULT_CONFIG_PATH
    if not config_path.exists():
        if path:
            raise FileNotFoundError(f"Config file not found: {config_path}")
        logger.debug("No config file at %s, using defaults", config_path)
        return merge_dicts(DEFAULTS, {})

    with open(config_path, 'r', encoding='utf-8') as fh:
        loaded = yaml.safe_load(fh) or {}
    if not isinstance(loaded, dict):
        raise ValueError(f"Config file {config_path} must contain a mapping")
    return merge_dicts(DEFAULTS, loaded)


def resolve_seed(flag_value: Optional[int], config: Dict[str, Any], section: str = 'search') -> int:
    """
    Pick the seed for a run.

    Precedence: command-line flag, then the VECTOR_MACLAURIN_SEED environment
    variable, then the config file section, then the built-in default.
    """
    if flag_value is not None:
        return int(flag_value)
    env_value = os.environ.get(SEED_ENV_VAR)
    if env_value not in (None, ''):
        try:
            return int(env_value)
        except ValueError:
            logger.warning("Ignoring non-integer %s=%r", SEED_ENV_VAR, env_value)
    return int(config.get(section, {}).get('seed', DEFAULTS[section]['seed']))
