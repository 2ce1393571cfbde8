import importlib.resources
from typing import List

CONFIG_SUFFIX = '-train.conf'


def _conf_dir():
    return importlib.resources.files('gridseg').joinpath('resources', 'conf')


def get_config_path(config_name: str) -> str:
    """
    Get the absolute path to a bundled configuration file.

    Args:
        config_name: File name under resources/conf

    Returns:
        The absolute path to the configuration file as a string
    """
    return str(_conf_dir().joinpath(config_name))


def bundled_configs() -> List[str]:
    """Short names of the bundled training configs, e.g. ['full', 'toy']."""
    return sorted(entry.name[:-len(CONFIG_SUFFIX)] for entry in _conf_dir().iterdir()
                  if entry.name.endswith(CONFIG_SUFFIX))
