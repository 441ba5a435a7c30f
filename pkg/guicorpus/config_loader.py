"""
ConfigLoader Module

This module provides the ConfigLoader class, a utility for loading the
toolkit configuration: the bundled defaults in 'config.json', an optional
user configuration file merged over them, and command-line overrides merged
last.

Classes:
- ConfigLoader: Utility class for loading configuration from JSON files.

Dependencies:
- os: Provides functions for interacting with the operating system.
- json: Provides functions for working with JSON data.
"""
import copy
import json
import os
from typing import Any, Dict, Iterable, Optional, Tuple

from guicorpus.exceptions import ConfigError


class ConfigLoader:
    """
    Utility class for loading configuration from JSON files.
    """

    @staticmethod
    def load_config() -> dict:
        """
        Loads the default configuration from the bundled 'config.json' file.

        :return: The loaded configuration as a dictionary.
        :rtype: dict
        """
        config_path = os.path.join(os.path.dirname(__file__), 'config.json')
        with open(config_path, 'r', encoding='utf-8') as cfg_file:
            config = json.load(cfg_file)
        return config

    @staticmethod
    def data_path(*parts: str) -> str:
        """
        Returns the path of a data file shipped inside the package.

        :param parts: Path components below the 'data' directory.
        :return: The absolute path.
        """
        return os.path.join(os.path.dirname(__file__), 'data', *parts)

    @staticmethod
    def merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
        """
        Recursively merges 'update' into a copy of 'base'; nested dictionaries merge, other values replace.

        :param base: The configuration to merge into.
        :param update: The configuration whose values win.
        :return: The merged configuration.
        """
        merged = copy.deepcopy(base)
        for key, value in update.items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = ConfigLoader.merge(merged[key], value)
            else:
                merged[key] = copy.deepcopy(value)
        return merged

    @staticmethod
    def parse_override(override: str) -> Tuple[Tuple[str, ...], Any]:
        """
        Parses a 'section.key=value' override. The value is read as JSON when possible, else kept as a string.

        :param override: The override expression.
        :return: The key path and the parsed value.
        """
        if '=' not in override:
            raise ConfigError(f"Override {override!r} is not of the form key=value")
        key, raw_value = override.split('=', 1)
        path = tuple(part for part in key.strip().split('.') if part)
        if not path:
            raise ConfigError(f"Override {override!r} has an empty key")
        try:
            value = json.loads(raw_value)
        except json.JSONDecodeError:
            value = raw_value
        return path, value

    @staticmethod
    def apply_override(config: Dict[str, Any], path: Tuple[str, ...], value: Any) -> None:
        node = config
        for part in path[:-1]:
            if not isinstance(node.get(part), dict):
                raise ConfigError(f"Override targets unknown section {'.'.join(path)!r}")
            node = node[part]
        if path[-1] not in node:
            raise ConfigError(f"Override targets unknown key {'.'.join(path)!r}")
        node[path[-1]] = value

    @staticmethod
    def load(config_file: Optional[str] = None, overrides: Iterable[str] = ()) -> Dict[str, Any]:
        """
        Loads the effective configuration: defaults, then the config file, then overrides.

        :param config_file: Optional path of a user JSON configuration file.
        :param overrides: 'section.key=value' overrides; they win over the file.
        :return: The merged configuration.
        """
        config = ConfigLoader.load_config()
        if config_file:
            if not os.path.exists(config_file):
                raise ConfigError(f"Config file not found: {config_file}")
            with open(config_file, 'r', encoding='utf-8') as cfg_file:
                try:
                    user_config = json.load(cfg_file)
                except json.JSONDecodeError as error:
                    raise ConfigError(f"{config_file}: invalid JSON ({error})") from error
            config = ConfigLoader.merge(config, user_config)
            config.setdefault('config_dir', os.path.dirname(os.path.abspath(config_file)))
        for override in overrides:
            path, value = ConfigLoader.parse_override(override)
            ConfigLoader.apply_override(config, path, value)
        return config
