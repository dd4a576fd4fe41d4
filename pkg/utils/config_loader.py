"""
Configuration loader utility
"""

import copy
import yaml
from pathlib import Path
from typing import Dict, Any, Optional
from utils.logger import get_logger

logger = get_logger(__name__)


class ConfigLoader:
    """Load and manage configuration."""

    @staticmethod
    def load(config_path: Optional[str] = None) -> Dict[str, Any]:
        """
        Load configuration from YAML file.

        Args:
            config_path: Path to configuration file; None means built-in defaults

        Returns:
            Configuration dictionary with every section present
        """
        if config_path is None:
            return ConfigLoader._get_default_config()

        config_file = Path(config_path)

        if not config_file.exists():
            logger.warning(f"Config file not found: {config_path}")
            return ConfigLoader._get_default_config()

        try:
            with open(config_file, 'r') as f:
                config = yaml.safe_load(f) or {}

            logger.info(f"Configuration loaded from {config_path}")
            return ConfigLoader.merge_defaults(config)

        except Exception as e:
            logger.error(f"Error loading configuration: {e}")
            return ConfigLoader._get_default_config()

    @staticmethod
    def merge_defaults(config: Dict[str, Any]) -> Dict[str, Any]:
        """Fill sections and keys missing from `config` with defaults."""
        merged = ConfigLoader._get_default_config()
        for section, values in config.items():
            if isinstance(values, dict) and isinstance(merged.get(section), dict):
                merged[section].update(values)
            else:
                merged[section] = copy.deepcopy(values)
        return merged

    @staticmethod
    def _get_default_config() -> Dict[str, Any]:
        """Get default configuration."""
        return {
            'builder': {
                'omega': 0.5,
                'similarity_threshold': 0.8,
                'max_events': None,
                'max_wall_time': 10800,
                'event_order': 'position',
                'track_status': True,
                'track_stack': True
            },
            'generator': {
                'maxtry': 5,
                'path_length_factor': 4
            },
            'random': {
                'batch': 1000,
                'max_batches': 50,
                'seeds': [1, 2, 3, 4, 5]
            },
            'sweep': {
                'thresholds': [0, 0.25, 0.5, 0.8, 1.0]
            },
            'oracle': {
                'depth_bound': 64,
                'state_cap': 4096
            },
            'bench': {
                'workers': 1
            },
            'logging': {
                'level': 'INFO',
                'file': None
            }
        }
