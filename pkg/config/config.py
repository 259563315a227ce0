"""
Unified Configuration for iOCR
Ballot OCR post-processing configuration
"""
import os
import json
import logging
from typing import Dict, Any, Optional
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

VERSION = "0.1.0"


class IOCRConfig:
    """Unified iOCR configuration"""

    LOG_LEVEL = os.getenv('IOCR_LOG_LEVEL', 'INFO')

    # Every source of randomness hangs off one seed
    DEFAULT_SEED = 2021
    DEFAULT_D_MIN = 3

    # Matcher defaults; preferences.json may override any of them
    MATCHER_DEFAULTS = {
        "prefix_weight": 0.1,
        "max_prefix": 4,
        "writein_threshold_lev": 0.65,
        "writein_threshold_jw": 0.75,
        "garbage_min_alnum": 3,
        "case_fold": False,
        "position_keyed": True,
        "collapse_whitespace": False,
        "tie_tolerance": 1e-12,
    }

    # Data directories
    _CONFIG_DIR = Path(os.getenv('IOCR_CONFIG_DIR', Path.home() / ".config" / "iocr"))
    _CACHE_DIR = Path(os.getenv('IOCR_CACHE_DIR', Path.home() / ".cache" / "iocr"))
    _PREFERENCES_FILE = _CONFIG_DIR / "preferences.json"

    @classmethod
    def get_config_dir(cls) -> Path:
        """Get config directory path"""
        cls._CONFIG_DIR.mkdir(parents=True, exist_ok=True)
        return cls._CONFIG_DIR

    @classmethod
    def get_cache_dir(cls) -> Path:
        """Get cache directory path"""
        cls._CACHE_DIR.mkdir(parents=True, exist_ok=True)
        return cls._CACHE_DIR

    @classmethod
    def get_log_dir(cls) -> Path:
        """Get log directory path"""
        log_dir = cls.get_cache_dir() / "logs"
        log_dir.mkdir(parents=True, exist_ok=True)
        return log_dir

    @classmethod
    def _load_preferences(cls) -> Dict[str, Any]:
        """Load preferences from JSON file"""
        try:
            if cls._PREFERENCES_FILE.exists():
                with open(cls._PREFERENCES_FILE, 'r', encoding='utf-8') as f:
                    return json.load(f)
        except (json.JSONDecodeError, OSError) as e:
            logger.warning(f"Ignoring unreadable preferences file {cls._PREFERENCES_FILE}: {e}")
        return {}

    @classmethod
    def _save_preferences(cls, prefs: Dict[str, Any]):
        """Save preferences to JSON file"""
        try:
            cls._PREFERENCES_FILE.parent.mkdir(parents=True, exist_ok=True)
            with open(cls._PREFERENCES_FILE, 'w', encoding='utf-8') as f:
                json.dump(prefs, f, indent=2, sort_keys=True)
        except OSError as e:
            logger.error(f"Failed to save preferences: {e}")

    @classmethod
    def get_matcher_settings(cls) -> Dict[str, Any]:
        """Get matcher settings: defaults overlaid with stored preferences"""
        settings = dict(cls.MATCHER_DEFAULTS)
        overrides = cls._load_preferences().get('matcher', {})
        if not isinstance(overrides, dict):
            logger.warning("Ignoring 'matcher' preferences: expected an object")
            return settings
        for key, value in overrides.items():
            if key in settings:
                settings[key] = value
            else:
                logger.warning(f"Ignoring unknown matcher preference '{key}'")
        return settings

    @classmethod
    def set_matcher_setting(cls, key: str, value: Any):
        """Persist a single matcher override"""
        if key not in cls.MATCHER_DEFAULTS:
            raise KeyError(f"Unknown matcher setting '{key}'")
        prefs = cls._load_preferences()
        prefs.setdefault('matcher', {})[key] = value
        cls._save_preferences(prefs)

    @classmethod
    def get_status(cls) -> Dict[str, Any]:
        """Get configuration status"""
        return {
            "version": VERSION,
            "config_dir": str(cls._CONFIG_DIR),
            "cache_dir": str(cls._CACHE_DIR),
            "preferences_file": str(cls._PREFERENCES_FILE),
            "log_level": cls.LOG_LEVEL,
            "default_seed": cls.DEFAULT_SEED,
            "matcher": cls.get_matcher_settings(),
        }


@dataclass
class RunConfig:
    """Fully resolved parameters of one CLI run, written next to its outputs"""
    subcommand: str
    seed: Optional[int] = None
    arguments: Dict[str, Any] = field(default_factory=dict)
    matcher: Dict[str, Any] = field(default_factory=dict)
    version: str = VERSION

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization"""
        return {
            "subcommand": self.subcommand,
            "seed": self.seed,
            "arguments": {k: _jsonable(v) for k, v in self.arguments.items()},
            "matcher": dict(self.matcher),
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        """Create from dictionary"""
        return cls(
            subcommand=data.get("subcommand", ""),
            seed=data.get("seed"),
            arguments=data.get("arguments", {}),
            matcher=data.get("matcher", {}),
            version=data.get("version", VERSION),
        )

    def write(self, out_dir: Path) -> Path:
        """Write run_config.json into out_dir"""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "run_config.json"
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        logger.debug(f"Run config written to {path}")
        return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value
