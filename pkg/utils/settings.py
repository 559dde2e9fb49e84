"""
Compute settings for the lattice toolkit, loaded from config.json
"""

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, Optional
import json
import logging

from data.exceptions import DocumentError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config.json"

CAMPAIGNS = ("oracle", "refine", "radical", "descent", "morphism", "hensel",
             "residue_unitary", "star", "gamma_roundtrip", "gamma_twist")


def _selftest_defaults() -> Dict[str, int]:
    return {"oracle": 60, "refine": 40, "radical": 1, "descent": 20, "morphism": 40,
            "hensel": 15, "residue_unitary": 1, "star": 1, "gamma_roundtrip": 10,
            "gamma_twist": 20}


def _campaign_defaults() -> Dict[str, int]:
    return {"oracle": 1000, "refine": 500, "radical": 1, "descent": 200, "morphism": 300,
            "hensel": 100, "residue_unitary": 1, "star": 1, "gamma_roundtrip": 100,
            "gamma_twist": 300}


@dataclass
class ComputeConfig:
    """Defaults for precision, retries, workers and campaign sizes"""
    precision: int = 8
    denominator_bound: int = 3
    max_retries: int = 50
    log_level: str = "INFO"
    workers: int = 1

    # k Gamma isomorphism search
    kgamma_exhaustive_limit: int = 10000
    kgamma_random_tries: int = 400

    star_scan_samples: int = 500
    selftest_trials: Dict[str, int] = field(default_factory=_selftest_defaults)
    campaign_trials: Dict[str, int] = field(default_factory=_campaign_defaults)

    def trials_for(self, campaign: str, selftest: bool = False) -> int:
        table = self.selftest_trials if selftest else self.campaign_trials
        return table.get(campaign, _campaign_defaults().get(campaign, 1))

    def with_overrides(self, **overrides) -> "ComputeConfig":
        """Copy with the non-None overrides applied"""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def load_config(path: Optional[Path] = None) -> ComputeConfig:
    """Merge a JSON file over the defaults; unknown keys are logged and ignored"""
    config = ComputeConfig()
    path = Path(path) if path else DEFAULT_CONFIG_PATH
    if not path.exists():
        logger.debug(f"No config at {path}, using defaults")
        return config
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise DocumentError(f"config {path} is not valid JSON: {e}")
    if not isinstance(raw, dict):
        raise DocumentError(f"config {path} must be a JSON object")

    known = {f.name for f in fields(ComputeConfig)}
    values = {}
    for key, value in raw.items():
        if key not in known:
            logger.warning(f"⚠️ Ignoring unknown config key '{key}'")
            continue
        values[key] = value
    for key in ("selftest_trials", "campaign_trials"):
        if key in values:
            merged = getattr(config, key)
            merged.update({k: int(v) for k, v in values[key].items()})
            values[key] = merged
    for key in ("precision", "denominator_bound", "max_retries", "workers",
                "kgamma_exhaustive_limit", "kgamma_random_tries", "star_scan_samples"):
        if key in values and (not isinstance(values[key], int) or values[key] < 1):
            raise DocumentError(f"config key '{key}' must be a positive integer")
    logger.debug(f"Loaded config from {path}")
    return replace(config, **values)
