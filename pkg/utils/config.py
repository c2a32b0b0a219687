"""Settings read from the environment, with a local ``.env`` file honoured."""
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from dotenv import load_dotenv


@dataclass(frozen=True)
class Settings:
    store: Path
    log_level: str
    trend_window: int
    drop_threshold: Fraction
    recall_floor: Fraction
    sample_interval: int
    output_dir: Path


def _fraction(name, default):
    raw = os.getenv(name, default)
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"{name} must be a number, got {raw!r}") from e


def _positive_integer(name, default):
    raw = os.getenv(name, default)
    try:
        value = int(raw)
    except ValueError as e:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from e
    if value < 1:
        raise ValueError(f"{name} must be at least 1, got {raw!r}")
    return value


def load_settings(env_file=None) -> Settings:
    load_dotenv(env_file)
    return Settings(
        store=Path(os.getenv("FAH_STORE", "./fah-store")),
        log_level=os.getenv("FAH_LOG_LEVEL", "INFO"),
        trend_window=_positive_integer("FAH_TREND_WINDOW", "4"),
        drop_threshold=_fraction("FAH_DROP_THRESHOLD", "0.25"),
        recall_floor=_fraction("FAH_RECALL_FLOOR", "0.5"),
        sample_interval=_positive_integer("FAH_SAMPLE_INTERVAL", "10"),
        output_dir=Path(os.getenv("FAH_OUTPUT_DIR", "./fah-output")),
    )
