import hashlib
import logging
import os
from dataclasses import dataclass, fields
from datetime import date
from logging.handlers import RotatingFileHandler
from pathlib import Path

from dotenv import load_dotenv
from utils.validators import (
    validate_country_code,
    validate_fraction,
    validate_iso_date,
    validate_positive_int,
)

load_dotenv()

DATA_DIR = Path(__file__).parent.parent / "data"

# OpenAlex API settings
OPENALEX_API_URL = os.getenv("OPENALEX_API_URL", "https://api.openalex.org")
OPENALEX_API_TIMEOUT = int(os.getenv("OPENALEX_API_TIMEOUT", "30"))
OA_MONITOR_CONCURRENCY = int(os.getenv("OA_MONITOR_CONCURRENCY", "4"))

# Настройка логирования
logger = logging.getLogger("oa_monitor")
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
logger.setLevel(getattr(logging, LOG_LEVEL, logging.INFO))
log_file = os.getenv("LOG_FILE", "oa_monitor.log")
file_handler = RotatingFileHandler(
    log_file, maxBytes=2 * 1024 * 1024, backupCount=5, encoding="utf-8", delay=True
)
file_handler.setFormatter(logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s"))
console_handler = logging.StreamHandler()
console_handler.setFormatter(logging.Formatter("%(asctime)s [%(levelname)s] %(message)s"))
logger.addHandler(file_handler)
logger.addHandler(console_handler)


# Не влияют на содержимое отчётов, поэтому не входят в хэш
UNHASHED_KEYS = frozenset({"output_dir", "mailto", "concurrency", "audit"})


class ConfigError(Exception):
    """Ошибка конфигурации запуска (код выхода 2)"""

    pass


@dataclass(frozen=True)
class RunConfig:
    """Параметры одного запуска пайплайна."""

    roster_path: Path
    fixture_dir: Path | None = None
    live: bool = False
    country_code: str = "AR"
    match_percentage: float = 0.5
    missing_country: str = "neutral"
    discrepancy_threshold: float = 0.5
    one_sided_discrepancy: bool = False
    law_date: date = date(2014, 1, 1)
    window_start: date = date(2006, 1, 1)
    cutoff: date = date(2020, 12, 31)
    output_dir: Path = Path("out")
    national_domains: tuple[str, ...] = (".ar",)
    repo_allowlist_path: Path | None = None
    international_repos_path: Path = DATA_DIR / "repositories.txt"
    lexicon_path: Path = DATA_DIR / "accents.csv"
    include_month_effects: bool = True
    robust_errors: bool = False
    article_types: tuple[str, ...] = ("journal-article", "article")
    mailto: str | None = None
    concurrency: int = OA_MONITOR_CONCURRENCY
    max_requests_per_second: float = 8.0
    page_size: int = 200
    max_retries: int = 4
    audit: bool = False

    def __post_init__(self):
        if not self.live and self.fixture_dir is None:
            raise ConfigError("Either --live or --fixtures DIR must be given")
        is_valid, error = validate_country_code(self.country_code)
        if not is_valid:
            raise ConfigError(error)
        for name in ("match_percentage", "discrepancy_threshold"):
            is_valid, error = validate_fraction(getattr(self, name))
            if not is_valid:
                raise ConfigError(f"{name}: {error}")
        if self.missing_country not in ("neutral", "foreign"):
            raise ConfigError(f"missing_country must be 'neutral' or 'foreign', got {self.missing_country!r}")
        if not self.window_start < self.law_date:
            raise ConfigError("window_start must be earlier than law_date")
        if not self.law_date <= self.cutoff:
            raise ConfigError("law_date must not be later than cutoff")
        for name in ("concurrency", "page_size"):
            is_valid, error = validate_positive_int(getattr(self, name))
            if not is_valid:
                raise ConfigError(f"{name}: {error}")
        if not 1 <= self.page_size <= 200:
            raise ConfigError("page_size must be in [1, 200]")
        if self.live and not 0 < self.max_requests_per_second <= 10:
            raise ConfigError("max_requests_per_second must be in (0, 10] in live mode")

    @property
    def mode(self) -> str:
        return "live" if self.live else "fixture"

    @property
    def state_dir(self) -> Path:
        return self.output_dir / "state"

    @property
    def snapshot_path(self) -> Path:
        return self.state_dir / "snapshot.db"

    def canonical_items(self) -> list[tuple[str, str]]:
        """Канонический вид конфигурации для хэша (пары key=value по алфавиту)."""
        items = []
        for f in fields(self):
            if f.name in UNHASHED_KEYS:
                continue
            items.append((f.name, _render_value(getattr(self, f.name))))
        return sorted(items)

    def config_hash(self) -> str:
        rendered = "\n".join(f"{key}={value}" for key, value in self.canonical_items())
        return hashlib.sha256(rendered.encode("utf-8")).hexdigest()


def _render_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


def _parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "on", "true", "yes"):
        return True
    if value in ("0", "off", "false", "no"):
        return False
    raise ConfigError(f"Not a boolean value: {raw!r}")


def _parse_date(raw: str) -> date:
    is_valid, error = validate_iso_date(raw)
    if not is_valid:
        raise ConfigError(error)
    return date.fromisoformat(raw.strip())


def _parse_list(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def _parse_float(raw: str) -> float:
    try:
        return float(raw)
    except ValueError as e:
        raise ConfigError(f"Not a number: {raw!r}") from e


def _parse_int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"Not an integer: {raw!r}") from e


def _parse_path(raw: str) -> Path | None:
    return Path(raw.strip()) if raw.strip() else None


_PARSERS = {
    "roster_path": _parse_path,
    "fixture_dir": _parse_path,
    "live": _parse_bool,
    "country_code": lambda raw: raw.strip().upper(),
    "match_percentage": _parse_float,
    "missing_country": lambda raw: raw.strip().lower(),
    "discrepancy_threshold": _parse_float,
    "one_sided_discrepancy": _parse_bool,
    "law_date": _parse_date,
    "window_start": _parse_date,
    "cutoff": _parse_date,
    "output_dir": _parse_path,
    "national_domains": _parse_list,
    "repo_allowlist_path": _parse_path,
    "international_repos_path": _parse_path,
    "lexicon_path": _parse_path,
    "include_month_effects": _parse_bool,
    "robust_errors": _parse_bool,
    "article_types": _parse_list,
    "mailto": lambda raw: raw.strip() or None,
    "concurrency": _parse_int,
    "max_requests_per_second": _parse_float,
    "page_size": _parse_int,
    "max_retries": _parse_int,
    "audit": _parse_bool,
}


def parse_config_text(text: str) -> dict[str, object]:
    """
    Разбирает конфигурационный файл формата ``key = value``.

    Пустые строки и строки, начинающиеся с ``#``, пропускаются.
    Неизвестные ключи считаются ошибкой.
    """
    values: dict[str, object] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"Line {line_number}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        parser = _PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"Line {line_number}: unknown key {key!r}")
        values[key] = parser(raw)
    return values


def load_run_config(path: Path | None = None, overrides: dict[str, object] | None = None) -> RunConfig:
    """
    Собирает RunConfig: значения из файла, поверх них флаги CLI.

    Args:
        path: Путь к конфигурационному файлу (опционально)
        overrides: Значения из командной строки (None означает "не задано")

    Returns:
        Проверенный RunConfig
    """
    values: dict[str, object] = {}
    if path is not None:
        if not path.exists():
            raise ConfigError(f"Config file not found: {path}")
        values.update(parse_config_text(path.read_text(encoding="utf-8")))
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    if values.get("roster_path") is None:
        raise ConfigError("Roster path is required (--roster)")
    return RunConfig(**values)
