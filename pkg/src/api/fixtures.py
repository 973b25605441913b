"""Запись и воспроизведение ответов API (record/replay) в каталоге фикстур."""

import hashlib
import logging
from pathlib import Path
from urllib.parse import urlencode

from .base import APIError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.tsv"

# Параметры, не влияющие на содержимое ответа
IDENTITY_PARAMS = frozenset({"mailto", "api_key"})


class FixtureMissError(APIError):
    """В каталоге фикстур нет ответа на запрос"""

    def __init__(self, request_key: str, request_line: str):
        self.request_key = request_key
        self.request_line = request_line
        super().__init__(f"No fixture for request {request_key} ({request_line})")


def request_line(method: str, path: str, params: dict | None = None) -> str:
    """Человекочитаемая каноническая строка запроса: параметры отсортированы по имени."""
    query = sorted(
        (str(key), str(value)) for key, value in (params or {}).items() if key not in IDENTITY_PARAMS
    )
    line = f"{method.upper()} /{path.lstrip('/')}"
    return f"{line}?{urlencode(query)}" if query else line


def request_key(method: str, path: str, params: dict | None = None) -> str:
    """
    Стабильный ключ запроса.

    Одинаковые логические запросы (с любым порядком параметров) дают
    одинаковый ключ; mailto в ключ не входит.
    """
    return hashlib.sha256(request_line(method, path, params).encode("utf-8")).hexdigest()[:32]


class FixtureStore:
    """
    Каталог фикстур: ``{key}.json`` (тело ответа как есть) и ``manifest.tsv``.
    """

    def __init__(self, fixture_dir: Path):
        self.fixture_dir = Path(fixture_dir)
        self._manifest: dict[str, str] | None = None

    def _path(self, key: str) -> Path:
        return self.fixture_dir / f"{key}.json"

    def load(self, key: str) -> bytes | None:
        path = self._path(key)
        if not path.exists():
            return None
        return path.read_bytes()

    def manifest(self) -> dict[str, str]:
        if self._manifest is None:
            self._manifest = {}
            manifest_path = self.fixture_dir / MANIFEST_NAME
            if manifest_path.exists():
                for line in manifest_path.read_text(encoding="utf-8").splitlines():
                    if "\t" in line:
                        key, line_text = line.split("\t", 1)
                        self._manifest[key] = line_text
        return self._manifest

    def save(self, key: str, line: str, body: bytes) -> None:
        """Сохраняет ответ и обновляет manifest.tsv (строки отсортированы по ключу)."""
        self.fixture_dir.mkdir(parents=True, exist_ok=True)
        self._path(key).write_bytes(body)
        manifest = self.manifest()
        manifest[key] = line
        rendered = "".join(f"{k}\t{manifest[k]}\n" for k in sorted(manifest))
        (self.fixture_dir / MANIFEST_NAME).write_text(rendered, encoding="utf-8")
        logger.debug(f"Recorded fixture {key}: {line}")
