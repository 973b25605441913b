"""Загрузка и проверка списка исследователей (roster.csv)."""

import csv
import io
from collections.abc import Iterable
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path

from config import logger
from utils.validators import sanitize_text_input

REQUIRED_COLUMNS = ("id", "given_names", "surnames", "area", "declared_articles")


class Area(StrEnum):
    """Большие области знаний CONICET."""

    CAIM = "CAIM"
    CBS = "CBS"
    CEN = "CEN"
    CSH = "CSH"
    UNSPECIFIED = "Unspecified"

    @classmethod
    def parse(cls, raw: str) -> "Area":
        key = sanitize_text_input(raw).upper()
        for area in cls:
            if area.value.upper() == key:
                return area
        return cls.UNSPECIFIED


class RosterError(Exception):
    """Базовая ошибка разбора roster"""

    pass


class RosterSchemaError(RosterError):
    """В заголовке нет обязательной колонки"""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"Roster is missing required column {column!r}")


class RosterDuplicateError(RosterError):
    """Повторяющийся id исследователя"""

    def __init__(self, researcher_id: str):
        self.researcher_id = researcher_id
        super().__init__(f"Duplicate researcher id {researcher_id!r}")


class RosterRowError(RosterError):
    """Некорректная строка данных"""

    def __init__(self, row_number: int, message: str):
        self.row_number = row_number
        super().__init__(f"Row {row_number}: {message}")


@dataclass(frozen=True, slots=True)
class Researcher:
    id: str
    given_names: str
    surnames: str
    area: Area = Area.UNSPECIFIED
    discipline: str | None = None
    declared_articles: int = 0

    def __post_init__(self):
        if not self.id:
            raise ValueError("Researcher id must not be empty")
        # Фамилия должна пережить normalize(): нужна хотя бы одна буква
        if not any(ch.isalpha() for ch in self.surnames):
            raise ValueError(f"Researcher {self.id!r} has no letters in surnames: {self.surnames!r}")
        if self.declared_articles < 0:
            raise ValueError(f"Researcher {self.id!r} has negative declared_articles")


@dataclass(frozen=True)
class RosterSummary:
    researchers_by_area: dict[Area, int]
    articles_by_area: dict[Area, int]
    total_researchers: int
    total_articles: int


def parse_roster(raw: str) -> list[Researcher]:
    """
    Разбирает CSV со списком исследователей.

    Args:
        raw: Содержимое файла (UTF-8, разделитель запятая, заголовок обязателен)

    Returns:
        Список Researcher в порядке строк файла

    Raises:
        RosterSchemaError: нет обязательной колонки
        RosterDuplicateError: повторяющийся id
        RosterRowError: некорректное значение в строке (номер строки файла)
    """
    reader = csv.DictReader(io.StringIO(raw.lstrip("\ufeff")))
    header = [sanitize_text_input(name) for name in (reader.fieldnames or [])]
    for column in REQUIRED_COLUMNS:
        if column not in header:
            raise RosterSchemaError(column)
    reader.fieldnames = header

    researchers: list[Researcher] = []
    seen: set[str] = set()
    # Заголовок в первой строке файла
    for row_number, row in enumerate(reader, start=2):
        researcher_id = sanitize_text_input(row.get("id"))
        if researcher_id in seen:
            raise RosterDuplicateError(researcher_id)

        declared_raw = sanitize_text_input(row.get("declared_articles"))
        try:
            declared = int(declared_raw)
        except ValueError:
            raise RosterRowError(row_number, f"declared_articles is not a number: {declared_raw!r}") from None

        try:
            researcher = Researcher(
                id=researcher_id,
                given_names=sanitize_text_input(row.get("given_names")),
                surnames=sanitize_text_input(row.get("surnames")),
                area=Area.parse(row.get("area") or ""),
                discipline=sanitize_text_input(row.get("discipline")) or None,
                declared_articles=declared,
            )
        except ValueError as e:
            raise RosterRowError(row_number, str(e)) from e

        seen.add(researcher_id)
        researchers.append(researcher)

    return researchers


def load_roster(path: Path) -> list[Researcher]:
    """Читает roster.csv с диска."""
    researchers = parse_roster(path.read_text(encoding="utf-8"))
    logger.info(f"Loaded {len(researchers)} researchers from {path}")
    return researchers


def summarize_roster(roster: Iterable[Researcher]) -> RosterSummary:
    """Считает исследователей и заявленные статьи по областям."""
    researchers_by_area = {area: 0 for area in Area}
    articles_by_area = {area: 0 for area in Area}
    for researcher in roster:
        researchers_by_area[researcher.area] += 1
        articles_by_area[researcher.area] += researcher.declared_articles

    return RosterSummary(
        researchers_by_area=researchers_by_area,
        articles_by_area=articles_by_area,
        total_researchers=sum(researchers_by_area.values()),
        total_articles=sum(articles_by_area.values()),
    )
