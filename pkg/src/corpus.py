"""Сборка аналитического корпуса: фильтр статей, чистка по расхождению, уникальные работы, периоды."""

from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

from config import logger
from harvester import WorkRecord
from roster import Researcher
from utils.validators import validate_fraction

DEFAULT_ARTICLE_TYPES = ("journal-article", "article")


class PeriodLabel(StrEnum):
    FULL = "Full1953_2021"
    PRE = "Pre2006_2013"
    POST = "Post2014_2021"
    WINDOW = "Window2006_2021"


@dataclass(frozen=True, slots=True)
class PeriodSlice:
    label: PeriodLabel
    start_year: int
    end_year: int

    def __post_init__(self):
        if self.start_year > self.end_year:
            raise ValueError(f"Period {self.label}: start_year > end_year")

    def contains(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year


FULL_PERIOD = PeriodSlice(PeriodLabel.FULL, 1953, 2021)
PRE_PERIOD = PeriodSlice(PeriodLabel.PRE, 2006, 2013)
POST_PERIOD = PeriodSlice(PeriodLabel.POST, 2014, 2021)
WINDOW_PERIOD = PeriodSlice(PeriodLabel.WINDOW, 2006, 2021)


@dataclass(frozen=True)
class CorpusConfig:
    threshold: float = 0.5
    article_types: tuple[str, ...] = DEFAULT_ARTICLE_TYPES
    two_sided: bool = True

    def __post_init__(self):
        is_valid, error = validate_fraction(self.threshold)
        if not is_valid:
            raise ValueError(f"threshold: {error}")


@dataclass(frozen=True)
class AttributedCorpus:
    attributions: frozenset[tuple[str, str]]
    works: dict[str, WorkRecord]
    researchers_kept: frozenset[str]
    researchers_dropped: frozenset[str]
    # Статьи, найденные по каждому исследователю roster (до чистки)
    recovered: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for researcher_id, work_id in self.attributions:
            if researcher_id not in self.researchers_kept:
                raise ValueError(f"Attribution to dropped researcher {researcher_id!r}")
            if work_id not in self.works:
                raise ValueError(f"Attribution to unknown work {work_id!r}")

    def attribution_counts(self) -> Counter[str]:
        """Сколько сохранённых исследователей приписано каждой работе."""
        return Counter(work_id for _, work_id in self.attributions)

    def kept_counts(self) -> Counter[str]:
        """Сколько статей осталось у каждого сохранённого исследователя."""
        return Counter(researcher_id for researcher_id, _ in self.attributions)

    def authors_of(self) -> dict[str, set[str]]:
        authors: dict[str, set[str]] = {}
        for researcher_id, work_id in self.attributions:
            authors.setdefault(work_id, set()).add(researcher_id)
        return authors


def discrepancy_keep(declared: int, recovered: int, threshold: float, two_sided: bool = True) -> bool:
    """
    Оставлять ли исследователя: расхождение не больше threshold от заявленного.

    Example:
        >>> discrepancy_keep(100, 60, 0.5)
        True
        >>> discrepancy_keep(0, 3, 0.5)
        False
    """
    if declared < 0 or recovered < 0:
        raise ValueError("Counts must be non-negative")
    if declared == 0:
        return recovered == 0
    diff = abs(declared - recovered) if two_sided else max(0, declared - recovered)
    return diff <= threshold * declared


def build_corpus(
    roster: Sequence[Researcher],
    attributed: Mapping[str, Mapping[str, WorkRecord]],
    cfg: CorpusConfig,
) -> AttributedCorpus:
    """
    Строит корпус из атрибуций дизамбигуатора.

    Args:
        roster: Исследователи
        attributed: researcher_id -> {work_id: WorkRecord} (объединённые работы принятых кандидатов)
        cfg: Порог расхождения и типы работ, считающиеся статьями

    Returns:
        AttributedCorpus, где у исключённых исследователей нет атрибуций
    """
    article_types = set(cfg.article_types)
    attributions: set[tuple[str, str]] = set()
    works: dict[str, WorkRecord] = {}
    kept: set[str] = set()
    dropped: set[str] = set()
    recovered: dict[str, int] = {}

    for researcher in roster:
        articles = [w for w in attributed.get(researcher.id, {}).values() if w.work_type in article_types]
        recovered[researcher.id] = len(articles)
        if not discrepancy_keep(researcher.declared_articles, len(articles), cfg.threshold, cfg.two_sided):
            dropped.add(researcher.id)
            logger.debug(
                f"Dropping {researcher.id}: declared {researcher.declared_articles}, "
                f"recovered {len(articles)}"
            )
            continue
        kept.add(researcher.id)
        for work in articles:
            attributions.add((researcher.id, work.work_id))
            works.setdefault(work.work_id, work)

    logger.info(
        f"Corpus: {len(kept)} researchers kept, {len(dropped)} dropped, "
        f"{len(attributions)} attributions, {len(works)} unique works"
    )
    return AttributedCorpus(
        attributions=frozenset(attributions),
        works=works,
        researchers_kept=frozenset(kept),
        researchers_dropped=frozenset(dropped),
        recovered=recovered,
    )


def unique_works(c: AttributedCorpus) -> list[WorkRecord]:
    """Одна запись на work_id, по (дата публикации, work_id)."""
    return sorted(c.works.values(), key=lambda w: (w.publication_date.sort_key, w.work_id))


def slice_period(works: Iterable[WorkRecord], p: PeriodSlice) -> list[WorkRecord]:
    """Работы с годом публикации в [start_year, end_year], порядок сохраняется."""
    return [w for w in works if p.contains(w.year)]
