"""Сбор кандидатов в авторы и их работ из OpenAlex."""

import os
import re
from dataclasses import dataclass, field
from datetime import date
from enum import StrEnum
from pathlib import Path
from typing import Any

from api import FixtureStore, OpenAlexAPI, ResponseCache, SlidingWindowRateLimiter
from config import OPENALEX_API_TIMEOUT, OPENALEX_API_URL, logger
from namekit import NameVariant

JOURNAL_ARTICLE_TYPES = frozenset({"journal-article", "article"})
POLITE_POOL_CEILING = 10.0
MIN_YEAR = 1800

_DOI_PREFIX = re.compile(r"^(?:https?://(?:dx\.)?doi\.org/|doi:)", re.IGNORECASE)


class HarvestMode(StrEnum):
    LIVE = "Live"
    FIXTURE = "Fixture"


@dataclass(frozen=True)
class HarvestConfig:
    base_url: str = OPENALEX_API_URL
    mailto: str | None = None
    max_requests_per_second: float = 8.0
    max_retries: int = 4
    page_size: int = 200
    mode: HarvestMode = HarvestMode.FIXTURE
    fixture_dir: Path | None = None
    concurrency: int = 4
    timeout: int = OPENALEX_API_TIMEOUT

    def __post_init__(self):
        if self.max_requests_per_second <= 0:
            raise ValueError("max_requests_per_second must be positive")
        if self.mode is HarvestMode.LIVE and self.max_requests_per_second > POLITE_POOL_CEILING:
            raise ValueError(f"Live mode is limited to {POLITE_POOL_CEILING} requests per second")
        if not 1 <= self.page_size <= 200:
            raise ValueError("page_size must be in [1, 200]")
        if self.max_retries < 0:
            raise ValueError("max_retries must not be negative")
        if self.mode is HarvestMode.FIXTURE and self.fixture_dir is None:
            raise ValueError("Fixture mode requires fixture_dir")

    @property
    def effective_mailto(self) -> str | None:
        # OA_MONITOR_MAILTO перекрывает значение из конфигурации
        return os.getenv("OA_MONITOR_MAILTO") or self.mailto


@dataclass(frozen=True, slots=True)
class PublicationDate:
    year: int
    month: int | None = None
    day: int | None = None

    def __post_init__(self):
        if self.day is not None and self.month is None:
            raise ValueError("Day given without month")
        if self.month is not None and not 1 <= self.month <= 12:
            raise ValueError(f"Invalid month {self.month}")

    @property
    def sort_key(self) -> tuple[int, int, int]:
        return self.year, self.month or 0, self.day or 0

    def to_date(self) -> tuple[date, bool]:
        """Календарная дата и флаг подстановки (без месяца: 1 июля, без дня: 1 число)."""
        if self.month is None:
            return date(self.year, 7, 1), True
        if self.day is None:
            return date(self.year, self.month, 1), True
        return date(self.year, self.month, self.day), False

    def isoformat(self) -> str:
        if self.month is None:
            return f"{self.year:04d}"
        if self.day is None:
            return f"{self.year:04d}-{self.month:02d}"
        return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"

    @classmethod
    def parse(cls, raw: str | None, year: int | None = None) -> "PublicationDate | None":
        """Разбирает "YYYY-MM-DD", "YYYY-MM" или "YYYY"; иначе берёт отдельный год."""
        if raw:
            parts = raw.strip().split("-")
            try:
                numbers = [int(p) for p in parts[:3]]
                if len(numbers) == 3:
                    date(*numbers)
                return cls(*numbers)
            except (ValueError, TypeError):
                pass
        if year is not None:
            return cls(int(year))
        return None


@dataclass(frozen=True)
class WorkRecord:
    work_id: str
    title: str
    publication_date: PublicationDate
    work_type: str = ""
    doi: str | None = None
    oa_status_raw: str | None = None
    host_venue_url: str | None = None
    location_urls: tuple[str, ...] = ()
    author_country_codes: frozenset[str] = field(default_factory=frozenset)
    is_journal_article: bool = True

    def __post_init__(self):
        if not self.work_id:
            raise ValueError("work_id must not be empty")
        max_year = date.today().year + 1
        if not MIN_YEAR <= self.publication_date.year <= max_year:
            raise ValueError(f"Publication year {self.publication_date.year} of {self.work_id} out of range")
        if self.doi is not None and not self.doi.startswith("10."):
            raise ValueError(f"DOI {self.doi!r} of {self.work_id} does not start with '10.'")

    @property
    def year(self) -> int:
        return self.publication_date.year

    def to_dict(self) -> dict[str, Any]:
        return {
            "work_id": self.work_id,
            "title": self.title,
            "publication_date": self.publication_date.isoformat(),
            "work_type": self.work_type,
            "doi": self.doi,
            "oa_status_raw": self.oa_status_raw,
            "host_venue_url": self.host_venue_url,
            "location_urls": list(self.location_urls),
            "author_country_codes": sorted(self.author_country_codes),
            "is_journal_article": self.is_journal_article,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "WorkRecord":
        return cls(
            work_id=data["work_id"],
            title=data.get("title") or "",
            publication_date=PublicationDate.parse(data["publication_date"]),
            work_type=data.get("work_type") or "",
            doi=data.get("doi"),
            oa_status_raw=data.get("oa_status_raw"),
            host_venue_url=data.get("host_venue_url"),
            location_urls=tuple(data.get("location_urls") or ()),
            author_country_codes=frozenset(data.get("author_country_codes") or ()),
            is_journal_article=bool(data.get("is_journal_article", True)),
        )


@dataclass(frozen=True, slots=True)
class AuthorCandidate:
    author_id: str
    display_name: str
    works_count: int
    queried_variant: NameVariant

    def __post_init__(self):
        if not self.author_id:
            raise ValueError("author_id must not be empty")
        if self.works_count < 0:
            raise ValueError("works_count must not be negative")


@dataclass(frozen=True)
class FetchedWorks:
    records: list[WorkRecord]
    skipped: int = 0


def short_id(openalex_id: str | None) -> str:
    """https://openalex.org/A123 → A123"""
    if not openalex_id:
        return ""
    return openalex_id.rstrip("/").rsplit("/", 1)[-1]


def clean_doi(raw: str | None) -> str | None:
    if not raw:
        return None
    doi = _DOI_PREFIX.sub("", raw.strip())
    return doi if doi.startswith("10.") else None


def _location_urls(payload: dict[str, Any]) -> tuple[str, ...]:
    urls: list[str] = []

    def add(url: str | None) -> None:
        if url and url not in urls:
            urls.append(url)

    add((payload.get("host_venue") or {}).get("url"))
    locations = [payload.get("primary_location")] + list(payload.get("locations") or [])
    locations.append(payload.get("best_oa_location"))
    for location in locations:
        if not location:
            continue
        add(location.get("landing_page_url"))
        add(location.get("pdf_url"))
    return tuple(urls)


def _country_codes(payload: dict[str, Any]) -> frozenset[str]:
    codes: set[str] = set()
    for authorship in payload.get("authorships") or []:
        codes.update(authorship.get("countries") or [])
        for institution in authorship.get("institutions") or []:
            if institution.get("country_code"):
                codes.add(institution["country_code"])
    return frozenset(code.upper() for code in codes if isinstance(code, str) and len(code) == 2)


def parse_work(payload: dict[str, Any]) -> WorkRecord | None:
    """
    Преобразует JSON работы OpenAlex в WorkRecord.

    Returns:
        WorkRecord или None, если у работы нет корректного года публикации
    """
    publication_date = PublicationDate.parse(payload.get("publication_date"), payload.get("publication_year"))
    work_id = short_id(payload.get("id"))
    if publication_date is None:
        logger.debug(f"Skipping work {work_id}: no publication year")
        return None
    if not MIN_YEAR <= publication_date.year <= date.today().year + 1:
        logger.debug(f"Skipping work {work_id}: publication year {publication_date.year} out of range")
        return None

    host_venue_url = (payload.get("host_venue") or {}).get("url") or (
        payload.get("primary_location") or {}
    ).get("landing_page_url")
    work_type = payload.get("type") or ""

    return WorkRecord(
        work_id=work_id,
        title=payload.get("title") or payload.get("display_name") or "",
        publication_date=publication_date,
        work_type=work_type,
        doi=clean_doi(payload.get("doi")),
        oa_status_raw=(payload.get("open_access") or {}).get("oa_status"),
        host_venue_url=host_venue_url,
        location_urls=_location_urls(payload),
        author_country_codes=_country_codes(payload),
        is_journal_article=work_type in JOURNAL_ARTICLE_TYPES,
    )


class Harvester:
    """Запросы к OpenAlex: поиск авторов по варианту имени и выгрузка их работ."""

    def __init__(
        self,
        cfg: HarvestConfig,
        cache: ResponseCache | None = None,
        rate_limiter: SlidingWindowRateLimiter | None = None,
        client: OpenAlexAPI | None = None,
    ):
        self.cfg = cfg
        if client is None:
            live = cfg.mode is HarvestMode.LIVE
            if rate_limiter is None and live:
                rate_limiter = SlidingWindowRateLimiter(cfg.max_requests_per_second)
            client = OpenAlexAPI(
                cfg.base_url,
                replay_only=not live,
                fixtures=FixtureStore(cfg.fixture_dir) if cfg.fixture_dir else None,
                cache=cache,
                mailto=cfg.effective_mailto,
                page_size=cfg.page_size,
                rate_limiter=rate_limiter,
                timeout=cfg.timeout,
                max_retries=cfg.max_retries,
                concurrency=cfg.concurrency,
            )
        self.client = client

    async def close(self):
        await self.client.close()

    async def search_authors(self, variant: NameVariant) -> list[AuthorCandidate]:
        """
        Все авторы OpenAlex, найденные по варианту имени.

        Результат отсортирован по author_id (стабильно), каждый кандидат
        помечен вариантом, по которому найден.
        """
        if not variant.text:
            raise ValueError("Variant text must not be empty")
        candidates = []
        for payload in await self.client.search_authors(variant.text):
            author_id = short_id(payload.get("id"))
            if not author_id:
                logger.warning(f"Author entry without id for query {variant.text!r}, skipped")
                continue
            candidates.append(
                AuthorCandidate(
                    author_id=author_id,
                    display_name=payload.get("display_name") or "",
                    works_count=max(0, int(payload.get("works_count") or 0)),
                    queried_variant=variant,
                )
            )
        return sorted(candidates, key=lambda c: c.author_id)

    async def fetch_works(self, author_id: str) -> FetchedWorks:
        """
        Все работы автора; работы без года отбрасываются и считаются в skipped.

        Работы другого типа, чем статья в журнале, сохраняются с флагом
        is_journal_article=False.
        """
        if not author_id:
            raise ValueError("author_id must not be empty")
        records: list[WorkRecord] = []
        skipped = 0
        for payload in await self.client.get_author_works(author_id):
            record = parse_work(payload)
            if record is None:
                skipped += 1
                continue
            records.append(record)
        if skipped:
            logger.info(f"Author {author_id}: {skipped} works without publication year skipped")
        return FetchedWorks(records=records, skipped=skipped)
