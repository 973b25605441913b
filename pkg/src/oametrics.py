"""Классификация доступа и репозиториев, агрегаты для таблиц и графиков отчёта."""

from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from urllib.parse import urlsplit

from config import logger
from corpus import AttributedCorpus, PeriodSlice, slice_period
from harvester import WorkRecord
from roster import Area, Researcher
from utils.helpers import calculate_percent, safe_share

DEFAULT_INTERNATIONAL_HOSTS = (
    "arxiv.org",
    "zenodo.org",
    "europepmc.org",
    "ncbi.nlm.nih.gov/pmc",
    "biorxiv.org",
)

TOTAL_LABEL = "Total"


class OAStatus(StrEnum):
    GOLD = "Gold"
    GREEN = "Green"
    BRONZE = "Bronze"
    HYBRID = "Hybrid"
    CLOSED = "Closed"
    UNKNOWN = "Unknown"


OPEN_STATUSES = (OAStatus.GOLD, OAStatus.GREEN, OAStatus.BRONZE, OAStatus.HYBRID)

_RAW_STATUS = {
    "gold": OAStatus.GOLD,
    "green": OAStatus.GREEN,
    "bronze": OAStatus.BRONZE,
    "hybrid": OAStatus.HYBRID,
    "closed": OAStatus.CLOSED,
}


class RepoClass(StrEnum):
    ARGENTINE = "ArgentineRepository"
    INTERNATIONAL = "InternationalRepository"
    NOT_REPOSITORY = "NotRepository"


@dataclass(frozen=True)
class RepoRules:
    """
    Правила распознавания репозиториев по URL.

    national_domains: суффиксы доменов страны (".ar")
    argentine_hosts: дополнительные хосты национальных репозиториев
    international_hosts: хосты международных репозиториев, возможно с префиксом пути
    """

    national_domains: tuple[str, ...] = (".ar",)
    argentine_hosts: tuple[str, ...] = ()
    international_hosts: tuple[str, ...] = DEFAULT_INTERNATIONAL_HOSTS


@dataclass(frozen=True)
class StatusCounts:
    n: int
    counts: dict[OAStatus, int]

    def share(self, status: OAStatus) -> float:
        return safe_share(self.counts.get(status, 0), self.n)

    @property
    def shares(self) -> dict[OAStatus, float]:
        return {status: self.share(status) for status in OAStatus}

    @property
    def open(self) -> int:
        return sum(self.counts.get(status, 0) for status in OPEN_STATUSES)

    @property
    def open_share(self) -> float:
        return safe_share(self.open, self.n)


@dataclass(frozen=True, slots=True)
class YearlyStatusShares:
    year: int
    n: int
    shares: dict[OAStatus, float]


@dataclass(frozen=True, slots=True)
class YearlyRepoShares:
    year: int
    n: int
    argentine_share: float
    international_share: float
    any_repo_share: float


@dataclass(frozen=True)
class StatusTotals(StatusCounts):
    unknown_without_doi: int = 0


@dataclass(frozen=True, slots=True)
class GroupStatusShares:
    group: str
    status: StatusCounts


@dataclass(frozen=True, slots=True)
class PeriodStatusShares:
    period: PeriodSlice
    status: StatusCounts


@dataclass(frozen=True)
class CoverageRow:
    area: str
    researchers_informed: int
    articles_informed: int
    researchers_recovered: int
    articles_recovered: int
    researchers_kept: int
    articles_kept: int
    pct_researchers_recovered: float = field(init=False)
    pct_articles_recovered: float = field(init=False)
    pct_researchers_kept: float = field(init=False)
    pct_articles_kept: float = field(init=False)

    def __post_init__(self):
        if not self.researchers_kept <= self.researchers_recovered <= self.researchers_informed:
            raise ValueError(f"Coverage row {self.area}: researcher counts are not nested")
        # Все проценты считаются от заявленного (как в таблице покрытия)
        pct = {
            "pct_researchers_recovered": (self.researchers_recovered, self.researchers_informed),
            "pct_articles_recovered": (self.articles_recovered, self.articles_informed),
            "pct_researchers_kept": (self.researchers_kept, self.researchers_informed),
            "pct_articles_kept": (self.articles_kept, self.articles_informed),
        }
        for name, (part, total) in pct.items():
            object.__setattr__(self, name, calculate_percent(part, total, 1))


# ===== Классификация =====


def classify_status(w: WorkRecord) -> OAStatus:
    if not w.oa_status_raw:
        return OAStatus.UNKNOWN
    return _RAW_STATUS.get(w.oa_status_raw.strip().lower(), OAStatus.UNKNOWN)


def _host_matches(host: str, pattern: str) -> bool:
    return host == pattern or host.endswith(f".{pattern}")


def _split_host_pattern(entry: str) -> tuple[str, str]:
    entry = entry.strip().lower()
    host, _, path = entry.partition("/")
    return host, f"/{path}" if path else ""


def classify_repo(url: str | None, rules: RepoRules) -> RepoClass:
    """
    Класс репозитория по одному URL.

    Национальный суффикс и список национальных хостов проверяются раньше
    международных: ri.conicet.gov.ar → ArgentineRepository,
    arxiv.org → InternationalRepository.
    """
    if not url:
        return RepoClass.NOT_REPOSITORY
    try:
        parts = urlsplit(url.strip())
        host = (parts.hostname or "").lower()
    except ValueError as e:
        logger.debug(f"Malformed URL {url!r}: {e}")
        return RepoClass.NOT_REPOSITORY
    if not host:
        logger.debug(f"URL without host: {url!r}")
        return RepoClass.NOT_REPOSITORY

    for suffix in rules.national_domains:
        suffix = suffix.lower() if suffix.startswith(".") else f".{suffix.lower()}"
        if host.endswith(suffix):
            return RepoClass.ARGENTINE
    if any(_host_matches(host, h.strip().lower()) for h in rules.argentine_hosts):
        return RepoClass.ARGENTINE

    path = parts.path.lower()
    for entry in rules.international_hosts:
        pattern, prefix = _split_host_pattern(entry)
        if _host_matches(host, pattern) and path.startswith(prefix):
            return RepoClass.INTERNATIONAL
    return RepoClass.NOT_REPOSITORY


def work_repo_classes(w: WorkRecord, rules: RepoRules) -> frozenset[RepoClass]:
    """Классы репозиториев по всем URL работы (host_venue и все location)."""
    urls = list(w.location_urls)
    if w.host_venue_url and w.host_venue_url not in urls:
        urls.append(w.host_venue_url)
    return frozenset(classify_repo(url, rules) for url in urls)


def in_argentine_repository(w: WorkRecord, rules: RepoRules) -> bool:
    return RepoClass.ARGENTINE in work_repo_classes(w, rules)


def _read_host_list(path: Path) -> tuple[str, ...]:
    hosts = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            hosts.append(line.lower())
    return tuple(hosts)


def load_repo_rules(
    national_domains: Sequence[str] = (".ar",),
    allowlist_path: Path | None = None,
    international_path: Path | None = None,
) -> RepoRules:
    """Правила из файлов: по одному хосту в строке, # начинает комментарий."""
    argentine = _read_host_list(allowlist_path) if allowlist_path else ()
    if international_path is not None and international_path.exists():
        international = _read_host_list(international_path)
    else:
        international = DEFAULT_INTERNATIONAL_HOSTS
    return RepoRules(
        national_domains=tuple(national_domains),
        argentine_hosts=argentine,
        international_hosts=international,
    )


# ===== Агрегаты =====


def count_statuses(works: Iterable[WorkRecord]) -> StatusCounts:
    counts = Counter(classify_status(w) for w in works)
    return StatusCounts(n=sum(counts.values()), counts={status: counts.get(status, 0) for status in OAStatus})


def _by_year(works: Iterable[WorkRecord]) -> dict[int, list[WorkRecord]]:
    years: dict[int, list[WorkRecord]] = {}
    for w in works:
        years.setdefault(w.year, []).append(w)
    return dict(sorted(years.items()))


def status_timeseries(works: Iterable[WorkRecord], period: PeriodSlice) -> list[YearlyStatusShares]:
    """Доли статусов доступа по годам публикации (только годы, где есть работы)."""
    series = []
    for year, year_works in _by_year(slice_period(works, period)).items():
        counts = count_statuses(year_works)
        series.append(YearlyStatusShares(year=year, n=counts.n, shares=counts.shares))
    return series


def repo_timeseries(
    works: Iterable[WorkRecord], period: PeriodSlice, rules: RepoRules
) -> list[YearlyRepoShares]:
    """Доли работ года, у которых хоть один URL указывает на репозиторий данного класса."""
    series = []
    for year, year_works in _by_year(slice_period(works, period)).items():
        argentine = international = any_repo = 0
        for w in year_works:
            classes = work_repo_classes(w, rules)
            argentine += RepoClass.ARGENTINE in classes
            international += RepoClass.INTERNATIONAL in classes
            any_repo += bool(classes & {RepoClass.ARGENTINE, RepoClass.INTERNATIONAL})
        n = len(year_works)
        series.append(
            YearlyRepoShares(
                year=year,
                n=n,
                argentine_share=safe_share(argentine, n),
                international_share=safe_share(international, n),
                any_repo_share=safe_share(any_repo, n),
            )
        )
    return series


def summarize_totals(works: Iterable[WorkRecord]) -> StatusTotals:
    works = list(works)
    counts = count_statuses(works)
    unknown_without_doi = sum(1 for w in works if classify_status(w) is OAStatus.UNKNOWN and not w.doi)
    return StatusTotals(n=counts.n, counts=counts.counts, unknown_without_doi=unknown_without_doi)


def period_comparison(
    works: Sequence[WorkRecord], pre: PeriodSlice, post: PeriodSlice
) -> list[PeriodStatusShares]:
    """Статусы доступа в периодах до и после закона."""
    return [PeriodStatusShares(period=p, status=count_statuses(slice_period(works, p))) for p in (pre, post)]


def discipline_breakdown(
    corpus: AttributedCorpus, roster: Sequence[Researcher], period: PeriodSlice
) -> tuple[list[GroupStatusShares], list[GroupStatusShares]]:
    """
    Статусы доступа по большим областям и по дисциплинам.

    Работа нескольких соавторов учитывается один раз в каждой из их
    различных областей (дисциплин). Исследователи без дисциплины в разбивку
    по дисциплинам не попадают.

    Returns:
        (по областям в порядке Area, по дисциплинам в алфавитном порядке)
    """
    by_id = {r.id: r for r in roster}
    authors = corpus.authors_of()
    area_works: dict[Area, list[WorkRecord]] = {}
    discipline_works: dict[str, list[WorkRecord]] = {}

    for w in slice_period(corpus.works.values(), period):
        researchers = [by_id[rid] for rid in authors.get(w.work_id, ()) if rid in by_id]
        for area in {r.area for r in researchers}:
            area_works.setdefault(area, []).append(w)
        for discipline in {r.discipline for r in researchers if r.discipline}:
            discipline_works.setdefault(discipline, []).append(w)

    by_area = [
        GroupStatusShares(group=str(area), status=count_statuses(area_works[area]))
        for area in Area
        if area in area_works
    ]
    by_discipline = [
        GroupStatusShares(group=name, status=count_statuses(discipline_works[name]))
        for name in sorted(discipline_works)
    ]
    return by_area, by_discipline


def coverage_table(
    roster: Sequence[Researcher], recovered: Mapping[str, int], corpus: AttributedCorpus
) -> list[CoverageRow]:
    """
    Таблица покрытия: заявлено / найдено / оставлено по областям и итог.

    Args:
        roster: Исследователи
        recovered: researcher_id -> число найденных статей (до чистки)
        corpus: Корпус после чистки

    Returns:
        Строка на каждую область (в порядке Area) и итоговая строка "Total"
    """
    kept_counts = corpus.kept_counts()
    totals: dict[Area, list[int]] = {area: [0] * 6 for area in Area}
    for r in roster:
        n_recovered = recovered.get(r.id, 0)
        n_kept = kept_counts.get(r.id, 0)
        row = totals[r.area]
        row[0] += 1
        row[1] += r.declared_articles
        row[2] += n_recovered > 0
        row[3] += n_recovered
        row[4] += n_kept > 0
        row[5] += n_kept

    rows = [CoverageRow(str(area), *totals[area]) for area in Area]
    grand = [sum(column) for column in zip(*totals.values(), strict=True)]
    rows.append(CoverageRow(TOTAL_LABEL, *grand))
    return rows
