"""Запись отчётов: CSV/TSV через pandas с фиксированными заголовками и JSON."""

import json
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pandas as pd

from config import logger
from corpus import AttributedCorpus, unique_works
from disambiguator import ResearcherAttribution
from impact import TrendPoint, WeeklyPoint
from oametrics import (
    CoverageRow,
    GroupStatusShares,
    OAStatus,
    PeriodStatusShares,
    StatusTotals,
    YearlyRepoShares,
    YearlyStatusShares,
)
from utils.helpers import format_percent

FLOAT_FORMAT = "%.6f"

STATUS_COLUMNS = [status.value.lower() for status in OAStatus]

COVERAGE_COLUMNS = [
    "area",
    "researchers_informed",
    "articles_informed",
    "researchers_recovered",
    "pct_researchers_recovered",
    "articles_recovered",
    "pct_articles_recovered",
    "researchers_kept",
    "pct_researchers_kept",
    "articles_kept",
    "pct_articles_kept",
]
STATUS_BY_YEAR_COLUMNS = ["year", "n", *STATUS_COLUMNS]
REPOS_BY_YEAR_COLUMNS = ["year", "n", "argentine_share", "international_share", "any_repo_share"]
TOTALS_COLUMNS = ["status", "count", "share"]
GROUP_COLUMNS = ["n", *STATUS_COLUMNS, "open_share"]
PERIOD_COLUMNS = ["period", "start_year", "end_year", "n", *STATUS_COLUMNS, "open_share"]
CORPUS_COLUMNS = ["work_id", "doi", "year", "oa_status_raw", "host_venue_url", "researchers"]
ATTRIBUTION_COLUMNS = ["researcher_id", "work_id"]
AUDIT_COLUMNS = ["researcher_id", "author_id", "reason", "share", "considered"]
WEEKLY_COLUMNS = ["t_weeks", "deposit_proportion", "n", "fitted_pre_trend", "fitted_segmented"]


def write_table(rows: Sequence[dict[str, Any]], columns: list[str], path: Path, sep: str = ",") -> None:
    """Пишет таблицу с фиксированным заголовком; пустой список даёт файл только с заголовком."""
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(list(rows), columns=columns)
    df.to_csv(path, sep=sep, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    logger.debug(f"Wrote {len(df)} rows to {path}")


def write_json(data: dict[str, Any], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def _status_shares(shares: dict[OAStatus, float]) -> dict[str, float]:
    return {status.value.lower(): shares[status] for status in OAStatus}


# ===== Таблицы отчёта =====


def coverage_rows(rows: Sequence[CoverageRow]) -> list[dict[str, Any]]:
    return [
        {
            "area": row.area,
            "researchers_informed": row.researchers_informed,
            "articles_informed": row.articles_informed,
            "researchers_recovered": row.researchers_recovered,
            "pct_researchers_recovered": format_percent(row.pct_researchers_recovered),
            "articles_recovered": row.articles_recovered,
            "pct_articles_recovered": format_percent(row.pct_articles_recovered),
            "researchers_kept": row.researchers_kept,
            "pct_researchers_kept": format_percent(row.pct_researchers_kept),
            "articles_kept": row.articles_kept,
            "pct_articles_kept": format_percent(row.pct_articles_kept),
        }
        for row in rows
    ]


def status_by_year_rows(series: Sequence[YearlyStatusShares]) -> list[dict[str, Any]]:
    return [{"year": point.year, "n": point.n, **_status_shares(point.shares)} for point in series]


def repos_by_year_rows(series: Sequence[YearlyRepoShares]) -> list[dict[str, Any]]:
    return [
        {
            "year": point.year,
            "n": point.n,
            "argentine_share": point.argentine_share,
            "international_share": point.international_share,
            "any_repo_share": point.any_repo_share,
        }
        for point in series
    ]


def totals_rows(totals: StatusTotals) -> list[dict[str, Any]]:
    rows = [{"status": str(s), "count": totals.counts[s], "share": totals.share(s)} for s in OAStatus]
    rows.append({"status": "Open", "count": totals.open, "share": totals.open_share})
    rows.append({"status": "UnknownWithoutDOI", "count": totals.unknown_without_doi, "share": 0.0})
    rows.append({"status": "Total", "count": totals.n, "share": 1.0 if totals.n else 0.0})
    return rows


def group_rows(groups: Sequence[GroupStatusShares], key: str) -> list[dict[str, Any]]:
    return [
        {key: g.group, "n": g.status.n, **_status_shares(g.status.shares), "open_share": g.status.open_share}
        for g in groups
    ]


def period_rows(periods: Sequence[PeriodStatusShares]) -> list[dict[str, Any]]:
    return [
        {
            "period": str(p.period.label),
            "start_year": p.period.start_year,
            "end_year": p.period.end_year,
            "n": p.status.n,
            **_status_shares(p.status.shares),
            "open_share": p.status.open_share,
        }
        for p in periods
    ]


def corpus_rows(corpus: AttributedCorpus) -> list[dict[str, Any]]:
    counts = corpus.attribution_counts()
    return [
        {
            "work_id": w.work_id,
            "doi": w.doi or "",
            "year": w.year,
            "oa_status_raw": w.oa_status_raw or "",
            "host_venue_url": w.host_venue_url or "",
            "researchers": counts[w.work_id],
        }
        for w in unique_works(corpus)
    ]


def attribution_rows(corpus: AttributedCorpus) -> list[dict[str, Any]]:
    return [{"researcher_id": r, "work_id": w} for r, w in sorted(corpus.attributions)]


def audit_rows(attributions: Sequence[ResearcherAttribution]) -> list[dict[str, Any]]:
    rows = []
    for attribution in sorted(attributions, key=lambda a: a.researcher_id):
        for item in attribution.decisions:
            rows.append(
                {
                    "researcher_id": attribution.researcher_id,
                    "author_id": item.candidate.author_id,
                    "reason": str(item.decision.reason),
                    "share": item.decision.country_share,
                    "considered": item.decision.works_considered,
                }
            )
    return rows


def weekly_rows(weekly: Sequence[WeeklyPoint], trend: Sequence[TrendPoint]) -> list[dict[str, Any]]:
    by_week = {point.t_weeks: point for point in trend}
    rows = []
    for point in weekly:
        fitted = by_week.get(point.t_weeks)
        rows.append(
            {
                "t_weeks": point.t_weeks,
                "deposit_proportion": point.deposit_proportion,
                "n": point.n,
                "fitted_pre_trend": fitted.fitted_pre_trend if fitted else None,
                "fitted_segmented": fitted.fitted_segmented if fitted else None,
            }
        )
    return rows
