"""Этапы пайплайна: harvest → build → report → impact."""

import asyncio
import os
from dataclasses import dataclass
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

from api import APIError
from config import ConfigError, RunConfig, logger
from corpus import (
    POST_PERIOD,
    PRE_PERIOD,
    WINDOW_PERIOD,
    AttributedCorpus,
    CorpusConfig,
    build_corpus,
    unique_works,
)
from db import HarvestSnapshot, ResearcherHarvest, SnapshotStore
from disambiguator import (
    DisambiguationConfig,
    MissingCountryPolicy,
    ResearcherAttribution,
    disambiguate_researcher,
)
from harvester import AuthorCandidate, Harvester, HarvestConfig, HarvestMode, WorkRecord
from impact import (
    RegressionError,
    RegressionFit,
    RegressionObservation,
    build_observations,
    fit_segmented,
    fitted_trend,
    law_week,
    weekly_deposit_series,
)
from namekit import AccentLexicon, generate_variants, load_lexicon, names_match
from oametrics import (
    RepoRules,
    coverage_table,
    discipline_breakdown,
    in_argentine_repository,
    load_repo_rules,
    period_comparison,
    repo_timeseries,
    status_timeseries,
    summarize_totals,
)
from reports import (
    ATTRIBUTION_COLUMNS,
    AUDIT_COLUMNS,
    CORPUS_COLUMNS,
    COVERAGE_COLUMNS,
    GROUP_COLUMNS,
    PERIOD_COLUMNS,
    REPOS_BY_YEAR_COLUMNS,
    STATUS_BY_YEAR_COLUMNS,
    TOTALS_COLUMNS,
    WEEKLY_COLUMNS,
    attribution_rows,
    audit_rows,
    corpus_rows,
    coverage_rows,
    group_rows,
    period_rows,
    repos_by_year_rows,
    status_by_year_rows,
    totals_rows,
    weekly_rows,
    write_json,
    write_table,
)
from roster import Researcher, RosterError, load_roster


class PipelineError(Exception):
    """Ошибка выполнения этапа (код выхода 1)"""

    pass


class HarvestError(PipelineError):
    """Ошибка API при сборе данных конкретного исследователя"""

    def __init__(self, researcher_id: str, cause: Exception):
        self.researcher_id = researcher_id
        super().__init__(f"Harvest failed for researcher {researcher_id}: {cause}")


@dataclass
class Inputs:
    """Входные данные, общие для всех этапов."""

    roster: list[Researcher]
    lexicon: AccentLexicon
    rules: RepoRules


@dataclass
class BuildResult:
    attributions: list[ResearcherAttribution]
    corpus: AttributedCorpus
    skipped_works: int


def load_inputs(cfg: RunConfig) -> Inputs:
    if not Path(cfg.roster_path).is_file():
        raise ConfigError(f"Roster file not found: {cfg.roster_path}")
    try:
        roster = load_roster(cfg.roster_path)
    except RosterError as e:
        raise PipelineError(f"Invalid roster {cfg.roster_path}: {e}") from e
    return Inputs(
        roster=roster,
        lexicon=load_lexicon(cfg.lexicon_path),
        rules=load_repo_rules(cfg.national_domains, cfg.repo_allowlist_path, cfg.international_repos_path),
    )


def harvest_config(cfg: RunConfig) -> HarvestConfig:
    return HarvestConfig(
        mailto=cfg.mailto,
        max_requests_per_second=cfg.max_requests_per_second,
        max_retries=cfg.max_retries,
        page_size=cfg.page_size,
        mode=HarvestMode.LIVE if cfg.live else HarvestMode.FIXTURE,
        fixture_dir=cfg.fixture_dir,
        concurrency=cfg.concurrency,
    )


# ===== harvest =====


async def harvest_researcher(harvester: Harvester, r: Researcher, lex: AccentLexicon) -> ResearcherHarvest:
    """
    Кандидаты по всем вариантам имени и работы кандидатов с подходящим именем.

    Кандидат, найденный несколькими вариантами, сохраняется один раз
    с первым (в порядке генерации) вариантом.
    """
    candidates: dict[str, AuthorCandidate] = {}
    for variant in generate_variants(r, lex):
        for candidate in await harvester.search_authors(variant):
            candidates.setdefault(candidate.author_id, candidate)

    works: dict[str, list[WorkRecord]] = {}
    skipped = 0
    for author_id in sorted(candidates):
        candidate = candidates[author_id]
        # Работы кандидатов с чужим именем не нужны: они отклоняются по имени
        if not names_match(candidate.display_name, r, lex).matched:
            continue
        fetched = await harvester.fetch_works(author_id)
        works[author_id] = fetched.records
        skipped += fetched.skipped

    return ResearcherHarvest(
        researcher_id=r.id,
        candidates=[candidates[a] for a in sorted(candidates)],
        works=works,
        skipped_works=skipped,
    )


async def harvest_stage(cfg: RunConfig, inputs: Inputs, harvester: Harvester | None = None) -> int:
    """
    Собирает данные по всем исследователям в снимок state/snapshot.db.

    Уже собранные исследователи пропускаются; ответы API кэшируются в
    снимке, поэтому прерванный запуск продолжается без повторных запросов.

    Returns:
        Сколько исследователей собрано в этом запуске
    """
    async with SnapshotStore(cfg.snapshot_path) as store:
        own_harvester = harvester is None
        if harvester is None:
            harvester = Harvester(harvest_config(cfg), cache=store)
        semaphore = asyncio.Semaphore(cfg.concurrency)

        async def run_one(r: Researcher) -> bool:
            async with semaphore:
                if await store.is_completed(r.id):
                    return False
                try:
                    result = await harvest_researcher(harvester, r, inputs.lexicon)
                except APIError as e:
                    raise HarvestError(r.id, e) from e
                await store.save_researcher(result)
                return True

        try:
            outcomes = await asyncio.gather(*(run_one(r) for r in inputs.roster), return_exceptions=True)
        finally:
            if own_harvester:
                await harvester.close()

    # Первая ошибка в порядке roster, чтобы сообщение не зависело от расписания
    for outcome in outcomes:
        if isinstance(outcome, BaseException):
            raise outcome
    harvested = sum(outcomes)
    logger.info(
        f"Harvest: {harvested} researchers fetched, {len(inputs.roster) - harvested} already in snapshot, "
        f"{harvester.client.request_count} HTTP requests"
    )
    return harvested


async def load_snapshot(cfg: RunConfig) -> HarvestSnapshot:
    if not cfg.snapshot_path.exists():
        raise PipelineError(f"No harvest snapshot at {cfg.snapshot_path}; run 'harvest' first")
    async with SnapshotStore(cfg.snapshot_path) as store:
        return await store.load_snapshot()


# ===== build =====


def build_stage(cfg: RunConfig, inputs: Inputs, snapshot: HarvestSnapshot) -> BuildResult:
    """Дизамбигуация по снимку и сборка корпуса."""
    missing = [r.id for r in inputs.roster if r.id not in snapshot.completed]
    if missing:
        raise PipelineError(
            f"Harvest snapshot is incomplete: {len(missing)} researchers missing (first: {missing[0]})"
        )

    disambiguation = DisambiguationConfig(
        country_code=cfg.country_code,
        match_percentage=cfg.match_percentage,
        count_missing_country_as=MissingCountryPolicy.parse(cfg.missing_country),
    )
    attributions = [
        disambiguate_researcher(r, snapshot.candidates[r.id], snapshot.works, disambiguation, inputs.lexicon)
        for r in inputs.roster
    ]
    corpus = build_corpus(
        inputs.roster,
        {a.researcher_id: a.works for a in attributions},
        CorpusConfig(
            threshold=cfg.discrepancy_threshold,
            article_types=cfg.article_types,
            two_sided=not cfg.one_sided_discrepancy,
        ),
    )
    return BuildResult(
        attributions=attributions,
        corpus=corpus,
        skipped_works=sum(snapshot.skipped_works.get(r.id, 0) for r in inputs.roster),
    )


def write_build(cfg: RunConfig, build: BuildResult) -> None:
    out = cfg.output_dir
    write_table(corpus_rows(build.corpus), CORPUS_COLUMNS, out / "corpus.tsv", sep="\t")
    write_table(attribution_rows(build.corpus), ATTRIBUTION_COLUMNS, out / "attributions.tsv", sep="\t")
    if cfg.audit:
        write_table(audit_rows(build.attributions), AUDIT_COLUMNS, out / "audit.tsv", sep="\t")


# ===== report =====


def generated_at(cfg: RunConfig) -> str | None:
    """Метка времени отчёта: SOURCE_DATE_EPOCH, None в режиме фикстур, иначе текущее UTC."""
    epoch = os.getenv("SOURCE_DATE_EPOCH")
    if epoch:
        return datetime.fromtimestamp(int(epoch), tz=UTC).isoformat()
    if not cfg.live:
        return None
    return datetime.now(UTC).isoformat()


def write_report(cfg: RunConfig, inputs: Inputs, build: BuildResult) -> None:
    out = cfg.output_dir
    corpus = build.corpus
    works = unique_works(corpus)

    coverage = coverage_table(inputs.roster, corpus.recovered, corpus)
    write_table(coverage_rows(coverage), COVERAGE_COLUMNS, out / "coverage.csv")
    status_series = status_timeseries(works, WINDOW_PERIOD)
    write_table(status_by_year_rows(status_series), STATUS_BY_YEAR_COLUMNS, out / "status_by_year.csv")
    write_table(
        repos_by_year_rows(repo_timeseries(works, WINDOW_PERIOD, inputs.rules)),
        REPOS_BY_YEAR_COLUMNS,
        out / "repos_by_year.csv",
    )
    totals = summarize_totals(works)
    write_table(totals_rows(totals), TOTALS_COLUMNS, out / "totals.csv")

    by_area, by_discipline = discipline_breakdown(corpus, inputs.roster, POST_PERIOD)
    write_table(group_rows(by_area, "area"), ["area", *GROUP_COLUMNS], out / "by_area.csv")
    write_table(
        group_rows(by_discipline, "discipline"), ["discipline", *GROUP_COLUMNS], out / "by_discipline.csv"
    )
    periods = period_comparison(works, PRE_PERIOD, POST_PERIOD)
    write_table(period_rows(periods), PERIOD_COLUMNS, out / "period_comparison.csv")

    metadata: dict[str, Any] = {
        "config_hash": cfg.config_hash(),
        "mode": cfg.mode,
        "generated_at": generated_at(cfg),
        "counts": {
            "researchers": len(inputs.roster),
            "researchers_kept": len(corpus.researchers_kept),
            "researchers_dropped": len(corpus.researchers_dropped),
            "attributions": len(corpus.attributions),
            "unique_works": len(works),
            "skipped_works_without_year": build.skipped_works,
            "open_works": totals.open,
        },
    }
    write_json(metadata, out / "run_metadata.json")
    logger.info(f"Reports written to {out}")


# ===== impact =====


def _fit_or_error(
    obs: list[RegressionObservation], include_month_effects: bool, robust: bool
) -> tuple[RegressionFit | None, dict[str, Any]]:
    try:
        fit = fit_segmented(obs, include_month_effects=include_month_effects, robust=robust)
    except RegressionError as e:
        return None, {"error": str(e)}
    return fit, fit.to_dict()


def impact_stage(cfg: RunConfig, inputs: Inputs, build: BuildResult) -> None:
    """
    Оценивает обе спецификации модели и пишет impact_report.json и weekly_series.csv.

    Ошибка оценки основной спецификации (include_month_effects) прерывает
    этап; ошибка второй записывается в отчёт.
    """
    rules = inputs.rules
    obs = build_observations(
        unique_works(build.corpus),
        lambda w: in_argentine_repository(w, rules),
        window_start=cfg.window_start,
        law_date=cfg.law_date,
        cutoff=cfg.cutoff,
    )

    primary = fit_segmented(obs, include_month_effects=cfg.include_month_effects, robust=cfg.robust_errors)
    secondary, secondary_report = _fit_or_error(obs, not cfg.include_month_effects, cfg.robust_errors)
    with_months, without_months = (primary, secondary) if cfg.include_month_effects else (secondary, primary)

    models = {
        "with_month_effects": with_months.to_dict() if with_months else secondary_report,
        "without_month_effects": without_months.to_dict() if without_months else secondary_report,
    }
    report = {
        "config_hash": cfg.config_hash(),
        "window": {
            "window_start": cfg.window_start.isoformat(),
            "law_date": cfg.law_date.isoformat(),
            "cutoff": cfg.cutoff.isoformat(),
        },
        "flags": {
            "include_month_effects": cfg.include_month_effects,
            "robust_errors": cfg.robust_errors,
            "country_code": cfg.country_code,
        },
        "primary": "with_month_effects" if cfg.include_month_effects else "without_month_effects",
        "models": models,
        "n_obs": len(obs),
        "imputed_dates": sum(o.imputed for o in obs),
    }
    write_json(report, cfg.output_dir / "impact_report.json")

    weekly = weekly_deposit_series(obs)
    trend_fit = without_months or primary
    trend = fitted_trend(trend_fit, [p.t_weeks for p in weekly], law_week(cfg.window_start, cfg.law_date))
    write_table(weekly_rows(weekly, trend), WEEKLY_COLUMNS, cfg.output_dir / "weekly_series.csv")
    logger.info(f"Impact: beta2={primary.beta2:.4f} (p={primary.p_values['D']:.3g}), n={primary.n_obs}")


# ===== Команды =====


async def cmd_harvest(cfg: RunConfig) -> None:
    if cfg.fixture_dir is not None and not cfg.live and not Path(cfg.fixture_dir).is_dir():
        raise ConfigError(f"Fixture directory does not exist: {cfg.fixture_dir}")
    await harvest_stage(cfg, load_inputs(cfg))


async def _built(cfg: RunConfig) -> tuple[Inputs, BuildResult]:
    inputs = load_inputs(cfg)
    return inputs, build_stage(cfg, inputs, await load_snapshot(cfg))


async def cmd_build(cfg: RunConfig) -> None:
    _, build = await _built(cfg)
    write_build(cfg, build)


async def cmd_report(cfg: RunConfig) -> None:
    inputs, build = await _built(cfg)
    write_report(cfg, inputs, build)


async def cmd_impact(cfg: RunConfig) -> None:
    inputs, build = await _built(cfg)
    impact_stage(cfg, inputs, build)


async def cmd_all(cfg: RunConfig) -> None:
    await cmd_harvest(cfg)
    inputs, build = await _built(cfg)
    write_build(cfg, build)
    write_report(cfg, inputs, build)
    impact_stage(cfg, inputs, build)
