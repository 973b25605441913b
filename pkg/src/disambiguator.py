"""Отбор кандидатов OpenAlex, действительно принадлежащих исследователю (имя + страна)."""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

from config import logger
from harvester import AuthorCandidate, WorkRecord
from namekit import AccentLexicon, names_match
from roster import Researcher
from utils.validators import validate_country_code, validate_fraction


class MissingCountryPolicy(StrEnum):
    NEUTRAL = "Neutral"  # работа без стран не входит в знаменатель
    FOREIGN = "Foreign"  # работа без стран считается иностранной

    @classmethod
    def parse(cls, raw: str) -> "MissingCountryPolicy":
        for policy in cls:
            if policy.value.lower() == raw.strip().lower():
                return policy
        raise ValueError(f"Unknown missing-country policy {raw!r}")


class DecisionReason(StrEnum):
    PASSED_THRESHOLD = "PassedThreshold"
    BELOW_THRESHOLD = "BelowThreshold"
    NO_COUNTRY_EVIDENCE = "NoCountryEvidence"
    NAME_MISMATCH = "NameMismatch"


@dataclass(frozen=True)
class DisambiguationConfig:
    country_code: str = "AR"
    match_percentage: float = 0.5
    count_missing_country_as: MissingCountryPolicy = MissingCountryPolicy.NEUTRAL

    def __post_init__(self):
        is_valid, error = validate_country_code(self.country_code)
        if not is_valid:
            raise ValueError(error)
        is_valid, error = validate_fraction(self.match_percentage)
        if not is_valid:
            raise ValueError(f"match_percentage: {error}")


@dataclass(frozen=True, slots=True)
class AcceptanceDecision:
    accepted: bool
    country_share: float
    works_with_country: int
    works_total: int
    reason: DecisionReason
    works_considered: int = 0

    def __post_init__(self):
        if not 0.0 <= self.country_share <= 1.0:
            raise ValueError(f"country_share out of range: {self.country_share}")
        if self.accepted != (self.reason is DecisionReason.PASSED_THRESHOLD):
            raise ValueError("Only PassedThreshold decisions are accepted")


@dataclass(frozen=True)
class CandidateDecision:
    candidate: AuthorCandidate
    decision: AcceptanceDecision


@dataclass(frozen=True)
class ResearcherAttribution:
    """Итог по исследователю: решения по кандидатам и объединённые работы."""

    researcher_id: str
    decisions: tuple[CandidateDecision, ...] = ()
    works: dict[str, WorkRecord] = field(default_factory=dict)

    @property
    def pairs(self) -> list[tuple[str, str]]:
        return [(self.researcher_id, work_id) for work_id in sorted(self.works)]

    @property
    def accepted_authors(self) -> list[str]:
        return [d.candidate.author_id for d in self.decisions if d.decision.accepted]


def country_share(
    works: Iterable[WorkRecord], cc: str, policy: MissingCountryPolicy = MissingCountryPolicy.NEUTRAL
) -> tuple[float, int, int]:
    """
    Доля работ с аффилиацией в стране cc.

    Returns:
        (share, with_country, considered); при considered = 0 доля равна 0
    """
    with_country = 0
    considered = 0
    for work in works:
        if not work.author_country_codes and policy is MissingCountryPolicy.NEUTRAL:
            continue
        considered += 1
        if cc in work.author_country_codes:
            with_country += 1
    share = with_country / considered if considered else 0.0
    return share, with_country, considered


def accept_author(
    candidate: AuthorCandidate,
    candidate_works: Sequence[WorkRecord],
    r: Researcher,
    cfg: DisambiguationConfig,
    lex: AccentLexicon,
) -> AcceptanceDecision:
    """
    Решает, принадлежит ли кандидат исследователю.

    Порядок причин отказа фиксирован: NameMismatch, затем NoCountryEvidence,
    затем сравнение доли с порогом.
    """
    share, with_country, considered = country_share(
        candidate_works, cfg.country_code, cfg.count_missing_country_as
    )

    if not names_match(candidate.display_name, r, lex).matched:
        reason = DecisionReason.NAME_MISMATCH
    elif considered == 0:
        reason = DecisionReason.NO_COUNTRY_EVIDENCE
    elif share >= cfg.match_percentage:
        reason = DecisionReason.PASSED_THRESHOLD
    else:
        reason = DecisionReason.BELOW_THRESHOLD

    return AcceptanceDecision(
        accepted=reason is DecisionReason.PASSED_THRESHOLD,
        country_share=share,
        works_with_country=with_country,
        works_total=len(candidate_works),
        reason=reason,
        works_considered=considered,
    )


def merge_accepted(
    researcher: Researcher, accepted: Iterable[tuple[AuthorCandidate, Sequence[WorkRecord]]]
) -> ResearcherAttribution:
    """Объединяет работы принятых кандидатов без повторов по work_id."""
    works: dict[str, WorkRecord] = {}
    for _candidate, candidate_works in accepted:
        for work in candidate_works:
            works.setdefault(work.work_id, work)
    return ResearcherAttribution(researcher_id=researcher.id, works=works)


def disambiguate_researcher(
    r: Researcher,
    candidates: Sequence[AuthorCandidate],
    works_by_author: Mapping[str, Sequence[WorkRecord]],
    cfg: DisambiguationConfig,
    lex: AccentLexicon,
) -> ResearcherAttribution:
    """Решения по всем кандидатам исследователя и объединение работ принятых."""
    decisions: list[CandidateDecision] = []
    accepted: list[tuple[AuthorCandidate, Sequence[WorkRecord]]] = []
    seen: set[str] = set()
    for candidate in sorted(candidates, key=lambda c: c.author_id):
        if candidate.author_id in seen:
            continue
        seen.add(candidate.author_id)
        works = works_by_author.get(candidate.author_id, ())
        decision = accept_author(candidate, works, r, cfg, lex)
        decisions.append(CandidateDecision(candidate, decision))
        if decision.accepted:
            accepted.append((candidate, works))

    merged = merge_accepted(r, accepted)
    logger.debug(
        f"Researcher {r.id}: {len(accepted)}/{len(decisions)} candidates accepted, {len(merged.works)} works"
    )
    return ResearcherAttribution(researcher_id=r.id, decisions=tuple(decisions), works=merged.works)

