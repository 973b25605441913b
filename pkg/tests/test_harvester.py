from datetime import date

import pytest

from api import FixtureMissError
from harvester import (
    Harvester,
    HarvestConfig,
    HarvestMode,
    PublicationDate,
    WorkRecord,
    clean_doi,
    parse_work,
    short_id,
)
from namekit import NameVariant, VariantKind
from tests.synthetic import FixtureWriter, make_work


def _payload(**overrides):
    payload = {
        "id": "https://openalex.org/W42",
        "doi": "https://doi.org/10.1016/J.X.2015.01",
        "title": "Estudio",
        "publication_date": "2015-03-04",
        "publication_year": 2015,
        "type": "journal-article",
        "open_access": {"oa_status": "green", "is_oa": True},
        "host_venue": {"url": "https://journal.example.com/42"},
        "primary_location": {"landing_page_url": "https://journal.example.com/42", "pdf_url": None},
        "locations": [
            {"landing_page_url": "https://journal.example.com/42"},
            {
                "landing_page_url": "https://ri.conicet.gov.ar/handle/11336/1",
                "pdf_url": "https://ri.conicet.gov.ar/1.pdf",
            },
        ],
        "authorships": [
            {"countries": ["ar"], "institutions": [{"country_code": "AR"}]},
            {"countries": [], "institutions": [{"country_code": "BR"}, {"country_code": None}]},
        ],
    }
    payload.update(overrides)
    return payload


# ===== Даты =====


@pytest.mark.parametrize(
    "raw, year, expected",
    [
        ("2015-03-04", None, PublicationDate(2015, 3, 4)),
        ("2015-03", None, PublicationDate(2015, 3)),
        ("2015", None, PublicationDate(2015)),
        (None, 2010, PublicationDate(2010)),
        ("2015-02-30", 2015, PublicationDate(2015)),
        ("garbage", 2012, PublicationDate(2012)),
        (None, None, None),
    ],
)
def test_publication_date_parse(raw, year, expected):
    assert PublicationDate.parse(raw, year) == expected


def test_missing_month_and_day_are_imputed():
    assert PublicationDate(2015).to_date() == (date(2015, 7, 1), True)
    assert PublicationDate(2015, 3).to_date() == (date(2015, 3, 1), True)
    assert PublicationDate(2015, 3, 9).to_date() == (date(2015, 3, 9), False)


def test_publication_date_sorts_partial_dates_first():
    dates = [PublicationDate(2015, 3, 9), PublicationDate(2015), PublicationDate(2015, 3)]
    assert sorted(dates, key=lambda d: d.sort_key) == [
        PublicationDate(2015),
        PublicationDate(2015, 3),
        PublicationDate(2015, 3, 9),
    ]


def test_day_without_month_is_invalid():
    with pytest.raises(ValueError):
        PublicationDate(2015, None, 3)


# ===== Работы =====


def test_parse_work_maps_fields():
    work = parse_work(_payload())
    assert work.work_id == "W42"
    assert work.doi == "10.1016/J.X.2015.01"
    assert work.oa_status_raw == "green"
    assert work.publication_date == PublicationDate(2015, 3, 4)
    assert work.host_venue_url == "https://journal.example.com/42"
    assert work.location_urls == (
        "https://journal.example.com/42",
        "https://ri.conicet.gov.ar/handle/11336/1",
        "https://ri.conicet.gov.ar/1.pdf",
    )
    assert work.author_country_codes == frozenset({"AR", "BR"})
    assert work.is_journal_article


def test_parse_work_flags_other_types():
    work = parse_work(_payload(type="book-chapter"))
    assert work.work_type == "book-chapter"
    assert not work.is_journal_article


@pytest.mark.parametrize(
    "overrides",
    [
        {"publication_date": None, "publication_year": None},
        {"publication_date": "1500-01-01", "publication_year": 1500},
        {"publication_date": None, "publication_year": date.today().year + 2},
    ],
)
def test_parse_work_skips_missing_or_out_of_range_year(overrides):
    assert parse_work(_payload(**overrides)) is None


def test_parse_work_without_optional_fields():
    work = parse_work(
        {"id": "https://openalex.org/W1", "publication_year": 2001, "doi": None, "open_access": None}
    )
    assert work.doi is None
    assert work.oa_status_raw is None
    assert work.location_urls == ()
    assert work.author_country_codes == frozenset()


def test_work_record_validation():
    with pytest.raises(ValueError):
        make_work(year=1700)
    with pytest.raises(ValueError):
        WorkRecord(work_id="W1", title="", publication_date=PublicationDate(2015), doi="doi.org/10.1")
    with pytest.raises(ValueError):
        WorkRecord(work_id="", title="", publication_date=PublicationDate(2015))


def test_work_record_survives_snapshot_serialization():
    work = make_work(month=None, countries=("AR", "US"), urls=("https://arxiv.org/abs/1",), doi=None)
    assert WorkRecord.from_dict(work.to_dict()) == work


def test_identifier_helpers():
    assert short_id("https://openalex.org/A5023888391") == "A5023888391"
    assert short_id(None) == ""
    assert clean_doi("https://dx.doi.org/10.5/X") == "10.5/X"
    assert clean_doi("doi:10.5/x") == "10.5/x"
    assert clean_doi("https://doi.org/abc") is None


# ===== Конфигурация =====


def test_fixture_mode_requires_fixture_dir():
    with pytest.raises(ValueError):
        HarvestConfig(mode=HarvestMode.FIXTURE)


def test_live_mode_respects_polite_pool_ceiling():
    with pytest.raises(ValueError):
        HarvestConfig(mode=HarvestMode.LIVE, max_requests_per_second=12)
    assert HarvestConfig(mode=HarvestMode.LIVE, max_requests_per_second=10).max_requests_per_second == 10


@pytest.mark.parametrize("page_size", [0, 201])
def test_page_size_bounds(tmp_path, page_size):
    with pytest.raises(ValueError):
        HarvestConfig(fixture_dir=tmp_path, page_size=page_size)


def test_mailto_from_environment(tmp_path, monkeypatch):
    cfg = HarvestConfig(fixture_dir=tmp_path, mailto="config@example.org")
    assert cfg.effective_mailto == "config@example.org"
    monkeypatch.setenv("OA_MONITOR_MAILTO", "env@example.org")
    assert cfg.effective_mailto == "env@example.org"


# ===== Сбор по фикстурам =====


@pytest.fixture
def fixture_harvester(tmp_path):
    writer = FixtureWriter(tmp_path, page_size=2)
    writer.write(
        "/authors",
        {"search": "juan perez"},
        [
            {"id": "https://openalex.org/A3", "display_name": "Juan Pérez", "works_count": 5},
            {"id": "https://openalex.org/A1", "display_name": "J. Perez", "works_count": 2},
            {"id": None, "display_name": "Broken"},
            {"id": "https://openalex.org/A2", "display_name": "Juan Perez", "works_count": None},
        ],
    )
    works = [_payload(id=f"https://openalex.org/W{i}") for i in range(4)]
    works.insert(2, _payload(id="https://openalex.org/W99", publication_date=None, publication_year=None))
    writer.write("/works", {"filter": "author.id:A3"}, works)
    return Harvester(HarvestConfig(fixture_dir=tmp_path, page_size=2))


async def test_search_authors_sorted_with_variant(fixture_harvester):
    variant = NameVariant("juan perez", VariantKind.AS_GIVEN, given_count=1)
    candidates = await fixture_harvester.search_authors(variant)
    assert [c.author_id for c in candidates] == ["A1", "A2", "A3"]
    assert all(c.queried_variant == variant for c in candidates)
    assert candidates[1].works_count == 0


async def test_fetch_works_skips_undated(fixture_harvester):
    fetched = await fixture_harvester.fetch_works("A3")
    assert [w.work_id for w in fetched.records] == ["W0", "W1", "W2", "W3"]
    assert fetched.skipped == 1


async def test_fixture_miss_is_an_error(fixture_harvester):
    with pytest.raises(FixtureMissError):
        await fixture_harvester.fetch_works("A404")
