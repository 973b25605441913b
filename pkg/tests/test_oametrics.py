import pytest

from corpus import POST_PERIOD, PRE_PERIOD, WINDOW_PERIOD, CorpusConfig, build_corpus
from oametrics import (
    OAStatus,
    RepoClass,
    RepoRules,
    classify_repo,
    classify_status,
    count_statuses,
    coverage_table,
    discipline_breakdown,
    in_argentine_repository,
    load_repo_rules,
    period_comparison,
    repo_timeseries,
    status_timeseries,
    summarize_totals,
)
from roster import Area, Researcher
from tests.synthetic import make_work

CONICET = "https://ri.conicet.gov.ar/handle/11336/1"
ARXIV = "https://arxiv.org/abs/2101.00001"


@pytest.mark.parametrize(
    "raw, status",
    [
        ("gold", OAStatus.GOLD),
        ("GREEN", OAStatus.GREEN),
        (" bronze ", OAStatus.BRONZE),
        ("hybrid", OAStatus.HYBRID),
        ("closed", OAStatus.CLOSED),
        ("diamond", OAStatus.UNKNOWN),
        (None, OAStatus.UNKNOWN),
        ("", OAStatus.UNKNOWN),
    ],
)
def test_classify_status(raw, status):
    assert classify_status(make_work(status=raw)) is status


@pytest.mark.parametrize(
    "url, repo",
    [
        (CONICET, RepoClass.ARGENTINE),
        ("https://repositorio.uba.ar/x", RepoClass.ARGENTINE),
        ("http://SEDICI.UNLP.EDU.AR/handle/1", RepoClass.ARGENTINE),
        (ARXIV, RepoClass.INTERNATIONAL),
        ("https://export.arxiv.org/abs/1", RepoClass.INTERNATIONAL),
        ("https://www.ncbi.nlm.nih.gov/pmc/articles/PMC1", RepoClass.INTERNATIONAL),
        ("https://www.ncbi.nlm.nih.gov/pubmed/1", RepoClass.NOT_REPOSITORY),
        ("https://notarxiv.org/abs/1", RepoClass.NOT_REPOSITORY),
        ("https://journal.example.com/1", RepoClass.NOT_REPOSITORY),
        ("https://example.ar.com/1", RepoClass.NOT_REPOSITORY),
        ("not a url", RepoClass.NOT_REPOSITORY),
        ("http://[::1", RepoClass.NOT_REPOSITORY),
        (None, RepoClass.NOT_REPOSITORY),
    ],
)
def test_classify_repo(rules, url, repo):
    assert classify_repo(url, rules) is repo


def test_allowlisted_hosts_count_as_national(tmp_path):
    allowlist = tmp_path / "allow.txt"
    allowlist.write_text("# national mirrors\nrepo.example.org\n", encoding="utf-8")
    rules = load_repo_rules((".ar",), allowlist, None)
    assert classify_repo("https://mirror.repo.example.org/a", rules) is RepoClass.ARGENTINE
    assert classify_repo("https://zenodo.org/record/1", rules) is RepoClass.INTERNATIONAL


def test_national_domain_wins_over_international(rules):
    custom = RepoRules(national_domains=(".ar",), international_hosts=("conicet.gov.ar",))
    assert classify_repo(CONICET, custom) is RepoClass.ARGENTINE


def test_in_argentine_repository_checks_every_location(rules):
    assert in_argentine_repository(make_work(urls=("https://journal.example.com/1", CONICET)), rules)
    assert not in_argentine_repository(make_work(urls=("https://journal.example.com/1", ARXIV)), rules)
    assert not in_argentine_repository(make_work(urls=()), rules)


def test_count_statuses_and_shares():
    works = [make_work(f"W{i}", status=s) for i, s in enumerate(["gold", "gold", "green", "closed", None])]
    counts = count_statuses(works)
    assert counts.n == 5
    assert counts.counts[OAStatus.GOLD] == 2
    assert counts.share(OAStatus.GOLD) == pytest.approx(0.4)
    assert counts.open == 3
    assert counts.open_share == pytest.approx(0.6)
    assert sum(counts.shares.values()) == pytest.approx(1.0)


def test_count_statuses_empty():
    counts = count_statuses([])
    assert counts.n == 0
    assert all(share == 0.0 for share in counts.shares.values())


def test_summarize_totals_counts_unknown_without_doi():
    works = [
        make_work("W1", status=None, doi=None),
        make_work("W2", status=None),
        make_work("W3", status="gold", doi=None),
    ]
    totals = summarize_totals(works)
    assert totals.counts[OAStatus.UNKNOWN] == 2
    assert totals.unknown_without_doi == 1


def test_status_timeseries_only_years_with_works():
    works = [
        make_work("W1", year=2005, status="gold"),
        make_work("W2", year=2007, status="gold"),
        make_work("W3", year=2007, status="closed"),
        make_work("W4", year=2010, status="green"),
    ]
    series = status_timeseries(works, WINDOW_PERIOD)
    assert [(p.year, p.n) for p in series] == [(2007, 2), (2010, 1)]
    assert series[0].shares[OAStatus.GOLD] == 0.5
    assert series[1].shares[OAStatus.GREEN] == 1.0


def test_repo_timeseries_uses_all_works_of_year(rules):
    works = [
        make_work("W1", year=2015, urls=(CONICET,)),
        make_work("W2", year=2015, urls=(CONICET, ARXIV)),
        make_work("W3", year=2015, urls=(ARXIV,)),
        make_work("W4", year=2015, urls=("https://journal.example.com/4",)),
    ]
    (point,) = repo_timeseries(works, WINDOW_PERIOD, rules)
    assert point.n == 4
    assert point.argentine_share == 0.5
    assert point.international_share == 0.5
    assert point.any_repo_share == 0.75


def test_period_comparison():
    works = [make_work("W1", year=2010, status="gold"), make_work("W2", year=2016, status="closed")]
    pre, post = period_comparison(works, PRE_PERIOD, POST_PERIOD)
    assert pre.status.counts[OAStatus.GOLD] == 1
    assert post.status.counts[OAStatus.CLOSED] == 1


def _roster():
    return [
        Researcher("a", "Ana", "Sosa", Area.CBS, "Biología", 2),
        Researcher("b", "Juan", "Luna", Area.CEN, "Física", 2),
        Researcher("c", "Inés", "Ruiz", Area.CEN, None, 1),
        Researcher("d", "Tomás", "Díaz", Area.CSH, "Historia", 10),
        Researcher("e", "Lucía", "Molina", Area.CSH, "Historia", 0),
    ]


def _corpus():
    shared = make_work("W1", year=2016, status="gold")
    attributed = {
        "a": {"W1": shared, "W2": make_work("W2", year=2015, status="closed")},
        "b": {"W1": shared, "W3": make_work("W3", year=2010, status="green")},
        "c": {"W1": shared},
        "d": {"W4": make_work("W4", year=2017)},
    }
    return build_corpus(_roster(), attributed, CorpusConfig())


def test_discipline_breakdown_counts_each_work_once_per_group():
    by_area, by_discipline = discipline_breakdown(_corpus(), _roster(), POST_PERIOD)
    assert [(g.group, g.status.n) for g in by_area] == [("CBS", 2), ("CEN", 1)]
    assert [(g.group, g.status.n) for g in by_discipline] == [("Biología", 2), ("Física", 1)]


def test_coverage_table():
    corpus = _corpus()
    rows = {row.area: row for row in coverage_table(_roster(), corpus.recovered, corpus)}
    assert list(rows) == ["CAIM", "CBS", "CEN", "CSH", "Unspecified", "Total"]

    cen = rows["CEN"]
    assert (cen.researchers_informed, cen.articles_informed) == (2, 3)
    assert (cen.researchers_recovered, cen.articles_recovered) == (2, 3)
    assert (cen.researchers_kept, cen.articles_kept) == (2, 3)
    assert cen.pct_articles_kept == 100.0

    csh = rows["CSH"]
    assert (csh.researchers_recovered, csh.researchers_kept, csh.articles_kept) == (1, 0, 0)
    assert csh.pct_researchers_recovered == 50.0

    total = rows["Total"]
    assert (total.researchers_informed, total.articles_informed) == (5, 15)
    assert (total.researchers_recovered, total.articles_recovered) == (4, 6)
    assert (total.researchers_kept, total.articles_kept) == (3, 5)
    assert total.pct_articles_recovered == 40.0
    assert total.pct_articles_kept == pytest.approx(33.3)

    empty = rows["CAIM"]
    assert empty.researchers_informed == 0
    assert empty.pct_researchers_recovered == 0.0
