import random

import pytest

from corpus import (
    FULL_PERIOD,
    POST_PERIOD,
    PRE_PERIOD,
    AttributedCorpus,
    CorpusConfig,
    PeriodLabel,
    PeriodSlice,
    build_corpus,
    discrepancy_keep,
    slice_period,
    unique_works,
)
from roster import Area, Researcher
from tests.synthetic import make_work


def _researcher(rid: str, declared: int) -> Researcher:
    return Researcher(id=rid, given_names="Ana", surnames="Sosa", area=Area.CEN, declared_articles=declared)


@pytest.mark.parametrize(
    "declared, recovered, two_sided, keep",
    [
        (100, 60, True, True),
        (100, 50, True, True),
        (100, 49, True, False),
        (100, 150, True, True),
        (100, 151, True, False),
        (100, 400, False, True),
        (100, 49, False, False),
        (0, 0, True, True),
        (0, 3, True, False),
        (0, 3, False, False),
    ],
)
def test_discrepancy_keep(declared, recovered, two_sided, keep):
    assert discrepancy_keep(declared, recovered, 0.5, two_sided) is keep


def test_discrepancy_threshold_zero_requires_exact_match():
    assert discrepancy_keep(10, 10, 0.0)
    assert not discrepancy_keep(10, 11, 0.0)


def test_build_corpus_drops_and_deduplicates():
    shared = make_work("W1", year=2015)
    roster = [_researcher("a", 2), _researcher("b", 2), _researcher("c", 10), _researcher("d", 0)]
    attributed = {
        "a": {"W1": shared, "W2": make_work("W2", year=2010)},
        "b": {
            "W1": shared,
            "W3": make_work("W3", year=2012),
            "B1": make_work("B1", work_type="book-chapter"),
        },
        "c": {"W4": make_work("W4")},
    }
    corpus = build_corpus(roster, attributed, CorpusConfig())

    assert corpus.researchers_kept == {"a", "b", "d"}
    assert corpus.researchers_dropped == {"c"}
    assert corpus.recovered == {"a": 2, "b": 2, "c": 1, "d": 0}
    assert corpus.attributions == {("a", "W1"), ("a", "W2"), ("b", "W1"), ("b", "W3")}
    assert set(corpus.works) == {"W1", "W2", "W3"}
    assert corpus.attribution_counts()["W1"] == 2
    assert corpus.kept_counts() == {"a": 2, "b": 2}
    assert corpus.authors_of()["W1"] == {"a", "b"}


def test_build_corpus_respects_article_types():
    roster = [_researcher("a", 2)]
    attributed = {"a": {"W1": make_work("W1"), "B1": make_work("B1", work_type="book-chapter")}}
    corpus = build_corpus(roster, attributed, CorpusConfig(article_types=("journal-article", "book-chapter")))
    assert set(corpus.works) == {"W1", "B1"}


def test_every_attributed_work_belongs_to_a_kept_researcher():
    with pytest.raises(ValueError):
        AttributedCorpus(
            attributions=frozenset({("x", "W1")}),
            works={"W1": make_work("W1")},
            researchers_kept=frozenset(),
            researchers_dropped=frozenset({"x"}),
        )


def test_unique_works_sorted_by_date_then_id():
    roster = [_researcher("a", 4)]
    attributed = {
        "a": {
            "W9": make_work("W9", year=2012, month=1, day=1),
            "W2": make_work("W2", year=2015, month=None),
            "W1": make_work("W1", year=2015, month=None),
            "W3": make_work("W3", year=2011, month=5, day=20),
        }
    }
    corpus = build_corpus(roster, attributed, CorpusConfig())
    assert [w.work_id for w in unique_works(corpus)] == ["W3", "W9", "W1", "W2"]


def test_slice_period_is_inclusive():
    works = [make_work(f"W{y}", year=y) for y in (2005, 2006, 2013, 2014, 2021, 2022)]
    assert [w.year for w in slice_period(works, PRE_PERIOD)] == [2006, 2013]
    assert [w.year for w in slice_period(works, POST_PERIOD)] == [2014, 2021]
    assert len(slice_period(works, FULL_PERIOD)) == 5


def test_period_bounds_are_validated():
    with pytest.raises(ValueError):
        PeriodSlice(PeriodLabel.PRE, 2014, 2013)


def test_empty_corpus():
    corpus = build_corpus([], {}, CorpusConfig())
    assert unique_works(corpus) == []
    assert corpus.attributions == frozenset()


def _random_pool(rng: random.Random, n: int, prefix: str = "W") -> list:
    pool = []
    for i in range(n):
        month = rng.choice([None, rng.randint(1, 12)])
        pool.append(
            make_work(
                f"{prefix}{i}",
                year=rng.randint(2000, 2022),
                month=month,
                day=rng.randint(1, 28),
                work_type=rng.choice(["journal-article", "journal-article", "book-chapter"]),
            )
        )
    return pool


def test_unique_works_is_idempotent_and_order_free():
    rng = random.Random(23)
    cfg = CorpusConfig(threshold=1.0)
    for _ in range(100):
        pool = _random_pool(rng, 40)
        roster = [_researcher(f"r{i}", rng.randint(1, 12)) for i in range(8)]
        attributed = {r.id: {w.work_id: w for w in rng.sample(pool, rng.randint(0, 12))} for r in roster}
        once = unique_works(build_corpus(roster, attributed, cfg))

        again = build_corpus([_researcher("z", len(once))], {"z": {w.work_id: w for w in once}}, cfg)
        assert unique_works(again) == once

        shuffled_roster = list(roster)
        rng.shuffle(shuffled_roster)
        shuffled = {}
        for rid in rng.sample(list(attributed), len(attributed)):
            items = list(attributed[rid].items())
            rng.shuffle(items)
            shuffled[rid] = dict(items)
        assert unique_works(build_corpus(shuffled_roster, shuffled, cfg)) == once


def test_slice_of_union_is_union_of_slices():
    rng = random.Random(29)
    for _ in range(200):
        a = _random_pool(rng, rng.randint(0, 20), "A")
        b = _random_pool(rng, rng.randint(0, 20), "B")
        for period in (FULL_PERIOD, PRE_PERIOD, POST_PERIOD):
            assert slice_period(a + b, period) == slice_period(a, period) + slice_period(b, period)
