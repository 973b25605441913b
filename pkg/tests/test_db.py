import pytest

from db import ResearcherHarvest, SnapshotStore
from harvester import AuthorCandidate
from namekit import NameVariant, VariantKind
from tests.synthetic import make_work


def _candidate(author_id: str, name: str = "Juan Pérez") -> AuthorCandidate:
    variant = NameVariant("juan perez", VariantKind.ACCENT_FOLDED, given_count=1)
    return AuthorCandidate(author_id=author_id, display_name=name, works_count=2, queried_variant=variant)


@pytest.fixture
async def store(tmp_path):
    async with SnapshotStore(tmp_path / "state" / "snapshot.db") as s:
        yield s


async def test_response_cache(store):
    assert await store.get_response("k1") is None
    await store.put_response("k1", "GET /works", b'{"results": []}')
    await store.put_response("k1", "GET /works", b'{"results": [1]}')
    assert await store.get_response("k1") == b'{"results": [1]}'


async def test_saved_researcher_is_loaded_back(store):
    works = {"A1": [make_work("W2", year=2016), make_work("W1", year=2010, month=None)]}
    await store.save_researcher(
        ResearcherHarvest("r1", [_candidate("A1"), _candidate("A9", "Ana Sosa")], works, skipped_works=3)
    )
    assert await store.is_completed("r1")
    assert not await store.is_completed("r2")

    snapshot = await store.load_snapshot()
    assert snapshot.completed == {"r1"}
    assert [c.author_id for c in snapshot.candidates["r1"]] == ["A1", "A9"]
    variant = snapshot.candidates["r1"][0].queried_variant
    assert (variant.kind, variant.given_count) == (VariantKind.ACCENT_FOLDED, 1)
    assert snapshot.works["A1"] == works["A1"]
    assert snapshot.skipped_works == {"r1": 3}


async def test_resaving_replaces_candidates(store):
    await store.save_researcher(ResearcherHarvest("r1", [_candidate("A1"), _candidate("A2")]))
    await store.save_researcher(ResearcherHarvest("r1", [_candidate("A3")]))
    snapshot = await store.load_snapshot()
    assert [c.author_id for c in snapshot.candidates["r1"]] == ["A3"]


async def test_snapshot_persists_across_connections(tmp_path):
    path = tmp_path / "snapshot.db"
    async with SnapshotStore(path) as first:
        await first.save_researcher(ResearcherHarvest("r1", [_candidate("A1")], {"A1": [make_work("W1")]}))
        await first.put_response("k", "GET /authors", b"{}")
    async with SnapshotStore(path) as second:
        assert await second.is_completed("r1")
        assert await second.get_response("k") == b"{}"
        assert (await second.load_snapshot()).works["A1"][0].work_id == "W1"
