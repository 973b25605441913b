import os
import tempfile
from pathlib import Path

# Лог тестов не должен попадать в рабочий каталог
os.environ.setdefault("LOG_FILE", str(Path(tempfile.gettempdir()) / "oa_monitor_tests.log"))

import pytest  # noqa: E402

from config import DATA_DIR  # noqa: E402
from namekit import load_lexicon  # noqa: E402
from oametrics import RepoRules, load_repo_rules  # noqa: E402
from roster import Area, Researcher  # noqa: E402
from tests.synthetic import SyntheticDataset, build_synthetic  # noqa: E402


@pytest.fixture(autouse=True)
def _no_source_date_epoch(monkeypatch):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    monkeypatch.delenv("OA_MONITOR_MAILTO", raising=False)


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(DATA_DIR / "accents.csv")


@pytest.fixture(scope="session")
def rules() -> RepoRules:
    return load_repo_rules((".ar",), None, DATA_DIR / "repositories.txt")


@pytest.fixture
def researcher():
    return Researcher(
        id="r1",
        given_names="José",
        surnames="Pérez García",
        area=Area.CEN,
        discipline="Física",
        declared_articles=10,
    )


@pytest.fixture(scope="session")
def synthetic(tmp_path_factory) -> SyntheticDataset:
    return build_synthetic(tmp_path_factory.mktemp("synthetic"))
