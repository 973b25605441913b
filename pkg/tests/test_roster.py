import random

import pytest

from roster import (
    Area,
    RosterDuplicateError,
    RosterRowError,
    RosterSchemaError,
    load_roster,
    Researcher,
    parse_roster,
    summarize_roster,
)

HEADER = "id,given_names,surnames,area,discipline,declared_articles\n"


def test_parse_roster_keeps_file_order():
    raw = HEADER + "b2,María,López,CBS,Biología,12\na1,Juan,Pérez García,CEN,,3\n"
    roster = parse_roster(raw)
    assert [r.id for r in roster] == ["b2", "a1"]
    assert roster[0].area is Area.CBS
    assert roster[0].discipline == "Biología"
    assert roster[1].discipline is None
    assert roster[1].declared_articles == 3


def test_unknown_area_becomes_unspecified():
    roster = parse_roster(HEADER + "x,Ana,Sosa,KA,,1\ny,Ana,Luna,csh,,1\n")
    assert roster[0].area is Area.UNSPECIFIED
    assert roster[1].area is Area.CSH


def test_discipline_column_is_optional():
    roster = parse_roster("id,given_names,surnames,area,declared_articles\nx,Ana,Sosa,CEN,4\n")
    assert roster[0].discipline is None


def test_bom_and_extra_whitespace_are_tolerated():
    roster = parse_roster("\ufeff" + HEADER + " x , Ana  María ,  Sosa ,CEN,, 4 \n")
    assert roster[0].id == "x"
    assert roster[0].given_names == "Ana María"
    assert roster[0].declared_articles == 4


def test_missing_column_is_schema_error():
    with pytest.raises(RosterSchemaError) as exc:
        parse_roster("id,given_names,surnames,area\nx,Ana,Sosa,CEN\n")
    assert exc.value.column == "declared_articles"


def test_duplicate_id_is_rejected():
    with pytest.raises(RosterDuplicateError) as exc:
        parse_roster(HEADER + "x,Ana,Sosa,CEN,,1\nx,Juan,Luna,CEN,,2\n")
    assert exc.value.researcher_id == "x"


@pytest.mark.parametrize(
    "row",
    [
        "x,Ana,Sosa,CEN,,many\n",
        "x,Ana,Sosa,CEN,,-1\n",
        "x,Ana,,CEN,,1\n",
        "x,Ana,...,CEN,,1\n",
        "x,Ana,- ',CEN,,1\n",
        ",Ana,Sosa,CEN,,1\n",
    ],
)
def test_invalid_rows_report_line_number(row):
    with pytest.raises(RosterRowError) as exc:
        parse_roster(HEADER + "ok,Juan,Luna,CEN,,2\n" + row)
    assert exc.value.row_number == 3


def test_empty_given_names_is_allowed():
    roster = parse_roster(HEADER + "x,,Sosa,CEN,,1\n")
    assert roster[0].given_names == ""


def test_load_roster_reads_utf8(tmp_path):
    path = tmp_path / "roster.csv"
    path.write_text(HEADER + "x,Inés,Núñez,CSH,Historia,7\n", encoding="utf-8")
    assert load_roster(path)[0].surnames == "Núñez"


def test_summarize_roster_counts_by_area():
    roster = parse_roster(HEADER + "a,Ana,Sosa,CEN,,4\nb,Juan,Luna,CEN,,6\nc,Inés,Ruiz,CBS,,1\n")
    summary = summarize_roster(roster)
    assert summary.researchers_by_area[Area.CEN] == 2
    assert summary.articles_by_area[Area.CEN] == 10
    assert summary.researchers_by_area[Area.CAIM] == 0
    assert summary.total_researchers == 3
    assert summary.total_articles == 11


def test_summary_ignores_order_and_adds_up():
    rng = random.Random(17)
    for _ in range(200):
        roster = [
            Researcher(
                id=f"r{i}",
                given_names="Ana",
                surnames=rng.choice(["Sosa", "Luna", "Ruiz"]),
                area=rng.choice(list(Area)),
                declared_articles=rng.randint(0, 80),
            )
            for i in range(rng.randint(0, 30))
        ]
        summary = summarize_roster(roster)
        shuffled = list(roster)
        rng.shuffle(shuffled)
        assert summarize_roster(shuffled) == summary
        assert sum(summary.researchers_by_area.values()) == summary.total_researchers == len(roster)
        assert sum(summary.articles_by_area.values()) == summary.total_articles
        assert summary.total_articles == sum(r.declared_articles for r in roster)
