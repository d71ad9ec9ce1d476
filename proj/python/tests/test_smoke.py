import pytest

import agilelint

TABLE2 = "max(0, 100-(violations/totalUS*100*AvgInSprints))"


def test_neverending_rating():
    assert agilelint.eval_rating(TABLE2, violations=0, totalUS=10, AvgInSprints=0) == 100
    assert agilelint.eval_rating(TABLE2, violations=2, totalUS=10, AvgInSprints=2.5) == 50
    assert agilelint.eval_rating(TABLE2, violations=10, totalUS=10, AvgInSprints=3) == 0


def test_errors_carry_codes():
    with pytest.raises(agilelint.Error) as info:
        agilelint.eval_rating("max(1,2,3)")
    assert info.value.code == "ArityError"
    with pytest.raises(agilelint.Error) as info:
        agilelint.validate_catalog({"metrics": [{"id": "x"}]})
    assert info.value.code == "CatalogInvalid"


def test_builtin_catalog():
    catalog = agilelint.validate_catalog(agilelint.builtin_catalog())
    assert len(catalog["metrics"]) == 10
    backlog = [m["name"] for m in catalog["metrics"] if m["category"] == "Backlog Maintenance"]
    assert backlog == ["The Neverending Story", "Monster Stories", "Lottie and Lisa"]


@pytest.fixture(scope="module")
def project():
    fixture = agilelint.generate_fixture(
        42, "teams=2,sprints=3,stories=40,commits=80,file_changes=300,neverending-story=2")
    snapshot = agilelint.ingest(fixture["issues"], fixture["commits"], fixture["runs"])
    return fixture, snapshot


def test_ingest_is_deterministic(project):
    fixture, snapshot = project
    again = agilelint.ingest(fixture["issues"], fixture["commits"], fixture["runs"])
    assert agilelint.data_version(again) == agilelint.data_version(snapshot)
    assert len(agilelint.data_version(snapshot)) == 64


def test_query(project):
    _, snapshot = project
    table = agilelint.run_query("MATCH (l:Label) WHERE l.name IN {teams} RETURN l.name AS Name", snapshot,
                                teams=["team-red", "team-blue"])
    assert table["columns"] == ["Name"]
    assert sorted(row[0] for row in table["rows"]) == ["team-blue", "team-red"]


def test_evaluate_and_report(project):
    fixture, snapshot = project
    results = agilelint.evaluate(snapshot)
    assert len(results) == 2 * 3 * 10
    injected = {v["artifact"] for v in fixture["manifest"]["violations"]}
    found = {v["artifact_ref"] for r in results if r["metric_id"] == "neverending-story" for v in r["violations"]}
    assert injected == found
    doc = agilelint.report(results, team="team-red")
    assert [t["team"] for t in doc["teams"]] == ["team-red"]
    assert agilelint.report(results, format="text").startswith("agilelint report")
