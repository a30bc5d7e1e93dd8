from app.schemas.report import ComparisonReport
from app.schemas.tally import PrimeTally
from app.services.comparison_service import ComparisonService, anomaly_notes, compare_field


def test_notes_for_double_starred_row(fixture_by_key):
    f = fixture_by_key["dt32"]
    notes = anomaly_notes(f, f.expected_by_tally, f.expected_embed_tally)
    assert notes[0].startswith("outside hypotheses")
    assert any(n.startswith("p=2: 2-adic") for n in notes)


def test_notes_classify_odd_primes(fixture_by_key):
    f = fixture_by_key["dt29"]
    by = PrimeTally.from_mapping({5: 2, 7: 4})
    embed = PrimeTally.from_mapping({5: 2, 7: 2, 13: 2})
    notes = anomaly_notes(f, by, embed)
    assert any(n.startswith("p=7: multiplicity") for n in notes)
    assert any(n.startswith("p=13: unexplained") for n in notes)
    assert anomaly_notes(f, by, None) == []


def test_compare_field_by_only(fixture_by_key):
    report, rows, notes = compare_field(fixture_by_key["dt29"], 150, 50, False, with_embedding=False)
    assert report.tallies.embed is None
    (row,) = rows
    assert row.p == 5 and row.by == 2 and row.by_matches_table
    assert row.embed is None and row.by_matches_embed is None
    assert notes == []


def test_compare_field_with_embedding(fixture_by_key):
    _, rows, notes = compare_field(fixture_by_key["dt29"], 150, 50, False)
    (row,) = rows
    assert row.embed == 2
    assert row.by_matches_embed and row.embed_matches_table and row.embed_matches_denominators
    assert notes == []


def test_build_report_keeps_row_order_and_skips_heavy(fixtures):
    service = ComparisonService(max_workers=1, show_progress=False)
    report = service.build_report(
        fixtures, rows=["dt29", "dt5", "dt5x289"], skip_heavy=True, with_embedding=False
    )
    assert [f.field for f in report.fields] == ["dt5", "dt29"]
    assert report.skipped == ["dt5x289"]
    table = ComparisonService.render_table(report)
    assert "dt29" in table and "-" in table


def test_csv_and_empty_rendering(tmp_path, fixtures):
    assert ComparisonService.render_table(ComparisonReport()) == "(no rows)"
    report = ComparisonService(show_progress=False).build_report(
        fixtures, rows=["dt29"], with_embedding=False
    )
    path = tmp_path / "table.csv"
    ComparisonService.write_csv(report, path)
    header = path.read_text().splitlines()[0]
    assert header.startswith("field,p,denominators,by")


def test_multiplicity_note_for_dt61(fixture_by_key):
    f = fixture_by_key["dt61"]
    notes = anomaly_notes(f, f.expected_by_tally, f.expected_embed_tally)
    assert any(n.startswith("p=3: multiplicity") for n in notes)


def test_report_round_trips_through_json(fixtures):
    report = ComparisonService(show_progress=False).build_report(
        fixtures, rows=["dt29", "dt64x5"], with_embedding=False
    )
    assert ComparisonReport.model_validate_json(report.model_dump_json()) == report
