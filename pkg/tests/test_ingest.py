from __future__ import annotations

import csv

import pytest

from policydag.errors import IngestError
from policydag.ingest import SkipDecision, parse_id_set, read_corpus
from policydag.model import PolicyEpisode

from conftest import FIXTURES
from fixtures.make_fixtures import HEADER, write_xlsx


class TestParseIdSet:
    def test_trim_and_dedupe(self):
        assert parse_id_set("gdp_growth; unemployment ;gdp_growth") == {
            "gdp_growth", "unemployment"}

    def test_empty_cell(self):
        assert parse_id_set("") == frozenset()
        assert parse_id_set(" ; ; ") == frozenset()


class TestReadCorpus:
    def test_fixture_workbook_frozen_parse(self, vocab):
        rows = read_corpus(FIXTURES / "corpus_basic.xlsx", vocab)
        assert len(rows) == 3
        (i1, ep1), (i2, ep2), (i3, skip) = rows
        assert (i1, i2, i3) == (2, 3, 4)
        assert isinstance(ep1, PolicyEpisode)
        assert ep1.episode_id == "ep1"
        assert ep1.description == "A carbon tax on industrial emitters is introduced"
        assert ep1.context == {"jurisdiction": "EU", "year": "2021", "policy_type": "environmental"}
        assert ep1.government_focus == {"gdp_growth", "inflation"}
        assert ep1.relevance_set == {"gdp_growth", "inflation", "energy_prices", "co2_emissions"}
        assert ep2.episode_id == "ep2"
        assert isinstance(skip, SkipDecision)
        assert skip.violations == ("missing description",)

    def test_blank_description_skips(self, vocab, tmp_path):
        path = tmp_path / "c.xlsx"
        write_xlsx(path, [HEADER, ["e1", "", "", "", "", "", ""]])
        [(_, result)] = read_corpus(path, vocab)
        assert isinstance(result, SkipDecision)
        assert "missing description" in result.violations

    def test_unknown_indicator_id_skips_not_filters(self, vocab, tmp_path):
        path = tmp_path / "c.xlsx"
        write_xlsx(path, [HEADER, ["e1", "some policy", "", "", "", "bogus_id", ""]])
        [(_, result)] = read_corpus(path, vocab)
        assert isinstance(result, SkipDecision)
        assert any("unknown indicator id" in v for v in result.violations)

    def test_empty_sets_are_valid(self, vocab, tmp_path):
        path = tmp_path / "c.xlsx"
        write_xlsx(path, [HEADER, ["e1", "some policy", "", "", "", "", ""]])
        [(_, result)] = read_corpus(path, vocab)
        assert isinstance(result, PolicyEpisode)
        assert result.government_focus == frozenset()

    def test_duplicate_episode_id_skips_second(self, vocab, tmp_path):
        path = tmp_path / "c.xlsx"
        write_xlsx(path, [
            HEADER,
            ["e1", "policy one", "", "", "", "", ""],
            ["e1", "policy two", "", "", "", "", ""],
        ])
        rows = read_corpus(path, vocab)
        assert isinstance(rows[0][1], PolicyEpisode)
        assert isinstance(rows[1][1], SkipDecision)

    def test_missing_required_column_is_fatal(self, vocab, tmp_path):
        path = tmp_path / "c.xlsx"
        write_xlsx(path, [["episode_id", "jurisdiction"], ["e1", "EU"]])
        with pytest.raises(IngestError, match="description"):
            read_corpus(path, vocab)

    def test_unreadable_file_is_fatal(self, vocab, tmp_path):
        path = tmp_path / "garbage.xlsx"
        path.write_bytes(b"not a zip")
        with pytest.raises(IngestError):
            read_corpus(path, vocab)

    def test_header_matched_case_insensitively(self, vocab, tmp_path):
        path = tmp_path / "c.xlsx"
        write_xlsx(path, [["Episode_ID ", " Description"], ["e1", "some policy"]])
        [(_, result)] = read_corpus(path, vocab)
        assert isinstance(result, PolicyEpisode)

    def test_extra_columns_land_in_context(self, vocab, tmp_path):
        path = tmp_path / "c.xlsx"
        write_xlsx(path, [
            ["episode_id", "description", "region_notes"],
            ["e1", "some policy", "border region"],
        ])
        [(_, ep)] = read_corpus(path, vocab)
        assert ep.context == {"region_notes": "border region"}

    def test_row_conservation(self, vocab):
        rows = read_corpus(FIXTURES / "corpus_allstatus.xlsx", vocab)
        episodes = sum(isinstance(r, PolicyEpisode) for _, r in rows)
        skips = sum(isinstance(r, SkipDecision) for _, r in rows)
        assert episodes + skips == len(rows) == 3

    def test_reading_twice_is_idempotent(self, vocab):
        assert (read_corpus(FIXTURES / "corpus_basic.xlsx", vocab)
                == read_corpus(FIXTURES / "corpus_basic.xlsx", vocab))

    def test_header_only_sheet_is_empty_corpus(self, vocab):
        assert read_corpus(FIXTURES / "corpus_empty.xlsx", vocab) == []


class TestCsvFallback:
    def test_csv_matches_xlsx_schema(self, vocab, tmp_path):
        xlsx_rows = read_corpus(FIXTURES / "corpus_basic.xlsx", vocab)
        from fixtures.make_fixtures import BASIC_ROWS

        path = tmp_path / "corpus.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh).writerows(BASIC_ROWS)
        csv_rows = read_corpus(path, vocab)
        assert [r for _, r in csv_rows] == [r for _, r in xlsx_rows]
