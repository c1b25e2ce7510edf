"""Row-wise corpus ingestion from XLSX (or CSV) into validated episodes.

The XLSX reader walks the Office Open XML parts directly with the stdlib
zipfile/ElementTree pair, which keeps the pipeline free of spreadsheet
dependencies; only cell values of one sheet are needed.
"""

from __future__ import annotations

import csv
import re
import zipfile
from dataclasses import dataclass
from pathlib import Path
from xml.etree import ElementTree

from .errors import IngestError
from .model import IndicatorVocabulary, PolicyEpisode, validate_episode

REQUIRED_COLUMNS = ("episode_id", "description")
KNOWN_CONTEXT_COLUMNS = ("jurisdiction", "year", "policy_type", "macro_conditions")
SET_COLUMNS = ("government_focus", "relevance_set")

_NS = {"m": "http://schemas.openxmlformats.org/spreadsheetml/2006/main"}
_REL_NS = {"r": "http://schemas.openxmlformats.org/package/2006/relationships"}
_DOC_REL = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"


@dataclass(frozen=True)
class SkipDecision:
    episode: PolicyEpisode  # unvalidated echo of the row, for status records
    violations: tuple[str, ...]


RowResult = tuple[int, "PolicyEpisode | SkipDecision"]


def _column_index(cell_ref: str) -> int:
    letters = re.match(r"[A-Z]+", cell_ref)
    if not letters:
        raise IngestError(f"malformed cell reference {cell_ref!r}")
    idx = 0
    for ch in letters.group(0):
        idx = idx * 26 + (ord(ch) - ord("A") + 1)
    return idx - 1


def _cell_value(cell: ElementTree.Element, shared: list[str]) -> str:
    kind = cell.get("t", "n")
    if kind == "s":
        v = cell.find("m:v", _NS)
        return shared[int(v.text)] if v is not None and v.text else ""
    if kind == "inlineStr":
        t = cell.find("m:is/m:t", _NS)
        return t.text or "" if t is not None else ""
    v = cell.find("m:v", _NS)
    if v is None or v.text is None:
        return ""
    text = v.text
    # integral floats read back as "2020.0"; present them as the analyst typed them
    if re.fullmatch(r"-?\d+\.0+", text):
        text = text.split(".")[0]
    return text


def _read_xlsx_rows(path: Path, sheet_name: str | None) -> list[list[str]]:
    try:
        zf = zipfile.ZipFile(path)
    except (OSError, zipfile.BadZipFile) as exc:
        raise IngestError(f"cannot open workbook {path}: {exc}") from exc
    with zf:
        try:
            workbook = ElementTree.fromstring(zf.read("xl/workbook.xml"))
            rels = ElementTree.fromstring(zf.read("xl/_rels/workbook.xml.rels"))
        except (KeyError, ElementTree.ParseError) as exc:
            raise IngestError(f"not a valid XLSX workbook: {exc}") from exc
        rel_targets = {
            rel.get("Id"): rel.get("Target")
            for rel in rels.findall("r:Relationship", _REL_NS)
        }
        sheets = workbook.findall("m:sheets/m:sheet", _NS)
        if not sheets:
            raise IngestError("workbook contains no sheets")
        chosen = None
        if sheet_name is None:
            chosen = sheets[0]
        else:
            for sheet in sheets:
                if sheet.get("name") == sheet_name:
                    chosen = sheet
                    break
            if chosen is None:
                raise IngestError(f"sheet {sheet_name!r} not found")
        rid = chosen.get(f"{{{_DOC_REL}}}id")
        target = rel_targets.get(rid, "worksheets/sheet1.xml")
        if not target.startswith("/"):
            target = "xl/" + target
        else:
            target = target.lstrip("/")
        shared: list[str] = []
        if "xl/sharedStrings.xml" in zf.namelist():
            sst = ElementTree.fromstring(zf.read("xl/sharedStrings.xml"))
            for si in sst.findall("m:si", _NS):
                shared.append("".join(t.text or "" for t in si.iter(f"{{{_NS['m']}}}t")))
        try:
            sheet_xml = ElementTree.fromstring(zf.read(target))
        except (KeyError, ElementTree.ParseError) as exc:
            raise IngestError(f"cannot read sheet part {target}: {exc}") from exc
        rows: list[list[str]] = []
        for row in sheet_xml.findall("m:sheetData/m:row", _NS):
            values: list[str] = []
            for cell in row.findall("m:c", _NS):
                ref = cell.get("r")
                idx = _column_index(ref) if ref else len(values)
                while len(values) <= idx:
                    values.append("")
                values[idx] = _cell_value(cell, shared)
            rows.append(values)
        return rows


def _read_csv_rows(path: Path) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            return [list(row) for row in csv.reader(fh)]
    except OSError as exc:
        raise IngestError(f"cannot open corpus {path}: {exc}") from exc


def parse_id_set(cell: str) -> frozenset[str]:
    """Semicolon-separated indicator ids, trimmed and deduplicated."""
    return frozenset(part.strip() for part in cell.split(";") if part.strip())


def _row_to_episode(
    header: list[str],
    values: list[str],
    vocab: IndicatorVocabulary,
    seen_ids: set[str],
) -> PolicyEpisode | SkipDecision:
    cells = {header[i]: values[i].strip() if i < len(values) else "" for i in range(len(header))}
    episode_id = cells.get("episode_id", "")
    description = cells.get("description", "")
    context = {}
    for col, value in cells.items():
        if col in REQUIRED_COLUMNS or col in SET_COLUMNS:
            continue
        if value:
            context[col] = value
    episode = PolicyEpisode(
        episode_id=episode_id,
        description=description,
        context=context,
        government_focus=parse_id_set(cells.get("government_focus", "")),
        relevance_set=parse_id_set(cells.get("relevance_set", "")),
    )
    violations = validate_episode(episode, vocab)
    if episode_id and episode_id in seen_ids:
        violations.append(f"duplicate episode_id: {episode_id}")
    if violations:
        return SkipDecision(episode=episode, violations=tuple(violations))
    seen_ids.add(episode_id)
    return episode


def read_corpus(
    path: str | Path,
    vocab: IndicatorVocabulary,
    sheet_name: str | None = None,
) -> list[RowResult]:
    """Read every data row into a PolicyEpisode or a SkipDecision.

    The first row is the header; names are matched case-insensitively after
    trimming. A missing required column aborts the whole run. Row indices in
    the result are spreadsheet row numbers (first data row = 2).
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        rows = _read_csv_rows(path)
    else:
        rows = _read_xlsx_rows(path, sheet_name)
    if not rows:
        raise IngestError("corpus has no header row")
    header = [h.strip().lower() for h in rows[0]]
    for required in REQUIRED_COLUMNS:
        if required not in header:
            raise IngestError(f"missing required column {required!r}")
    results: list[RowResult] = []
    seen_ids: set[str] = set()
    for i, values in enumerate(rows[1:], start=2):
        if not any(v.strip() for v in values):
            continue  # fully blank rows are not data
        results.append((i, _row_to_episode(header, values, vocab, seen_ids)))
    return results
