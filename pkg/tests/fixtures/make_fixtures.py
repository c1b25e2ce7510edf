"""Regenerates the fixture workbooks committed next to this script.

Writes a minimal Office Open XML workbook with inline-string cells and a
fixed zip timestamp so the binaries are reproducible. Run directly:

    python3 tests/fixtures/make_fixtures.py
"""

from __future__ import annotations

import zipfile
from pathlib import Path
from xml.sax.saxutils import escape

_CONTENT_TYPES = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">
<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>
<Default Extension="xml" ContentType="application/xml"/>
<Override PartName="/xl/workbook.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml"/>
<Override PartName="/xl/worksheets/sheet1.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.worksheet+xml"/>
</Types>"""

_ROOT_RELS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">
<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="xl/workbook.xml"/>
</Relationships>"""

_WORKBOOK = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<workbook xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships">
<sheets><sheet name="episodes" sheetId="1" r:id="rId1"/></sheets>
</workbook>"""

_WORKBOOK_RELS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">
<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/worksheet" Target="worksheets/sheet1.xml"/>
</Relationships>"""


def _col_letter(idx: int) -> str:
    letters = ""
    idx += 1
    while idx:
        idx, rem = divmod(idx - 1, 26)
        letters = chr(ord("A") + rem) + letters
    return letters


def _sheet_xml(rows: list[list[str]]) -> str:
    parts = [
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>',
        '<worksheet xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main">',
        "<sheetData>",
    ]
    for r, row in enumerate(rows, start=1):
        parts.append(f'<row r="{r}">')
        for c, value in enumerate(row):
            ref = f"{_col_letter(c)}{r}"
            parts.append(f'<c r="{ref}" t="inlineStr"><is><t>{escape(value)}</t></is></c>')
        parts.append("</row>")
    parts.append("</sheetData></worksheet>")
    return "".join(parts)


def write_xlsx(path: Path, rows: list[list[str]]) -> None:
    stamp = (2020, 1, 1, 0, 0, 0)
    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
        for name, data in [
            ("[Content_Types].xml", _CONTENT_TYPES),
            ("_rels/.rels", _ROOT_RELS),
            ("xl/workbook.xml", _WORKBOOK),
            ("xl/_rels/workbook.xml.rels", _WORKBOOK_RELS),
            ("xl/worksheets/sheet1.xml", _sheet_xml(rows)),
        ]:
            info = zipfile.ZipInfo(name, date_time=stamp)
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, data)


HEADER = ["episode_id", "description", "jurisdiction", "year", "policy_type",
          "government_focus", "relevance_set"]

BASIC_ROWS = [
    HEADER,
    ["ep1", "A carbon tax on industrial emitters is introduced",
     "EU", "2021", "environmental",
     "gdp_growth; inflation",
     "gdp_growth; inflation; energy_prices; co2_emissions"],
    ["ep2", "Universal childcare subsidy for low-income households",
     "US", "2019", "social",
     "unemployment; labor_participation",
     "unemployment; labor_participation; household_income; poverty_rate"],
    ["ep3", "", "JP", "2020", "fiscal", "gdp_growth", "gdp_growth"],
]

# engineered to exercise all three statuses with the stub backend:
# ep2 has a blank description (skip), ep3 carries the stub outage marker (error)
ALLSTATUS_ROWS = [
    HEADER,
    ["ok1", "A minimum wage increase is phased in over two years",
     "US", "2022", "labor",
     "unemployment; household_income",
     "unemployment; household_income; income_inequality; poverty_rate"],
    ["skip1", "", "EU", "2021", "fiscal", "", ""],
    ["err1", "A pension reform [backend-offline] raises the retirement age",
     "JP", "2023", "fiscal",
     "public_debt",
     "public_debt; labor_participation"],
]

EMPTY_ROWS = [HEADER]


def main() -> None:
    here = Path(__file__).parent
    write_xlsx(here / "corpus_basic.xlsx", BASIC_ROWS)
    write_xlsx(here / "corpus_allstatus.xlsx", ALLSTATUS_ROWS)
    write_xlsx(here / "corpus_empty.xlsx", EMPTY_ROWS)
    print("fixtures written")


if __name__ == "__main__":
    main()
