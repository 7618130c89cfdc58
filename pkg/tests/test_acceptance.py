"""Acceptance suite: one criterion per marker, at the stated sizes/tolerances.

Run `pytest tests/test_acceptance.py -v`; the terminal summary prints one
PASS/FAIL line per criterion.  Everything runs offline.
"""

import json
import random
import subprocess
import sys
import time
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings

from pubmeta.emitters import emit_crossref, emit_jats, emit_json, emit_xmp, parse_json
from pubmeta.metafile import lower_to_paper_meta, parse_meta, serialize_meta
from pubmeta.model import validate_orcid
from pubmeta.schemacheck import validate_crossref, validate_jats
from pubmeta.textex import Math, RichText, Text, normalize

from strategies import (
    meta_documents,
    paper_metas,
    random_meta_document,
    random_paper_meta,
)
from test_emitters import (
    extract_crossref,
    extract_jats,
    extract_json,
    extract_xmp,
    hostile_models,
)
from test_model import dashed, orcid_check_char_oracle

from conftest import EMIT_FIXTURES, FIXTURES, fixture_path, load_pm

C1 = "Canonical sample-article fidelity: 2 authors, 2 affiliations, 1 funder, clean parse under 1s"
C2 = "TeX normalization: the six documented cases plus a 500-case macro-soup corpus"
C3 = "Identifier checksums: sample ORCIDs, 1000x mutation detection, 10k-base oracle agreement"
C4 = "Round trips: JSON and .meta, 1000 generated instances each"
C5 = "Schema validity: vendored Crossref XSD, JATS DTD, XML parse-back under fuzz"
C6 = "Cross-format consistency: authors, DOI, title identical across all four outputs"
C7 = "Determinism: repeated emit --all byte-identical; suite offline under 60s"

CFG = str(FIXTURES / "journal.cfg")


# ---------------------------------------------------------------------------
@pytest.mark.criterion(1, C1)
def test_sample_article_fidelity():
    started = time.monotonic()
    doc, parse_diags = parse_meta(fixture_path("emojex").read_bytes(), source_name="emojex")
    pm, lower_diags = lower_to_paper_meta(doc)
    elapsed = time.monotonic() - started
    assert parse_diags == [] and lower_diags == []
    assert len(pm.authors) == 2
    assert len(pm.affiliations) == 2
    assert len(pm.funders) == 1
    assert pm.authors[0].affiliations == [1, 2]
    assert pm.authors[1].affiliations == [2]
    assert pm.funders[0].grantid == "A-1234"
    assert pm.funders[0].funder_id.value == "100011047"
    assert elapsed < 1.0, f"parse+lower took {elapsed:.3f}s"


# ---------------------------------------------------------------------------
@pytest.mark.criterion(2, C2)
def test_normalize_documented_cases():
    cases = [
        ('\\"u', RichText((Text("ü"),))),
        ("$\\protect \\frac  {x}{2}$", RichText((Math("\\frac{x}{2}"),))),
        ("A~B", RichText((Text("A B"),))),
        ("$\\alpha $", RichText((Math("\\alpha"),))),
        ("\\dag \\copyright \\pounds", RichText((Text("† © £"),))),
        ("\\DJ", RichText((Text("Đ"),))),
    ]
    for source, expected in cases:
        got, _ = normalize(source)
        assert got == expected, (source, got)


_GLYPH_MACROS = ["\\dag", "\\ss", "\\copyright", "\\pounds", "\\DJ", "\\aa",
                 "\\OE", "\\ldots", "\\LaTeX", "\\S", "\\th", "\\ng"]
_ACCENT_USES = ['\\"u', "\\'e", "\\`a", "\\^o", "\\~n", "\\c{c}", "\\v r",
                "\\H{o}", "\\k a", "\\=y", "\\.z", "\\u g", "\\r A", "\\d m"]
_ESCAPE_MACROS = ["\\%", "\\&", "\\#", "\\_", "\\$", "\\{", "\\}"]
_MATH_SNIPPETS = ["$x^2$", "$\\alpha $", "\\(\\epsilon\\)",
                  "$\\protect \\frac  {x}{2}$", "$a_i+b$"]
_NOISE = ["~", "\\protect ", "\\penalty 200 ", "\\penalty \\@M ",
          "\\unhbox \\voidb@x \\protect \\penalty \\@M \\ {}"]
_PLAIN = ["alpha beta", "x, y.", "Qz", "tea time", "0 1 2", ""]


def _sample_soup(rng: random.Random, depth: int = 0) -> str:
    parts = []
    for _ in range(rng.randint(1, 6)):
        kind = rng.randrange(9 if depth < 2 else 7)
        if kind == 0:
            parts.append(rng.choice(_PLAIN))
        elif kind == 1:
            parts.append(rng.choice(_GLYPH_MACROS) + " ")
        elif kind == 2:
            parts.append(rng.choice(_ACCENT_USES))
        elif kind == 3:
            parts.append("\\" + "".join(rng.choice("qwxyz") for _ in range(4)) + " ")
        elif kind == 4:
            parts.append(rng.choice(_ESCAPE_MACROS))
        elif kind == 5:
            parts.append(rng.choice(_MATH_SNIPPETS))
        elif kind == 6:
            parts.append(rng.choice(_NOISE))
        elif kind == 7:
            parts.append("{" + _sample_soup(rng, depth + 1) + "}")
        else:
            face = rng.choice(["\\textbf", "\\emph", "\\textit", "\\textsc"])
            parts.append(face + "{" + _sample_soup(rng, depth + 1) + "}")
    return "".join(parts)


@pytest.mark.criterion(2, C2)
def test_macro_soup_corpus_clean():
    rng = random.Random(0x5009)
    for case in range(500):
        source = _sample_soup(rng)
        rt, _ = normalize(source)
        for seg in rt.segments:
            if isinstance(seg, Text):
                assert "\\" not in seg.value, (case, source, seg)


# ---------------------------------------------------------------------------
@pytest.mark.criterion(3, C3)
def test_sample_orcids_validate():
    # both hand-checked against the MOD 11-2 recurrence before freezing
    assert validate_orcid("0000-0002-0599-0192") is True
    assert validate_orcid("0000-0001-7890-5430") is True


@pytest.mark.criterion(3, C3)
def test_thousand_orcids_every_mutation_detected():
    rng = random.Random(0xACC3)
    for _ in range(1_000):
        base = "".join(rng.choice("0123456789") for _ in range(15))
        digits = base + orcid_check_char_oracle(base)
        assert validate_orcid(dashed(digits)) is True
        for pos in range(16):
            pool = "0123456789X" if pos == 15 else "0123456789"
            for substitute in pool:
                if substitute == digits[pos]:
                    continue
                mutated = digits[:pos] + substitute + digits[pos + 1:]
                assert validate_orcid(dashed(mutated)) is False


@pytest.mark.criterion(3, C3)
def test_ten_thousand_bases_agree_with_enumeration_oracle():
    rng = random.Random(0xACC4)
    for _ in range(10_000):
        base = "".join(rng.choice("0123456789") for _ in range(15))
        expected = orcid_check_char_oracle(base)
        for candidate in "0123456789X":
            assert validate_orcid(dashed(base + candidate)) is (candidate == expected)


# ---------------------------------------------------------------------------
@pytest.mark.criterion(4, C4)
def test_json_round_trip_thousand():
    rng = random.Random(0x4A50)
    for case in range(1_000):
        pm = random_paper_meta(rng)
        assert parse_json(emit_json(pm)) == pm, case


@pytest.mark.criterion(4, C4)
def test_meta_round_trip_thousand():
    rng = random.Random(0x4A51)
    for case in range(1_000):
        doc = random_meta_document(rng)
        parsed, diags = parse_meta(serialize_meta(doc))
        assert diags == [], (case, diags)
        assert parsed == doc, case


@pytest.mark.criterion(4, C4)
@given(pm=paper_metas())
@settings(max_examples=100, deadline=None)
def test_json_round_trip_shrinking_search(pm):
    assert parse_json(emit_json(pm)) == pm


@pytest.mark.criterion(4, C4)
@given(doc=meta_documents())
@settings(max_examples=100, deadline=None)
def test_meta_round_trip_shrinking_search(doc):
    parsed, diags = parse_meta(serialize_meta(doc))
    assert diags == []
    assert parsed == doc


# ---------------------------------------------------------------------------
@pytest.mark.criterion(5, C5)
@pytest.mark.parametrize("name", EMIT_FIXTURES)
def test_schema_validity_per_fixture(name, emit_cfg):
    pm = load_pm(name)
    assert validate_crossref(emit_crossref(pm, emit_cfg)) == []
    assert validate_jats(emit_jats(pm, emit_cfg)) == []
    ET.fromstring(emit_xmp(pm))


@pytest.mark.criterion(5, C5)
@given(pm_and_title=hostile_models())
@settings(max_examples=100, deadline=None)
def test_fuzzed_fields_survive_parse_back(emit_cfg, pm_and_title):
    pm, _ = pm_and_title
    json.loads(emit_json(pm))
    for xml_text in (emit_crossref(pm, emit_cfg), emit_jats(pm, emit_cfg), emit_xmp(pm)):
        ET.fromstring(xml_text)


# ---------------------------------------------------------------------------
@pytest.mark.criterion(6, C6)
@pytest.mark.parametrize("name", EMIT_FIXTURES)
def test_cross_format_consistency(name, emit_cfg):
    pm = load_pm(name)
    views = [
        extract_json(emit_json(pm)),
        extract_crossref(emit_crossref(pm, emit_cfg)),
        extract_jats(emit_jats(pm, emit_cfg)),
        extract_xmp(emit_xmp(pm)),
    ]
    assert views[1] == views[0]
    assert views[2] == views[0]
    assert views[3] == views[0]


# ---------------------------------------------------------------------------
@pytest.mark.criterion(7, C7)
@pytest.mark.parametrize("name", EMIT_FIXTURES)
def test_emit_all_reruns_byte_identical(name, tmp_path):
    meta = tmp_path / f"{name}.meta"
    meta.write_bytes(fixture_path(name).read_bytes())
    from pubmeta.cli import main
    snapshots = []
    for _ in range(2):
        assert main(["emit", str(meta), "--all", "--config", CFG]) == 0
        snapshots.append({
            suffix: (tmp_path / f"{name}{suffix}").read_bytes()
            for suffix in (".json", ".xml", ".jats.xml", ".xmp")
        })
    assert snapshots[0] == snapshots[1]


@pytest.mark.criterion(7, C7)
def test_emit_all_subprocess_rerun(tmp_path):
    meta = tmp_path / "art.meta"
    meta.write_bytes(fixture_path("emojex_pub").read_bytes())
    rounds = []
    for _ in range(2):
        proc = subprocess.run(
            [sys.executable, "-m", "pubmeta.cli", "emit", str(meta), "--all",
             "--config", CFG],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        rounds.append({
            suffix: (tmp_path / f"art{suffix}").read_bytes()
            for suffix in (".json", ".xml", ".jats.xml", ".xmp")
        })
    assert rounds[0] == rounds[1]
