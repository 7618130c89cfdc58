"""The schema validators must actually reject broken documents, or the
schema-validity tests elsewhere prove nothing."""

import pytest

from pubmeta.emitters import emit_crossref, emit_jats
from pubmeta.schemacheck import validate_crossref, validate_jats
from pubmeta.schemacheck.dtd import Dtd, read_xml_literal

from conftest import load_pm


@pytest.fixture(scope="module")
def crossref_doc(emit_cfg_module):
    return emit_crossref(load_pm("emojex_pub"), emit_cfg_module)


@pytest.fixture(scope="module")
def jats_doc(emit_cfg_module):
    return emit_jats(load_pm("emojex_pub"), emit_cfg_module)


@pytest.fixture(scope="module")
def emit_cfg_module():
    from pathlib import Path

    from pubmeta.cli import _build_emit_config, _read_config
    values, _ = _read_config(str(Path(__file__).parent / "fixtures" / "journal.cfg"))
    return _build_emit_config(values)


class TestCrossrefValidatorRejects:
    def test_baseline_valid(self, crossref_doc):
        assert validate_crossref(crossref_doc) == []

    def test_reordered_head(self, crossref_doc):
        broken = crossref_doc.replace(
            "<doi_batch_id>10.62056/a1b2c3-202401150000</doi_batch_id>\n    <timestamp>202401150000</timestamp>",
            "<timestamp>202401150000</timestamp>\n    <doi_batch_id>10.62056/a1b2c3-202401150000</doi_batch_id>")
        assert broken != crossref_doc
        assert any("content model" in e for e in validate_crossref(broken))

    def test_unknown_element(self, crossref_doc):
        broken = crossref_doc.replace("<registrant>", "<registrar>x</registrar><registrant>")
        assert validate_crossref(broken)

    def test_missing_required_attribute(self, crossref_doc):
        broken = crossref_doc.replace(' sequence="first"', "")
        assert any("sequence" in e for e in validate_crossref(broken))

    def test_enum_violation(self, crossref_doc):
        broken = crossref_doc.replace('sequence="first"', 'sequence="primary"')
        assert any("primary" in e for e in validate_crossref(broken))

    def test_missing_doi_data(self, crossref_doc):
        start = crossref_doc.index("<doi_data>")
        end = crossref_doc.index("</doi_data>") + len("</doi_data>")
        broken = crossref_doc[:start] + crossref_doc[end:]
        assert any("content model" in e for e in validate_crossref(broken))

    def test_surname_before_given_name(self, crossref_doc):
        broken = crossref_doc.replace(
            "<given_name>Fester</given_name>\n            <surname>Bestertester</surname>",
            "<surname>Bestertester</surname>\n            <given_name>Fester</given_name>")
        assert broken != crossref_doc
        assert any("content model" in e for e in validate_crossref(broken))

    def test_wrong_root_namespace(self, crossref_doc):
        broken = crossref_doc.replace("http://www.crossref.org/schema/5.3.1",
                                      "http://www.crossref.org/schema/4.4.2")
        assert validate_crossref(broken)

    def test_not_wellformed(self):
        assert validate_crossref("<doi_batch>")


class TestJatsValidatorRejects:
    def test_baseline_valid(self, jats_doc):
        assert validate_jats(jats_doc) == []

    def test_unknown_element(self, jats_doc):
        broken = jats_doc.replace("<front>", "<front><colophon>x</colophon>")
        assert any("colophon" in e for e in validate_jats(broken))

    def test_reordered_front_matter(self, jats_doc):
        broken = jats_doc.replace(
            "<volume>1</volume>\n      <issue>2</issue>",
            "<issue>2</issue>\n      <volume>1</volume>")
        assert broken != jats_doc
        assert any("content model" in e for e in validate_jats(broken))

    def test_given_names_before_surname(self, jats_doc):
        broken = jats_doc.replace(
            "<name><surname>Bestertester</surname><given-names>Fester</given-names></name>",
            "<name><given-names>Fester</given-names><surname>Bestertester</surname></name>")
        assert broken != jats_doc
        assert any("content model" in e for e in validate_jats(broken))

    def test_enum_attribute(self, jats_doc):
        broken = jats_doc.replace('corresp="yes"', 'corresp="maybe"')
        assert any("maybe" in e for e in validate_jats(broken))

    def test_text_in_element_only_content(self, jats_doc):
        broken = jats_doc.replace("<history>", "<history>loose words")
        assert any("text not allowed" in e for e in validate_jats(broken))

    def test_pcdata_element_with_children(self, jats_doc):
        broken = jats_doc.replace("<surname>Bestertester</surname>",
                                  "<surname><b>B</b></surname>")
        assert validate_jats(broken)

    def test_not_wellformed(self):
        assert validate_jats("<article><front>")


class TestDtdMachinery:
    DTD = """
    <!ELEMENT root (a, b?, (c | d)*)>
    <!ELEMENT a (#PCDATA)>
    <!ELEMENT b EMPTY>
    <!ELEMENT c (#PCDATA | a)*>
    <!ELEMENT d (#PCDATA)>
    <!ATTLIST root kind (x | y) #REQUIRED>
    <!ATTLIST a lang CDATA #IMPLIED>
    """

    def parse(self, xml):
        return Dtd.parse(self.DTD).validate(read_xml_literal(xml), expected_root="root")

    def test_valid(self):
        assert self.parse('<root kind="x"><a>t</a><b/><c>m<a>n</a></c><d>q</d></root>') == []

    def test_sequence_order(self):
        assert self.parse('<root kind="x"><b/><a>t</a></root>')

    def test_optional_skipped(self):
        assert self.parse('<root kind="x"><a>t</a><d>q</d></root>') == []

    def test_required_attr(self):
        assert any("kind" in e for e in self.parse("<root><a>t</a></root>"))

    def test_enum_attr(self):
        assert self.parse('<root kind="z"><a>t</a></root>')

    def test_empty_element_content(self):
        assert self.parse('<root kind="x"><a>t</a><b>text</b></root>')

    def test_mixed_allows_declared_children_only(self):
        assert self.parse('<root kind="x"><a>t</a><c><d>no</d></c></root>')
