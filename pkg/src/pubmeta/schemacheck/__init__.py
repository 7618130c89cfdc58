"""Offline schema validation against the vendored subset schemas.

These checks run with no network and no compiled XML stack: a DTD validator
for the JATS publishing subset and an XSD-subset validator for the Crossref
deposit schema.  They are deliberately independent of the emitters so a
structural regression in one cannot hide in the other.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .dtd import Dtd, read_xml_literal
from .xsd import Schema

CROSSREF_NS = "http://www.crossref.org/schema/5.3.1"


def _read(name: str) -> str:
    return resources.files("pubmeta").joinpath("schemas", name).read_text("utf-8")


@lru_cache(maxsize=1)
def crossref_schema() -> Schema:
    return Schema.load(
        _read("crossref_deposit_5.3.1_subset.xsd"),
        _read("fundref_subset.xsd"),
        _read("accessindicators_subset.xsd"),
    )


@lru_cache(maxsize=1)
def jats_dtd() -> Dtd:
    return Dtd.parse(_read("jats_publishing_1.3_subset.dtd"))


def validate_crossref(xml_text: str) -> list[str]:
    """Empty list = valid against the vendored Crossref deposit subset."""
    return crossref_schema().validate(xml_text, expected_root=(CROSSREF_NS, "doi_batch"))


def validate_jats(xml_text: str) -> list[str]:
    """Empty list = valid against the vendored JATS publishing subset DTD."""
    try:
        root = read_xml_literal(xml_text)
    except Exception as exc:  # expat raises ExpatError; report, don't crash
        return [f"not well-formed: {exc}"]
    return jats_dtd().validate(root, expected_root="article")
