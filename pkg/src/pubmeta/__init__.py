"""pubmeta: article metadata from a LaTeX run's .meta file to publishing formats."""

from .diagnostics import Diagnostic, CodedError
from .emitters import EmitConfig, emit_crossref, emit_jats, emit_json, emit_xmp, parse_json
from .metafile import MetaDocument, Record, lower_to_paper_meta, parse_meta, serialize_meta
from .model import (
    Affiliation,
    Author,
    Citation,
    Funding,
    Identifier,
    PaperMeta,
    TitleGroup,
    check_identifiers,
    check_relationships,
    derive_doi,
    validate_doi,
    validate_orcid,
    validate_ror,
)
from .textex import Math, NormalizeReport, RichText, Text, expand_accent, expand_glyph, normalize, to_plain

__version__ = "0.1.0"

__all__ = [
    "Affiliation", "Author", "Citation", "CodedError", "Diagnostic",
    "EmitConfig", "Funding", "Identifier", "Math", "MetaDocument",
    "NormalizeReport", "PaperMeta", "Record", "RichText", "Text",
    "TitleGroup", "check_identifiers", "check_relationships", "derive_doi",
    "emit_crossref", "emit_jats", "emit_json", "emit_xmp", "expand_accent",
    "expand_glyph", "lower_to_paper_meta", "normalize", "parse_json",
    "parse_meta", "serialize_meta", "to_plain", "validate_doi",
    "validate_orcid", "validate_ror", "__version__",
]
