"""Machine-readable findings (errors and warnings) with source locations.

Every diagnostic carries a stable code from CATALOG below.  Codes starting
with ``E-`` are errors that make the input unusable for publication; ``W-``
codes are advisories that a pipeline may promote to errors (``--strict``).
"""

from __future__ import annotations

from dataclasses import dataclass

ERROR = "error"
WARNING = "warning"

# The documented code catalog.  Tests assert that nothing outside this table
# is ever emitted.
CATALOG = {
    # .meta grammar
    "E-ENCODING": "input is not clean UTF-8 (undecodable bytes or a leading BOM)",
    "E-NOHEADER": "first record is not the `meta:` header",
    "E-DUPHEADER": "more than one `meta:` header record",
    "E-BADKIND": "top-level line does not open a known record kind",
    "E-BADINDENT": "indentation is not 0 or exactly 2 spaces",
    "E-BADFIELD": "indented line is not of the form `key: value`",
    "E-ORPHANFIELD": "field line appears before any record was opened",
    "E-DUPKEY": "duplicate key within one record",
    "W-UNKNOWNKEY": "key not recognized for this record kind; preserved in extras",
    # lowering to the article model
    "E-BADINST": "affiliation reference is not an integer within range",
    "E-MISSINGNAME": "record that requires a name has none",
    "E-MISSINGTITLE": "header record has no title",
    "E-BADDATE": "date is not an ISO-8601 calendar date",
    "W-BADVALUE": "value not understood for this key; a default was used",
    # TeX text normalization
    "E-UNBALANCED": "unbalanced braces or math delimiters",
    "E-BADUTF8": "byte input is not valid UTF-8",
    "E-UNSUPPORTED-ACCENT": "control sequence is not a known accent",
    "E-UNKNOWN-GLYPH": "control sequence is not in the glyph table",
    "W-DROPPED-MACRO": "unknown macro was erased from a text field",
    # relationship and identifier checks
    "W-NOAUTHORS": "article has no authors",
    "W-UNREFERENCED-AFFIL": "affiliation is cited by no author",
    "E-DUPORCID": "two authors share one ORCID",
    "E-DUPCITEKEY": "two citations share one key",
    "W-MULTICORRESPONDING": "more than one corresponding author",
    "E-BADORCID": "ORCID fails syntax or its MOD 11-2 check digit",
    "E-BADROR": "ROR id fails syntax or its MOD 97-10 checksum",
    "E-BADDOI": "DOI does not match 10.<prefix>/<suffix>",
    "E-BADFUNDERID": "funder id is not all digits",
    "W-BADEMAIL": "email address does not look like user@host.tld",
    "W-BADURL": "URL does not start with http:// or https://",
    # DOI derivation
    "E-BADPREFIX": "DOI prefix does not match 10.<4-9 digits>",
    "E-BADPAPERID": "paper id contains characters outside [a-z0-9.-]",
    # emitters
    "E-UNVALIDATED": "emit called while relationship errors are outstanding",
    "E-NODOI": "Crossref deposit requested but the article has no DOI",
    "E-NODATE": "Crossref deposit requested but no published date is set",
    "E-NOLANDING": "Crossref deposit requested but no landing_url configured",
    "E-NOCONFIG": "required journal configuration value is missing",
    "E-JSONSCHEMA": "JSON document does not match the canonical schema",
    # registry lookups
    "E-NETWORK": "registry endpoint unreachable",
    "E-NOTFOUND": "identifier not present in its registry",
    "W-NETWORK": "registry endpoint unreachable (lookup skipped)",
    "W-NOTFOUND": "identifier not present in its registry",
    "W-NAMEMISMATCH": "display name differs from the registry's canonical name",
    "W-WITHDRAWN": "identifier is marked withdrawn in its registry",
    # command line
    "E-IO": "file could not be read or written",
    "W-UNKNOWNCONFIG": "configuration key not recognized",
}


@dataclass(frozen=True)
class Diagnostic:
    """One finding.  ``line`` is None for findings not tied to a source line."""

    severity: str
    code: str
    message: str
    line: int | None = None

    def __post_init__(self):
        if self.code not in CATALOG:
            raise ValueError(f"undocumented diagnostic code {self.code!r}")

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def format(self) -> str:
        """Render as the one-line machine format ``severity:code:line:message``."""
        return f"{self.severity}:{self.code}:{self.line or 0}:{self.message}"


def error(code: str, message: str, line: int | None = None) -> Diagnostic:
    return Diagnostic(ERROR, code, message, line)


def warning(code: str, message: str, line: int | None = None) -> Diagnostic:
    return Diagnostic(WARNING, code, message, line)


def has_errors(diags) -> bool:
    return any(d.is_error for d in diags)


class CodedError(Exception):
    """Exception carrying a diagnostic code from CATALOG."""

    def __init__(self, code: str, message: str, line: int | None = None):
        if code not in CATALOG:
            raise ValueError(f"undocumented diagnostic code {code!r}")
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.line = line

    def as_diagnostic(self) -> Diagnostic:
        return Diagnostic(ERROR, self.code, self.message, self.line)
