"""Parse the line-oriented ``.meta`` file written during a LaTeX run.

Grammar (fixed here, designed to be trivially writable one line at a time):

* a column-0 line ``kind:`` opens a record; kind is one of ``meta``,
  ``author``, ``affiliation``, ``funding``, ``citation``;
* subsequent lines indented exactly two spaces, ``key: value``, attach
  fields to the open record; the value runs to end of line and may contain
  TeX residue;
* blank lines are ignored; the first record must be ``meta:`` (the header);
* UTF-8 only, LF line endings (a trailing CR per line is tolerated), no BOM;
* one logical line per value: multiline values are not supported.

Unknown keys warn (W-UNKNOWNKEY) but are preserved, so newer producers keep
working against older consumers.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass, field as dc_field

from . import textex
from .diagnostics import Diagnostic, error, warning
from .model import (
    Affiliation,
    Author,
    Citation,
    CitationAuthor,
    Dates,
    Funding,
    Identifier,
    PaperMeta,
    TitleGroup,
)

HEADER = "header"
KINDS = ("meta", "author", "affiliation", "funding", "citation")

_KIND_LINE = re.compile(r"([a-z_][a-z0-9_]*):\s*$")
_FIELD_LINE = re.compile(r"([a-z_][a-z0-9_]*):(.*)$")

KNOWN_KEYS = {
    HEADER: {
        "title", "plaintext", "subtitle", "running", "onclick", "abstract",
        "keywords", "license", "doi", "received", "accepted", "published",
    },
    "author": {
        "name", "surname", "orcid", "email", "inst", "footnote", "onclick",
        "corresponding", "role",
    },
    "affiliation": {"name", "ror", "department", "street", "city", "country"},
    "funding": {"name", "fundref", "crossref", "grantid", "country"},
    "citation": {
        "key", "type", "authors", "title", "year", "venue", "volume",
        "number", "pages", "doi", "url", "raw",
    },
}


@dataclass
class Record:
    kind: str
    fields: list[tuple[str, str]] = dc_field(default_factory=list)
    line: int = dc_field(default=0, compare=False)

    def get(self, key: str) -> str | None:
        for k, v in self.fields:
            if k == key:
                return v
        return None

    def keys(self) -> list[str]:
        return [k for k, _ in self.fields]


@dataclass
class MetaDocument:
    records: list[Record] = dc_field(default_factory=list)
    source_name: str = dc_field(default="<meta>", compare=False)

    @property
    def header(self) -> Record | None:
        for rec in self.records:
            if rec.kind == HEADER:
                return rec
        return None

    def of_kind(self, kind: str) -> list[Record]:
        return [r for r in self.records if r.kind == kind]


def parse_meta(text: str | bytes, source_name: str = "<meta>") -> tuple[MetaDocument, list[Diagnostic]]:
    """Parse .meta text.  Total: any input yields a document plus diagnostics."""
    diags: list[Diagnostic] = []
    doc = MetaDocument(records=[], source_name=source_name)
    if isinstance(text, bytes):
        if text.startswith(b"\xef\xbb\xbf"):
            diags.append(error("E-ENCODING", "byte order mark not allowed", 1))
            return doc, diags
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            diags.append(error("E-ENCODING", f"not UTF-8: {exc}", 1))
            return doc, diags
    if text.startswith("\ufeff"):
        diags.append(error("E-ENCODING", "byte order mark not allowed", 1))
        return doc, diags

    current: Record | None = None
    seen_keys: set[str] = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        if raw.endswith("\r"):
            raw = raw[:-1]
        if not raw.strip():
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        if indent == 0:
            if raw[0] in "\t":
                diags.append(error("E-BADINDENT", "tab indentation not allowed", lineno))
                continue
            m = _KIND_LINE.fullmatch(raw)
            if not m or m.group(1) not in KINDS:
                diags.append(error(
                    "E-BADKIND",
                    f"expected one of {', '.join(k + ':' for k in KINDS)}",
                    lineno,
                ))
                current = None
                continue
            kind = HEADER if m.group(1) == "meta" else m.group(1)
            if not doc.records and kind != HEADER:
                diags.append(error("E-NOHEADER", "first record must be meta:", lineno))
            if kind == HEADER and doc.header is not None:
                diags.append(error("E-DUPHEADER", "second meta: record", lineno))
            current = Record(kind=kind, fields=[], line=lineno)
            seen_keys = set()
            doc.records.append(current)
        elif indent == 2:
            m = _FIELD_LINE.fullmatch(raw[2:])
            if not m:
                diags.append(error("E-BADFIELD", "expected `key: value`", lineno))
                continue
            key, value = m.group(1), m.group(2)
            if value.startswith(" "):
                value = value[1:]
            if current is None:
                diags.append(error("E-ORPHANFIELD", f"field {key!r} before any record", lineno))
                continue
            if key in seen_keys:
                diags.append(error("E-DUPKEY", f"duplicate key {key!r}", lineno))
                continue
            seen_keys.add(key)
            if key not in KNOWN_KEYS[current.kind]:
                shown = "meta" if current.kind == HEADER else current.kind
                diags.append(warning("W-UNKNOWNKEY", f"unknown key {key!r} in {shown} record", lineno))
            current.fields.append((key, value))
        else:
            diags.append(error("E-BADINDENT", f"indent is {indent} spaces, expected 0 or 2", lineno))
    if not doc.records:
        diags.append(error("E-NOHEADER", "empty document has no meta: header", 1))
    return doc, diags


def serialize_meta(doc: MetaDocument) -> str:
    """Inverse writer for parse_meta (round-trips diagnostic-free documents)."""
    lines: list[str] = []
    for rec in doc.records:
        lines.append(("meta" if rec.kind == HEADER else rec.kind) + ":")
        for key, value in rec.fields:
            lines.append(f"  {key}: {value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# lowering to the article model

# keys taken verbatim: identifiers, URLs, addresses of machines, not prose
_VERBATIM = {"orcid", "email", "onclick", "ror", "fundref", "crossref", "grantid",
             "doi", "url", "inst", "corresponding", "role", "key", "type",
             "received", "accepted", "published", "year", "volume", "number", "pages"}


class _Lower:
    def __init__(self, doc: MetaDocument):
        self.doc = doc
        self.diags: list[Diagnostic] = []
        self.extras: dict[str, str] = {}

    def rich(self, rec: Record, key: str) -> textex.RichText | None:
        value = rec.get(key)
        if value is None:
            return None
        try:
            rt, report = textex.normalize(value)
        except textex.NormalizeError as exc:
            self.diags.append(error(exc.code, f"{key}: {exc.message}", rec.line))
            return textex.RichText()
        for w in report.warnings:
            self.diags.append(warning(w.code, f"{key}: {w.message}", rec.line))
        return rt

    def plain(self, rec: Record, key: str) -> str | None:
        rt = self.rich(rec, key)
        return None if rt is None else textex.to_plain(rt)

    def verbatim(self, rec: Record, key: str) -> str | None:
        value = rec.get(key)
        return None if value is None else value.strip()

    def date(self, rec: Record, key: str) -> datetime.date | None:
        value = self.verbatim(rec, key)
        if value is None:
            return None
        try:
            return datetime.date.fromisoformat(value)
        except ValueError:
            self.diags.append(error("E-BADDATE", f"{key}: {value!r} is not YYYY-MM-DD", rec.line))
            return None

    def collect_extras(self, rec: Record, prefix: str) -> None:
        for key, value in rec.fields:
            if key not in KNOWN_KEYS[rec.kind]:
                name = key if rec.kind == HEADER else f"{prefix}.{key}"
                self.extras[name] = value


def lower_to_paper_meta(doc: MetaDocument) -> tuple[PaperMeta, list[Diagnostic]]:
    """Map a parsed (error-free) document onto the article model.

    Text values of prose fields go through TeX normalization; identifier and
    URL fields are taken verbatim. Affiliations are numbered in order of
    appearance from 1; `inst` lists like ``1,2`` become those indices.
    """
    lo = _Lower(doc)
    header = doc.header or Record(kind=HEADER, fields=[], line=1)

    title_main = lo.rich(header, "title")
    if title_main is None:
        lo.diags.append(error("E-MISSINGTITLE", "header has no title", header.line))
        title_main = textex.RichText()
    plaintext = lo.plain(header, "plaintext")
    if plaintext is not None and "\\" in plaintext:
        lo.diags.append(warning(
            "W-BADVALUE", "plaintext should carry no TeX at all", header.line))
    title = TitleGroup(
        main=title_main,
        plaintext=plaintext,
        subtitle=lo.rich(header, "subtitle"),
        running=lo.plain(header, "running"),
        onclick=lo.verbatim(header, "onclick"),
    )
    lo.collect_extras(header, "meta")

    affiliations: list[Affiliation] = []
    for rec in doc.of_kind("affiliation"):
        index = len(affiliations) + 1
        name = lo.plain(rec, "name")
        if not name:
            lo.diags.append(error("E-MISSINGNAME", "affiliation has no name", rec.line))
            name = ""
        ror = lo.verbatim(rec, "ror")
        affiliations.append(Affiliation(
            index=index,
            name=name,
            ror=Identifier("ror", ror) if ror else None,
            department=lo.plain(rec, "department"),
            street=lo.plain(rec, "street"),
            city=lo.plain(rec, "city"),
            country=lo.plain(rec, "country"),
        ))
        lo.collect_extras(rec, f"affiliation.{index}")

    authors: list[Author] = []
    for ordinal, rec in enumerate(doc.of_kind("author"), start=1):
        name = lo.plain(rec, "name")
        if not name:
            lo.diags.append(error("E-MISSINGNAME", f"author {ordinal} has no name", rec.line))
            name = ""
        orcid = lo.verbatim(rec, "orcid")
        authors.append(Author(
            name=name,
            surname=lo.plain(rec, "surname"),
            orcid=Identifier("orcid", orcid) if orcid else None,
            email=lo.verbatim(rec, "email"),
            affiliations=_parse_inst(rec, len(affiliations), lo),
            footnote=lo.rich(rec, "footnote"),
            onclick=lo.verbatim(rec, "onclick"),
            corresponding=_parse_flag(rec, "corresponding", lo),
            roles=_parse_list(rec.get("role")),
        ))
        lo.collect_extras(rec, f"author.{ordinal}")

    funders: list[Funding] = []
    for ordinal, rec in enumerate(doc.of_kind("funding"), start=1):
        name = lo.plain(rec, "name")
        if not name:
            lo.diags.append(error("E-MISSINGNAME", f"funding {ordinal} has no name", rec.line))
            name = ""
        funder_id = lo.verbatim(rec, "fundref") or lo.verbatim(rec, "crossref")
        funders.append(Funding(
            name=name,
            funder_id=Identifier("fundref", funder_id) if funder_id else None,
            grantid=lo.verbatim(rec, "grantid"),
            country=lo.plain(rec, "country"),
        ))
        lo.collect_extras(rec, f"funding.{ordinal}")

    citations: list[Citation] = []
    for ordinal, rec in enumerate(doc.of_kind("citation"), start=1):
        citations.append(_lower_citation(rec, ordinal, lo))
        lo.collect_extras(rec, f"citation.{ordinal}")

    doi = lo.verbatim(header, "doi")
    keywords = [kw for kw in _parse_list(header.get("keywords"))]
    keywords = [_plain_string(kw, header, lo) for kw in keywords]
    pm = PaperMeta(
        title=title,
        authors=authors,
        affiliations=affiliations,
        funders=funders,
        citations=citations,
        abstract=lo.rich(header, "abstract"),
        keywords=[kw for kw in keywords if kw],
        doi=Identifier("doi", doi) if doi else None,
        license=lo.plain(header, "license"),
        dates=Dates(
            received=lo.date(header, "received"),
            accepted=lo.date(header, "accepted"),
            published=lo.date(header, "published"),
        ),
        extras=lo.extras,
    )
    return pm, lo.diags


def _plain_string(value: str, rec: Record, lo: _Lower) -> str:
    try:
        rt, _ = textex.normalize(value)
    except textex.NormalizeError as exc:
        lo.diags.append(error(exc.code, exc.message, rec.line))
        return ""
    return textex.to_plain(rt)


def _parse_inst(rec: Record, n_affiliations: int, lo: _Lower) -> list[int]:
    value = rec.get("inst")
    if value is None or not value.strip():
        return []
    out: list[int] = []
    for part in value.split(","):
        part = part.strip()
        try:
            idx = int(part)
        except ValueError:
            lo.diags.append(error("E-BADINST", f"inst entry {part!r} is not an integer", rec.line))
            continue
        if not 1 <= idx <= n_affiliations:
            lo.diags.append(error(
                "E-BADINST",
                f"inst {idx} out of range (document has {n_affiliations} affiliations)",
                rec.line,
            ))
            continue
        out.append(idx)
    return out


def _parse_flag(rec: Record, key: str, lo: _Lower) -> bool:
    value = rec.get(key)
    if value is None:
        return False
    folded = value.strip().lower()
    if folded in ("yes", "true", "1"):
        return True
    if folded in ("no", "false", "0", ""):
        return False
    lo.diags.append(warning("W-BADVALUE", f"{key}: {value!r} treated as false", rec.line))
    return False


def _parse_list(value: str | None) -> list[str]:
    if not value:
        return []
    return [part.strip() for part in value.split(",") if part.strip()]


def _lower_citation(rec: Record, ordinal: int, lo: _Lower) -> Citation:
    key = lo.verbatim(rec, "key") or f"ref{ordinal}"
    year_raw = lo.verbatim(rec, "year")
    year = None
    if year_raw:
        try:
            year = int(year_raw)
        except ValueError:
            lo.diags.append(warning("W-BADVALUE", f"year: {year_raw!r} ignored", rec.line))
    doi = lo.verbatim(rec, "doi")
    names: list[CitationAuthor] = []
    for chunk in (rec.get("authors") or "").split(" and "):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "," in chunk:
            surname, _, given = chunk.partition(",")
            surname = _plain_string(surname.strip(), rec, lo)
            given = _plain_string(given.strip(), rec, lo)
            display = f"{given} {surname}".strip()
            names.append(CitationAuthor(name=display, surname=surname))
        else:
            names.append(CitationAuthor(name=_plain_string(chunk, rec, lo)))
    return Citation(
        key=key,
        entry_type=lo.verbatim(rec, "type") or "misc",
        authors=names,
        title=lo.rich(rec, "title"),
        year=year,
        venue=lo.plain(rec, "venue"),
        volume=lo.verbatim(rec, "volume"),
        number=lo.verbatim(rec, "number"),
        pages=lo.verbatim(rec, "pages"),
        doi=Identifier("doi", doi) if doi else None,
        url=lo.verbatim(rec, "url"),
        raw=rec.get("raw"),
    )
