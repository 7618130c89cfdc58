"""The article data model: one record per entity, relations by index.

Authors reference affiliations by 1-based position instead of repeating
them, and funders attach to the article.  Identifiers are (namespace,
value) pairs so one entity can carry ids from several registries.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass, field

from .diagnostics import Diagnostic, CodedError, error, warning
from .textex import RichText

NAMESPACES = ("doi", "orcid", "ror", "fundref", "arxiv")


@dataclass(frozen=True)
class Identifier:
    namespace: str  # doi | orcid | ror | fundref | arxiv | any custom name
    value: str


@dataclass
class TitleGroup:
    main: RichText
    plaintext: str | None = None
    subtitle: RichText | None = None
    running: str | None = None
    onclick: str | None = None


@dataclass
class Author:
    name: str
    surname: str | None = None
    orcid: Identifier | None = None
    email: str | None = None
    affiliations: list[int] = field(default_factory=list)
    footnote: RichText | None = None
    onclick: str | None = None
    corresponding: bool = False
    roles: list[str] = field(default_factory=list)


@dataclass
class Affiliation:
    index: int
    name: str
    ror: Identifier | None = None
    department: str | None = None
    street: str | None = None
    city: str | None = None
    country: str | None = None


@dataclass
class Funding:
    name: str
    funder_id: Identifier | None = None  # namespace fundref, digits only
    grantid: str | None = None
    country: str | None = None


@dataclass
class CitationAuthor:
    name: str
    surname: str | None = None


@dataclass
class Citation:
    key: str
    entry_type: str = "misc"
    authors: list[CitationAuthor] = field(default_factory=list)
    title: RichText | None = None
    year: int | None = None
    venue: str | None = None
    volume: str | None = None
    number: str | None = None
    pages: str | None = None
    doi: Identifier | None = None
    url: str | None = None
    raw: str | None = None


@dataclass
class Dates:
    received: datetime.date | None = None
    accepted: datetime.date | None = None
    published: datetime.date | None = None


@dataclass
class PaperMeta:
    title: TitleGroup
    authors: list[Author] = field(default_factory=list)
    affiliations: list[Affiliation] = field(default_factory=list)
    funders: list[Funding] = field(default_factory=list)
    citations: list[Citation] = field(default_factory=list)
    abstract: RichText | None = None
    keywords: list[str] = field(default_factory=list)
    doi: Identifier | None = None
    license: str | None = None
    dates: Dates = field(default_factory=Dates)
    extras: dict[str, str] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# identifier validators

_ORCID_RE = re.compile(r"\d{4}-\d{4}-\d{4}-\d{3}[\dX]")
_ROR_RE = re.compile(r"0[0-9a-hjkmnp-tv-z]{6}[0-9]{2}")
_DOI_RE = re.compile(r"10\.\d{4,9}/\S+")
_ARXIV_RE = re.compile(r"\d{4}\.\d{4,5}(v\d+)?")
_PREFIX_RE = re.compile(r"10\.\d{4,9}")
_PAPERID_RE = re.compile(r"[a-z0-9][a-z0-9.-]*")

_CROCKFORD = "0123456789abcdefghjkmnpqrstvwxyz"


def validate_orcid(value: str) -> bool:
    """ISO 7064 MOD 11-2 check over the 15 digits, X allowed as check char."""
    if not _ORCID_RE.fullmatch(value):
        return False
    digits = value.replace("-", "")
    total = 0
    for ch in digits[:15]:
        total = (total + int(ch)) * 2
    check = (12 - total % 11) % 11
    expected = "X" if check == 10 else str(check)
    return digits[15] == expected


def validate_ror(value: str) -> bool:
    """Leading 0, six Crockford base32 chars, two-digit MOD 97-10 checksum."""
    if not _ROR_RE.fullmatch(value):
        return False
    n = 0
    for ch in value[:7]:
        n = n * 32 + _CROCKFORD.index(ch)
    return int(value[7:]) == 98 - (n * 100) % 97


def validate_doi(value: str) -> bool:
    return bool(_DOI_RE.fullmatch(value))


def validate_funder_id(value: str) -> bool:
    return value.isdigit()


def validate_arxiv(value: str) -> bool:
    return bool(_ARXIV_RE.fullmatch(value))


VALIDATORS = {
    "orcid": validate_orcid,
    "ror": validate_ror,
    "doi": validate_doi,
    "fundref": validate_funder_id,
    "arxiv": validate_arxiv,
}


def valid_identifier(ident: Identifier) -> bool:
    """Check an identifier against its namespace's syntax rule (custom: any)."""
    check = VALIDATORS.get(ident.namespace)
    return True if check is None else check(ident.value)


def derive_doi(prefix: str, paperid: str) -> Identifier:
    """Build the article DOI as prefix/paperid; deterministic and injective."""
    if not _PREFIX_RE.fullmatch(prefix):
        raise CodedError("E-BADPREFIX", f"{prefix!r} is not a DOI prefix")
    if not _PAPERID_RE.fullmatch(paperid):
        raise CodedError("E-BADPAPERID", f"{paperid!r} is not a valid paper id")
    return Identifier("doi", f"{prefix}/{paperid}")


# ---------------------------------------------------------------------------
# whole-model checks

def check_relationships(pm: PaperMeta) -> list[Diagnostic]:
    """Verify the entity graph; findings are returned, never raised."""
    diags: list[Diagnostic] = []
    n = len(pm.affiliations)
    referenced: set[int] = set()
    for pos, author in enumerate(pm.authors, start=1):
        for idx in author.affiliations:
            if not 1 <= idx <= n:
                diags.append(error(
                    "E-BADINST", f"author {pos} references affiliation {idx} of {n}"))
            else:
                referenced.add(idx)
    for aff in pm.affiliations:
        if aff.index not in referenced:
            diags.append(warning(
                "W-UNREFERENCED-AFFIL", f"affiliation {aff.index} ({aff.name}) cited by no author"))
    if not pm.authors:
        diags.append(warning("W-NOAUTHORS", "article has no authors"))
    seen_orcid: dict[str, int] = {}
    for pos, author in enumerate(pm.authors, start=1):
        if author.orcid is None:
            continue
        first = seen_orcid.setdefault(author.orcid.value, pos)
        if first != pos:
            diags.append(error(
                "E-DUPORCID", f"authors {first} and {pos} share ORCID {author.orcid.value}"))
    seen_keys: dict[str, int] = {}
    for pos, cit in enumerate(pm.citations, start=1):
        first = seen_keys.setdefault(cit.key, pos)
        if first != pos:
            diags.append(error(
                "E-DUPCITEKEY", f"citations {first} and {pos} share key {cit.key!r}"))
    if sum(1 for a in pm.authors if a.corresponding) > 1:
        diags.append(warning("W-MULTICORRESPONDING", "more than one corresponding author"))
    return diags


_EMAIL_RE = re.compile(r"[^@\s]+@[^@\s]+\.[^@\s]+")


def check_identifiers(pm: PaperMeta) -> list[Diagnostic]:
    """Syntax/checksum findings for every identifier, email and URL."""
    diags: list[Diagnostic] = []
    if pm.doi is not None and not validate_doi(pm.doi.value):
        diags.append(error("E-BADDOI", f"article DOI {pm.doi.value!r}"))
    for pos, author in enumerate(pm.authors, start=1):
        if author.orcid is not None and not validate_orcid(author.orcid.value):
            diags.append(error("E-BADORCID", f"author {pos}: {author.orcid.value!r}"))
        if author.email is not None and not _EMAIL_RE.fullmatch(author.email):
            diags.append(warning("W-BADEMAIL", f"author {pos}: {author.email!r}"))
        if author.onclick is not None and not author.onclick.startswith(("http://", "https://")):
            diags.append(warning("W-BADURL", f"author {pos}: {author.onclick!r}"))
    for aff in pm.affiliations:
        if aff.ror is not None and not validate_ror(aff.ror.value):
            diags.append(error("E-BADROR", f"affiliation {aff.index}: {aff.ror.value!r}"))
    for pos, funder in enumerate(pm.funders, start=1):
        if funder.funder_id is not None and not validate_funder_id(funder.funder_id.value):
            diags.append(error("E-BADFUNDERID", f"funder {pos}: {funder.funder_id.value!r}"))
    for cit in pm.citations:
        if cit.doi is not None and not validate_doi(cit.doi.value):
            diags.append(error("E-BADDOI", f"citation {cit.key!r}: {cit.doi.value!r}"))
        if cit.url is not None and not cit.url.startswith(("http://", "https://")):
            diags.append(warning("W-BADURL", f"citation {cit.key!r}: {cit.url!r}"))
    if pm.title.onclick is not None and not pm.title.onclick.startswith(("http://", "https://")):
        diags.append(warning("W-BADURL", f"title onclick: {pm.title.onclick!r}"))
    return diags
