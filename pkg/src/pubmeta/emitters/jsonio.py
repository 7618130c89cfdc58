"""Canonical JSON: fixed key order, two-space indent, LF, NFC, no null keys.

Rich text travels as one string: math wrapped in ``$...$``; a literal ``$``
or ``\\`` inside plain text is escaped TeX-style (``\\$``, ``\\\\``) so the
encoding stays invertible.  Equal models produce byte-identical output.
"""

from __future__ import annotations

import datetime
import json

from ..diagnostics import CodedError
from ..model import (
    Affiliation,
    Author,
    Citation,
    CitationAuthor,
    Dates,
    Funding,
    Identifier,
    PaperMeta,
    TitleGroup,
    check_relationships,
)
from ..textex import Math, RichText, Text
from .common import nfc, require_clean


class JsonSchemaError(CodedError):
    def __init__(self, path: str, message: str):
        super().__init__("E-JSONSCHEMA", f"{path}: {message}")
        self.path = path


def encode_rich(rt: RichText) -> str:
    parts = []
    for seg in rt.segments:
        if isinstance(seg, Math):
            parts.append("$" + seg.value + "$")
        else:
            parts.append(seg.value.replace("\\", "\\\\").replace("$", "\\$"))
    return "".join(parts)


def decode_rich(s: str, path: str) -> RichText:
    segs: list = []
    buf: list[str] = []
    math = False
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\":
            if math:
                buf.append(c)
                if i + 1 < len(s):
                    buf.append(s[i + 1])
                    i += 2
                else:
                    i += 1
                continue
            if i + 1 < len(s) and s[i + 1] in ("$", "\\"):
                buf.append(s[i + 1])
                i += 2
                continue
            raise JsonSchemaError(path, "stray backslash in text")
        if c == "$":
            if math:
                if not buf:
                    raise JsonSchemaError(path, "empty math span")
                segs.append(Math("".join(buf)))
            elif buf:
                segs.append(Text("".join(buf)))
            buf = []
            math = not math
            i += 1
            continue
        buf.append(c)
        i += 1
    if math:
        raise JsonSchemaError(path, "unterminated math span")
    if buf:
        segs.append(Text("".join(buf)))
    return RichText(tuple(segs))


# ---------------------------------------------------------------------------
# emit

def _put(d: dict, key: str, value) -> None:
    """Add key only when there is something to say (no nulls, no empties)."""
    if value is None or value == "" or value == [] or value == {}:
        return
    d[key] = value


def _rich(rt: RichText | None) -> str | None:
    if rt is None or not rt.segments:
        return None
    return nfc(encode_rich(rt))


def _s(value: str | None) -> str | None:
    return None if value is None else nfc(value)


def emit_json(pm: PaperMeta) -> str:
    require_clean(pm)
    obj: dict = {}
    title: dict = {"main": _rich(pm.title.main) or ""}
    _put(title, "plaintext", _s(pm.title.plaintext))
    _put(title, "subtitle", _rich(pm.title.subtitle))
    _put(title, "running", _s(pm.title.running))
    _put(title, "onclick", _s(pm.title.onclick))
    obj["title"] = title

    authors = []
    for a in pm.authors:
        d: dict = {}
        _put(d, "name", _s(a.name))
        _put(d, "surname", _s(a.surname))
        _put(d, "orcid", a.orcid.value if a.orcid else None)
        _put(d, "email", _s(a.email))
        _put(d, "affiliations", list(a.affiliations))
        _put(d, "footnote", _rich(a.footnote))
        _put(d, "onclick", _s(a.onclick))
        if a.corresponding:
            d["corresponding"] = True
        _put(d, "roles", [nfc(r) for r in a.roles])
        authors.append(d)
    _put(obj, "authors", authors)

    affiliations = []
    for aff in pm.affiliations:
        d = {}
        _put(d, "name", _s(aff.name))
        _put(d, "ror", aff.ror.value if aff.ror else None)
        _put(d, "department", _s(aff.department))
        _put(d, "street", _s(aff.street))
        _put(d, "city", _s(aff.city))
        _put(d, "country", _s(aff.country))
        affiliations.append(d)
    _put(obj, "affiliations", affiliations)

    funders = []
    for f in pm.funders:
        d = {}
        _put(d, "name", _s(f.name))
        _put(d, "funder_id", f.funder_id.value if f.funder_id else None)
        _put(d, "grantid", _s(f.grantid))
        _put(d, "country", _s(f.country))
        funders.append(d)
    _put(obj, "funders", funders)

    citations = []
    for c in pm.citations:
        d = {}
        d["key"] = nfc(c.key)
        d["entry_type"] = nfc(c.entry_type)
        cauthors = []
        for ca in c.authors:
            cd = {}
            _put(cd, "name", _s(ca.name))
            _put(cd, "surname", _s(ca.surname))
            cauthors.append(cd)
        _put(d, "authors", cauthors)
        _put(d, "title", _rich(c.title))
        _put(d, "year", c.year)
        _put(d, "venue", _s(c.venue))
        _put(d, "volume", _s(c.volume))
        _put(d, "number", _s(c.number))
        _put(d, "pages", _s(c.pages))
        _put(d, "doi", c.doi.value if c.doi else None)
        _put(d, "url", _s(c.url))
        _put(d, "raw", _s(c.raw))
        citations.append(d)
    _put(obj, "citations", citations)

    _put(obj, "abstract", _rich(pm.abstract))
    _put(obj, "keywords", [nfc(k) for k in pm.keywords])
    _put(obj, "doi", pm.doi.value if pm.doi else None)
    _put(obj, "license", _s(pm.license))
    dates = {}
    _put(dates, "received", pm.dates.received.isoformat() if pm.dates.received else None)
    _put(dates, "accepted", pm.dates.accepted.isoformat() if pm.dates.accepted else None)
    _put(dates, "published", pm.dates.published.isoformat() if pm.dates.published else None)
    _put(obj, "dates", dates)
    _put(obj, "extras", {nfc(k): nfc(v) for k, v in pm.extras.items()})
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


# ---------------------------------------------------------------------------
# parse

_TOP_KEYS = {"title", "authors", "affiliations", "funders", "citations",
             "abstract", "keywords", "doi", "license", "dates", "extras"}
_TITLE_KEYS = {"main", "plaintext", "subtitle", "running", "onclick"}
_AUTHOR_KEYS = {"name", "surname", "orcid", "email", "affiliations",
                "footnote", "onclick", "corresponding", "roles"}
_AFF_KEYS = {"name", "ror", "department", "street", "city", "country"}
_FUND_KEYS = {"name", "funder_id", "grantid", "country"}
_CIT_KEYS = {"key", "entry_type", "authors", "title", "year", "venue",
             "volume", "number", "pages", "doi", "url", "raw"}
_DATE_KEYS = {"received", "accepted", "published"}


def _need_dict(value, path: str, allowed: set[str]) -> dict:
    if not isinstance(value, dict):
        raise JsonSchemaError(path, "expected an object")
    for key in value:
        if key not in allowed:
            raise JsonSchemaError(f"{path}.{key}", "unknown key")
    return value


def _need_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise JsonSchemaError(path, "expected an array")
    return value


def _opt_str(d: dict, key: str, path: str) -> str | None:
    if key not in d:
        return None
    if not isinstance(d[key], str):
        raise JsonSchemaError(f"{path}.{key}", "expected a string")
    return d[key]


def _opt_date(d: dict, key: str, path: str) -> datetime.date | None:
    raw = _opt_str(d, key, path)
    if raw is None:
        return None
    try:
        return datetime.date.fromisoformat(raw)
    except ValueError:
        raise JsonSchemaError(f"{path}.{key}", f"{raw!r} is not YYYY-MM-DD") from None


def _opt_rich(d: dict, key: str, path: str) -> RichText | None:
    raw = _opt_str(d, key, path)
    if raw is None:
        return None
    return decode_rich(raw, f"{path}.{key}")


def _opt_id(d: dict, key: str, namespace: str, path: str) -> Identifier | None:
    raw = _opt_str(d, key, path)
    if raw is None:
        return None
    return Identifier(namespace, raw)


def parse_json(text: str) -> PaperMeta:
    """Inverse of emit_json on its image; revalidates relationships on load."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JsonSchemaError("$", f"not JSON: {exc}") from None
    data = _need_dict(data, "$", _TOP_KEYS)
    if "title" not in data:
        raise JsonSchemaError("$.title", "missing required key")
    tdict = _need_dict(data["title"], "$.title", _TITLE_KEYS)
    if "main" not in tdict:
        raise JsonSchemaError("$.title.main", "missing required key")
    title = TitleGroup(
        main=decode_rich(tdict["main"], "$.title.main") if isinstance(tdict["main"], str)
        else _bad("$.title.main"),
        plaintext=_opt_str(tdict, "plaintext", "$.title"),
        subtitle=_opt_rich(tdict, "subtitle", "$.title"),
        running=_opt_str(tdict, "running", "$.title"),
        onclick=_opt_str(tdict, "onclick", "$.title"),
    )

    authors = []
    for i, item in enumerate(_need_list(data.get("authors", []), "$.authors")):
        path = f"$.authors[{i}]"
        d = _need_dict(item, path, _AUTHOR_KEYS)
        if "name" not in d:
            raise JsonSchemaError(f"{path}.name", "missing required key")
        affs = _need_list(d.get("affiliations", []), f"{path}.affiliations")
        for j, idx in enumerate(affs):
            if not isinstance(idx, int) or isinstance(idx, bool):
                raise JsonSchemaError(f"{path}.affiliations[{j}]", "expected an integer")
        corresponding = d.get("corresponding", False)
        if not isinstance(corresponding, bool):
            raise JsonSchemaError(f"{path}.corresponding", "expected a boolean")
        roles = _need_list(d.get("roles", []), f"{path}.roles")
        for j, r in enumerate(roles):
            if not isinstance(r, str):
                raise JsonSchemaError(f"{path}.roles[{j}]", "expected a string")
        authors.append(Author(
            name=d["name"] if isinstance(d["name"], str) else _bad(f"{path}.name"),
            surname=_opt_str(d, "surname", path),
            orcid=_opt_id(d, "orcid", "orcid", path),
            email=_opt_str(d, "email", path),
            affiliations=list(affs),
            footnote=_opt_rich(d, "footnote", path),
            onclick=_opt_str(d, "onclick", path),
            corresponding=corresponding,
            roles=list(roles),
        ))

    affiliations = []
    for i, item in enumerate(_need_list(data.get("affiliations", []), "$.affiliations")):
        path = f"$.affiliations[{i}]"
        d = _need_dict(item, path, _AFF_KEYS)
        if "name" not in d:
            raise JsonSchemaError(f"{path}.name", "missing required key")
        affiliations.append(Affiliation(
            index=i + 1,
            name=d["name"] if isinstance(d["name"], str) else _bad(f"{path}.name"),
            ror=_opt_id(d, "ror", "ror", path),
            department=_opt_str(d, "department", path),
            street=_opt_str(d, "street", path),
            city=_opt_str(d, "city", path),
            country=_opt_str(d, "country", path),
        ))

    funders = []
    for i, item in enumerate(_need_list(data.get("funders", []), "$.funders")):
        path = f"$.funders[{i}]"
        d = _need_dict(item, path, _FUND_KEYS)
        if "name" not in d:
            raise JsonSchemaError(f"{path}.name", "missing required key")
        funders.append(Funding(
            name=d["name"] if isinstance(d["name"], str) else _bad(f"{path}.name"),
            funder_id=_opt_id(d, "funder_id", "fundref", path),
            grantid=_opt_str(d, "grantid", path),
            country=_opt_str(d, "country", path),
        ))

    citations = []
    for i, item in enumerate(_need_list(data.get("citations", []), "$.citations")):
        path = f"$.citations[{i}]"
        d = _need_dict(item, path, _CIT_KEYS)
        if "key" not in d or not isinstance(d["key"], str):
            raise JsonSchemaError(f"{path}.key", "missing required key")
        year = d.get("year")
        if year is not None and (not isinstance(year, int) or isinstance(year, bool)):
            raise JsonSchemaError(f"{path}.year", "expected an integer")
        cauthors = []
        for j, cit_a in enumerate(_need_list(d.get("authors", []), f"{path}.authors")):
            capath = f"{path}.authors[{j}]"
            cad = _need_dict(cit_a, capath, {"name", "surname"})
            if "name" not in cad:
                raise JsonSchemaError(f"{capath}.name", "missing required key")
            cauthors.append(CitationAuthor(
                name=cad["name"] if isinstance(cad["name"], str) else _bad(f"{capath}.name"),
                surname=_opt_str(cad, "surname", capath),
            ))
        citations.append(Citation(
            key=d["key"],
            entry_type=_opt_str(d, "entry_type", path) or "misc",
            authors=cauthors,
            title=_opt_rich(d, "title", path),
            year=year,
            venue=_opt_str(d, "venue", path),
            volume=_opt_str(d, "volume", path),
            number=_opt_str(d, "number", path),
            pages=_opt_str(d, "pages", path),
            doi=_opt_id(d, "doi", "doi", path),
            url=_opt_str(d, "url", path),
            raw=_opt_str(d, "raw", path),
        ))

    keywords = _need_list(data.get("keywords", []), "$.keywords")
    for j, k in enumerate(keywords):
        if not isinstance(k, str):
            raise JsonSchemaError(f"$.keywords[{j}]", "expected a string")
    dates_d = _need_dict(data.get("dates", {}), "$.dates", _DATE_KEYS)
    extras = data.get("extras", {})
    if not isinstance(extras, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in extras.items()):
        raise JsonSchemaError("$.extras", "expected an object of strings")

    pm = PaperMeta(
        title=title,
        authors=authors,
        affiliations=affiliations,
        funders=funders,
        citations=citations,
        abstract=_opt_rich(data, "abstract", "$"),
        keywords=list(keywords),
        doi=_opt_id(data, "doi", "doi", "$"),
        license=_opt_str(data, "license", "$"),
        dates=Dates(
            received=_opt_date(dates_d, "received", "$.dates"),
            accepted=_opt_date(dates_d, "accepted", "$.dates"),
            published=_opt_date(dates_d, "published", "$.dates"),
        ),
        extras=dict(extras),
    )
    for diag in check_relationships(pm):
        if diag.is_error:
            raise CodedError(diag.code, diag.message)
    return pm


def _bad(path: str):
    raise JsonSchemaError(path, "expected a string")
