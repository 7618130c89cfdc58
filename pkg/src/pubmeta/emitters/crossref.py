"""Crossref deposit XML (schema 5.3.1 subset: journal articles only).

Math in titles is flattened to ``$...$`` text.  Funder ids become funder
registry DOIs under the 10.13039 prefix.  One article per batch.
"""

from __future__ import annotations

from ..diagnostics import CodedError
from ..model import Author, Citation, PaperMeta
from ..textex import to_plain
from .common import EmitConfig, XmlBuilder, esc_text, nfc, require_clean

SCHEMA_NS = "http://www.crossref.org/schema/5.3.1"
FUNDREF_NS = "http://www.crossref.org/fundref.xsd"
AI_NS = "http://www.crossref.org/AccessIndicators.xsd"

_ROOT_ATTRS = {
    "version": "5.3.1",
    "xmlns": SCHEMA_NS,
    "xmlns:xsi": "http://www.w3.org/2001/XMLSchema-instance",
    "xmlns:fr": FUNDREF_NS,
    "xmlns:ai": AI_NS,
    "xsi:schemaLocation": f"{SCHEMA_NS} https://www.crossref.org/schemas/crossref5.3.1.xsd",
}


def _require_config(cfg: EmitConfig) -> None:
    missing = [k for k in ("journal_title", "journal_abbrev", "doi_prefix",
                           "depositor_name", "depositor_email", "registrant")
               if not getattr(cfg, k)]
    if missing:
        raise CodedError("E-NOCONFIG", "missing config: " + ", ".join(missing))


def _given_name(author: Author) -> str | None:
    """Subtract the stated surname from the display name; never guess."""
    name, surname = author.name, author.surname
    if surname is None or name == surname:
        return None
    if name.endswith(surname):
        given = name[: len(name) - len(surname)].rstrip(" ,")
        return given or None
    return name


def _date(b: XmlBuilder, tag: str, value, media_type: str | None) -> None:
    attrs = {"media_type": media_type} if media_type else None
    b.start(tag, attrs)
    b.leaf("month", f"{value.month:02d}")
    b.leaf("day", f"{value.day:02d}")
    b.leaf("year", f"{value.year:04d}")
    b.end()


def _citation(b: XmlBuilder, cit: Citation) -> None:
    structured = any([cit.venue, cit.authors, cit.volume, cit.number, cit.pages,
                      cit.year, cit.doi, cit.title])
    b.start("citation", {"key": cit.key})
    if structured:
        if cit.venue:
            b.leaf("journal_title", cit.venue)
        if cit.authors:
            first = cit.authors[0]
            b.leaf("author", first.surname or first.name)
        if cit.volume:
            b.leaf("volume", cit.volume)
        if cit.number:
            b.leaf("issue", cit.number)
        if cit.pages:
            b.leaf("first_page", cit.pages.split("-")[0].strip())
        if cit.year is not None:
            b.leaf("cYear", str(cit.year))
        if cit.doi:
            b.leaf("doi", cit.doi.value)
        if cit.title and cit.title.segments:
            b.leaf("article_title", to_plain(cit.title))
    elif cit.raw:
        b.leaf("unstructured_citation", cit.raw)
    b.end()


def emit_crossref(pm: PaperMeta, cfg: EmitConfig) -> str:
    """Serialize one article as a registration-ready doi_batch document."""
    require_clean(pm)
    if pm.doi is None:
        raise CodedError("E-NODOI", "Crossref deposit needs a DOI")
    if pm.dates.published is None:
        raise CodedError("E-NODATE", "Crossref deposit needs a published date")
    _require_config(cfg)
    landing = cfg.landing_for(pm.doi.value)  # raises E-NOLANDING when unset
    ts = cfg.batch_timestamp(pm)

    b = XmlBuilder()
    b.start("doi_batch", _ROOT_ATTRS)
    b.start("head")
    b.leaf("doi_batch_id", f"{pm.doi.value}-{ts}")
    b.leaf("timestamp", str(ts))
    b.start("depositor")
    b.leaf("depositor_name", cfg.depositor_name)
    b.leaf("email_address", cfg.depositor_email)
    b.end()
    b.leaf("registrant", cfg.registrant)
    b.end()
    b.start("body")
    b.start("journal")
    b.start("journal_metadata")
    b.leaf("full_title", cfg.journal_title)
    b.leaf("abbrev_title", cfg.journal_abbrev)
    if cfg.issn:
        b.leaf("issn", cfg.issn, {"media_type": "electronic"})
    b.end()
    if cfg.volume or cfg.issue:
        b.start("journal_issue")
        _date(b, "publication_date", pm.dates.published, "online")
        if cfg.volume:
            b.start("journal_volume")
            b.leaf("volume", cfg.volume)
            b.end()
        if cfg.issue:
            b.leaf("issue", cfg.issue)
        b.end()
    b.start("journal_article", {"publication_type": "full_text"})
    b.start("titles")
    b.leaf("title", to_plain(pm.title.main))
    if pm.title.subtitle and pm.title.subtitle.segments:
        b.leaf("subtitle", to_plain(pm.title.subtitle))
    b.end()
    if pm.authors:
        b.start("contributors")
        for pos, author in enumerate(pm.authors):
            b.start("person_name", {
                "sequence": "first" if pos == 0 else "additional",
                "contributor_role": "author",
            })
            given = _given_name(author)
            if given:
                b.leaf("given_name", given)
            # Crossref's one-field fallback: full name in surname
            b.leaf("surname", author.surname or author.name)
            if author.affiliations:
                b.start("affiliations")
                for idx in author.affiliations:
                    aff = pm.affiliations[idx - 1]
                    b.start("institution")
                    b.leaf("institution_name", aff.name)
                    if aff.ror:
                        b.leaf("institution_id", f"https://ror.org/{aff.ror.value}",
                               {"type": "ror"})
                    b.end()
                b.end()
            if author.orcid:
                b.leaf("ORCID", f"https://orcid.org/{author.orcid.value}")
            b.end()
        b.end()
    _date(b, "publication_date", pm.dates.published, "online")
    if pm.dates.accepted:
        _date(b, "acceptance_date", pm.dates.accepted, None)
    if pm.funders:
        b.start("fr:program", {"name": "fundref"})
        for funder in pm.funders:
            b.start("fr:assertion", {"name": "fundgroup"})
            name = esc_text(nfc(funder.name))
            if funder.funder_id:
                ident = esc_text(f"https://doi.org/10.13039/{funder.funder_id.value}")
                b.raw(f'<fr:assertion name="funder_name">{name}'
                      f'<fr:assertion name="funder_identifier">{ident}</fr:assertion>'
                      f'</fr:assertion>')
            else:
                b.raw(f'<fr:assertion name="funder_name">{name}</fr:assertion>')
            if funder.grantid:
                b.leaf("fr:assertion", funder.grantid, {"name": "award_number"})
            b.end()
        b.end()
    if pm.license:
        b.start("ai:program", {"name": "AccessIndicators"})
        b.leaf("ai:license_ref", pm.license, {"applies_to": "vor"})
        b.end()
    b.start("doi_data")
    b.leaf("doi", pm.doi.value)
    b.leaf("resource", landing)
    b.end()
    if pm.citations:
        b.start("citation_list")
        for cit in pm.citations:
            _citation(b, cit)
        b.end()
    b.end()  # journal_article
    b.end()  # journal
    b.end()  # body
    b.end()  # doi_batch
    return b.serialize()
