"""JATS 1.3 (journal publishing tag set) front matter, plus a ref-list.

Only ``<front>`` is populated; ``<back>`` appears when there are citations
to carry.  Inline math becomes ``<inline-formula><tex-math>`` with the TeX
kept verbatim (delimiters included).
"""

from __future__ import annotations

from ..model import Citation, PaperMeta
from ..textex import Math, RichText
from .common import EmitConfig, XmlBuilder, esc_attr, esc_text, nfc, require_clean

DOCTYPE = ('<!DOCTYPE article PUBLIC "-//NLM//DTD JATS (Z39.96) '
           'Journal Publishing DTD v1.3 20210610//EN" "JATS-journalpublishing1-3.dtd">')


def _rich_markup(rt: RichText) -> str:
    """Escaped mixed content for one line: text plus inline-formula islands."""
    parts = []
    for seg in rt.segments:
        if isinstance(seg, Math):
            parts.append("<inline-formula><tex-math>"
                         + esc_text(f"${seg.value}$")
                         + "</tex-math></inline-formula>")
        else:
            parts.append(esc_text(nfc(seg.value)))
    return "".join(parts)


def _rich_line(b: XmlBuilder, tag: str, rt: RichText, attrs: dict | None = None) -> None:
    rendered = "".join(f' {k}="{esc_attr(v)}"' for k, v in (attrs or {}).items())
    b.raw(f"<{tag}{rendered}>{_rich_markup(rt)}</{tag}>")


def _day_month_year(b: XmlBuilder, value) -> None:
    b.leaf("day", f"{value.day:02d}")
    b.leaf("month", f"{value.month:02d}")
    b.leaf("year", f"{value.year:04d}")


def _ref(b: XmlBuilder, cit: Citation) -> None:
    structured = any([cit.venue, cit.authors, cit.volume, cit.number, cit.pages,
                      cit.year, cit.doi, cit.title, cit.url])
    b.start("ref", {"id": cit.key})
    if structured:
        b.start("element-citation", {"publication-type": cit.entry_type})
        if cit.authors:
            b.start("person-group", {"person-group-type": "author"})
            for author in cit.authors:
                if author.surname:
                    given = author.name
                    if given.endswith(author.surname):
                        given = given[: len(given) - len(author.surname)].rstrip(" ,")
                    b.raw("<name><surname>" + esc_text(nfc(author.surname)) + "</surname>"
                          + (f"<given-names>{esc_text(nfc(given))}</given-names>" if given else "")
                          + "</name>")
                else:
                    b.leaf("string-name", author.name)
            b.end()
        if cit.title and cit.title.segments:
            _rich_line(b, "article-title", cit.title)
        if cit.venue:
            b.leaf("source", cit.venue)
        if cit.year is not None:
            b.leaf("year", str(cit.year))
        if cit.volume:
            b.leaf("volume", cit.volume)
        if cit.number:
            b.leaf("issue", cit.number)
        if cit.pages:
            first, _, last = cit.pages.partition("-")
            b.leaf("fpage", first.strip())
            if last.strip():
                b.leaf("lpage", last.strip("- ").strip())
        if cit.doi:
            b.leaf("pub-id", cit.doi.value, {"pub-id-type": "doi"})
        if cit.url:
            b.leaf("uri", cit.url)
        b.end()
    else:
        b.leaf("mixed-citation", cit.raw or "")
    b.end()


def emit_jats(pm: PaperMeta, cfg: EmitConfig) -> str:
    require_clean(pm)
    b = XmlBuilder()
    b.lines.append(DOCTYPE)
    b.start("article", {"article-type": "research-article", "dtd-version": "1.3"})
    b.start("front")
    if cfg.journal_title or cfg.journal_abbrev or cfg.issn:
        b.start("journal-meta")
        if cfg.journal_abbrev:
            b.leaf("journal-id", cfg.journal_abbrev, {"journal-id-type": "publisher-id"})
        if cfg.journal_title:
            b.start("journal-title-group")
            b.leaf("journal-title", cfg.journal_title)
            b.end()
        if cfg.issn:
            b.leaf("issn", cfg.issn, {"publication-format": "electronic"})
        b.end()
    b.start("article-meta")
    if pm.doi:
        b.leaf("article-id", pm.doi.value, {"pub-id-type": "doi"})
    b.start("title-group")
    _rich_line(b, "article-title", pm.title.main)
    if pm.title.subtitle and pm.title.subtitle.segments:
        _rich_line(b, "subtitle", pm.title.subtitle)
    if pm.title.running:
        b.leaf("alt-title", pm.title.running, {"alt-title-type": "running-head"})
    b.end()
    if pm.authors:
        b.start("contrib-group")
        for author in pm.authors:
            attrs = {"contrib-type": "author"}
            if author.corresponding:
                attrs["corresp"] = "yes"
            b.start("contrib", attrs)
            if author.orcid:
                b.leaf("contrib-id", f"https://orcid.org/{author.orcid.value}",
                       {"contrib-id-type": "orcid"})
            if author.surname:
                given = author.name
                if given.endswith(author.surname):
                    given = given[: len(given) - len(author.surname)].rstrip(" ,")
                b.raw("<name><surname>" + esc_text(nfc(author.surname)) + "</surname>"
                      + (f"<given-names>{esc_text(nfc(given))}</given-names>" if given else "")
                      + "</name>")
            else:
                b.leaf("string-name", author.name)
            if author.email:
                b.leaf("email", author.email)
            for idx in author.affiliations:
                b.leaf("xref", None, {"ref-type": "aff", "rid": f"aff{idx}"})
            b.end()
        b.end()
    for aff in pm.affiliations:
        b.start("aff", {"id": f"aff{aff.index}"})
        b.start("institution-wrap")
        b.leaf("institution", aff.name)
        if aff.department:
            b.leaf("institution", aff.department, {"content-type": "dept"})
        if aff.ror:
            b.leaf("institution-id", f"https://ror.org/{aff.ror.value}",
                   {"institution-id-type": "ror"})
        b.end()
        if aff.street:
            b.leaf("addr-line", aff.street, {"content-type": "street"})
        if aff.city:
            b.leaf("city", aff.city)
        if aff.country:
            b.leaf("country", aff.country)
        b.end()
    if pm.dates.published:
        b.start("pub-date", {"date-type": "pub", "publication-format": "electronic",
                             "iso-8601-date": pm.dates.published.isoformat()})
        _day_month_year(b, pm.dates.published)
        b.end()
    if cfg.volume:
        b.leaf("volume", cfg.volume)
    if cfg.issue:
        b.leaf("issue", cfg.issue)
    if pm.dates.received or pm.dates.accepted:
        b.start("history")
        for date_type, value in (("received", pm.dates.received),
                                 ("accepted", pm.dates.accepted)):
            if value:
                b.start("date", {"date-type": date_type, "iso-8601-date": value.isoformat()})
                _day_month_year(b, value)
                b.end()
        b.end()
    if pm.license:
        b.start("permissions")
        b.start("license")
        b.leaf("license-p", pm.license)
        b.end()
        b.end()
    if pm.abstract and pm.abstract.segments:
        b.start("abstract")
        _rich_line(b, "p", pm.abstract)
        b.end()
    if pm.keywords:
        b.start("kwd-group")
        for kw in pm.keywords:
            b.leaf("kwd", kw)
        b.end()
    if pm.funders:
        b.start("funding-group")
        for funder in pm.funders:
            b.start("award-group")
            b.start("funding-source")
            b.start("institution-wrap")
            b.leaf("institution", funder.name)
            if funder.funder_id:
                b.leaf("institution-id", f"https://doi.org/10.13039/{funder.funder_id.value}",
                       {"institution-id-type": "doi"})
            b.end()
            b.end()
            if funder.grantid:
                b.leaf("award-id", funder.grantid)
            b.end()
        b.end()
    b.end()  # article-meta
    b.end()  # front
    if pm.citations:
        b.start("back")
        b.start("ref-list")
        for cit in pm.citations:
            _ref(b, cit)
        b.end()
        b.end()
    b.end()  # article
    return b.serialize()
