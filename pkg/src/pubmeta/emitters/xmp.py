"""XMP packet (RDF/XML) for embedding article metadata into a PDF.

Dublin Core covers title/creators/description; the DOI travels in the PRISM
namespace.  Per-author ORCIDs and affiliation names, which the stock PDF
schemas cannot carry, go into a small custom schema that the packet itself
declares via the PDF/A extension-schema container.
"""

from __future__ import annotations

from ..model import PaperMeta
from ..textex import to_plain
from .common import XmlBuilder, require_clean

XPACKET_BEGIN = '<?xpacket begin="﻿" id="W5M0MpCehiHzreSzNTczkc9d"?>'
XPACKET_END = '<?xpacket end="w"?>'

AUTHOR_NS = "https://ns.pubmeta.org/article/1.0/"

_DC = "http://purl.org/dc/elements/1.1/"
_PRISM = "http://prismstandard.org/namespaces/basic/2.0/"
_RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
_PDFA_EXT = "http://www.aiim.org/pdfa/ns/extension/"
_PDFA_SCHEMA = "http://www.aiim.org/pdfa/ns/schema#"
_PDFA_PROP = "http://www.aiim.org/pdfa/ns/property#"


def emit_xmp(pm: PaperMeta) -> str:
    require_clean(pm)
    b = XmlBuilder()
    b.lines = [XPACKET_BEGIN]  # xpacket processing instructions frame the packet
    b.start("x:xmpmeta", {"xmlns:x": "adobe:ns:meta/", "x:xmptk": "pubmeta 0.1.0"})
    b.start("rdf:RDF", {"xmlns:rdf": _RDF})

    b.start("rdf:Description", {"rdf:about": "", "xmlns:dc": _DC, "xmlns:prism": _PRISM})
    b.start("dc:title")
    b.start("rdf:Alt")
    b.leaf("rdf:li", to_plain(pm.title.main), {"xml:lang": "x-default"})
    b.end()
    b.end()
    if pm.authors:
        b.start("dc:creator")
        b.start("rdf:Seq")
        for author in pm.authors:
            b.leaf("rdf:li", author.name)
        b.end()
        b.end()
    if pm.abstract and pm.abstract.segments:
        b.start("dc:description")
        b.start("rdf:Alt")
        b.leaf("rdf:li", to_plain(pm.abstract), {"xml:lang": "x-default"})
        b.end()
        b.end()
    if pm.doi:
        b.leaf("prism:doi", pm.doi.value)
    b.end()

    # declare the custom schema (an extension schema must ship inside the packet)
    b.start("rdf:Description", {
        "rdf:about": "",
        "xmlns:pdfaExtension": _PDFA_EXT,
        "xmlns:pdfaSchema": _PDFA_SCHEMA,
        "xmlns:pdfaProperty": _PDFA_PROP,
    })
    b.start("pdfaExtension:schemas")
    b.start("rdf:Bag")
    b.start("rdf:li", {"rdf:parseType": "Resource"})
    b.leaf("pdfaSchema:schema", "Article author identity schema")
    b.leaf("pdfaSchema:namespaceURI", AUTHOR_NS)
    b.leaf("pdfaSchema:prefix", "pma")
    b.start("pdfaSchema:property")
    b.start("rdf:Seq")
    b.start("rdf:li", {"rdf:parseType": "Resource"})
    b.leaf("pdfaProperty:name", "authors")
    b.leaf("pdfaProperty:valueType", "Seq of author records")
    b.leaf("pdfaProperty:category", "external")
    b.leaf("pdfaProperty:description",
           "Ordered authors with ORCID and affiliation names")
    b.end()  # rdf:li (property record)
    b.end()  # rdf:Seq
    b.end()  # pdfaSchema:property
    b.end()  # rdf:li (schema record)
    b.end()  # rdf:Bag
    b.end()  # pdfaExtension:schemas
    b.end()  # rdf:Description

    if pm.authors:
        b.start("rdf:Description", {"rdf:about": "", "xmlns:pma": AUTHOR_NS})
        b.start("pma:authors")
        b.start("rdf:Seq")
        for author in pm.authors:
            b.start("rdf:li", {"rdf:parseType": "Resource"})
            b.leaf("pma:name", author.name)
            if author.orcid:
                b.leaf("pma:orcid", author.orcid.value)
            if author.affiliations:
                b.start("pma:affiliations")
                b.start("rdf:Seq")
                for idx in author.affiliations:
                    b.leaf("rdf:li", pm.affiliations[idx - 1].name)
                b.end()
                b.end()
            b.end()
        b.end()
        b.end()
        b.end()

    b.end()  # rdf:RDF
    b.end()  # x:xmpmeta
    b.lines.append(XPACKET_END)
    return b.serialize()
