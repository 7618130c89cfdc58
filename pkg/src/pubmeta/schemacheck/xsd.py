"""A small XSD validator for the vendored subset schemas.

Supports the features those schemas use: global element declarations with
inline complex types, sequences with minOccurs/maxOccurs, mixed content,
cross-namespace refs, simpleContent extensions of xs:string, and attributes
with optional enumerations.  Content models compile to regexes over the
children's qualified names.
"""

from __future__ import annotations

import io
import re
import xml.etree.ElementTree as ET

XS = "{http://www.w3.org/2001/XMLSchema}"
XSI = "{http://www.w3.org/2001/XMLSchema-instance}"


class AttrDef:
    __slots__ = ("required", "values")

    def __init__(self, required: bool, values: frozenset | None):
        self.required = required
        self.values = values


class ElementDef:
    __slots__ = ("qname", "particle", "mixed", "simple", "attrs", "_regex")

    def __init__(self, qname, particle, mixed, simple, attrs):
        self.qname = qname
        self.particle = particle  # nested ("seq"|"choice"|"el", ..., min, max)
        self.mixed = mixed
        self.simple = simple  # text content allowed, no children
        self.attrs = attrs
        self._regex = None

    def regex(self):
        if self._regex is None and self.particle is not None:
            self._regex = re.compile(_particle_rx(self.particle))
        return self._regex


def _occ_rx(lo: int, hi: int | None) -> str:
    if lo == 1 and hi == 1:
        return ""
    if lo == 0 and hi == 1:
        return "?"
    if hi is None:
        if lo == 0:
            return "*"
        if lo == 1:
            return "+"
        return "{%d,}" % lo
    return "{%d,%d}" % (lo, hi)


def _particle_rx(p) -> str:
    kind = p[0]
    if kind == "el":
        core = "(?:%s;)" % re.escape("{%s}%s" % p[1])
    else:
        inner = [_particle_rx(c) for c in p[1]]
        joiner = "" if kind == "seq" else "|"
        core = "(?:" + joiner.join(inner) + ")"
    return core + _occ_rx(p[2], p[3])


def _occurs(el) -> tuple[int, int | None]:
    lo = int(el.get("minOccurs", "1"))
    hi_raw = el.get("maxOccurs", "1")
    hi = None if hi_raw == "unbounded" else int(hi_raw)
    return lo, hi


class Schema:
    def __init__(self):
        self.elements: dict[tuple[str, str], ElementDef] = {}

    @classmethod
    def load(cls, *texts: str) -> "Schema":
        schema = cls()
        for text in texts:
            schema._load_one(text)
        return schema

    def _load_one(self, text: str) -> None:
        nsmap: dict[str, str] = {}
        for event, payload in ET.iterparse(io.StringIO(text), events=("start-ns",)):
            prefix, uri = payload
            nsmap.setdefault(prefix, uri)
        root = ET.fromstring(text)
        tns = root.get("targetNamespace", "")
        for child in root:
            if child.tag == XS + "element":
                edef = self._element_def(child, nsmap, tns)
                self.elements[edef.qname] = edef

    def _resolve(self, value: str, nsmap: dict, tns: str) -> tuple[str, str]:
        if ":" in value:
            prefix, local = value.split(":", 1)
            return nsmap[prefix], local
        return nsmap.get("", tns), value

    def _element_def(self, el, nsmap, tns) -> ElementDef:
        qname = (tns, el.get("name"))
        if el.get("type"):  # only xs:string leaves are used in the subsets
            return ElementDef(qname, None, False, True, {})
        ct = el.find(XS + "complexType")
        if ct is None:
            return ElementDef(qname, None, False, True, {})
        attrs = {a.get("name"): _attr_def(a) for a in ct.findall(XS + "attribute")}
        sc = ct.find(XS + "simpleContent")
        if sc is not None:
            ext = sc.find(XS + "extension")
            if ext is not None:
                for a in ext.findall(XS + "attribute"):
                    attrs[a.get("name")] = _attr_def(a)
            return ElementDef(qname, None, False, True, attrs)
        mixed = ct.get("mixed") == "true"
        particle = None
        for tag in ("sequence", "choice"):
            body = ct.find(XS + tag)
            if body is not None:
                particle = self._particle(body, tag, nsmap, tns)
                break
        return ElementDef(qname, particle, mixed, False, attrs)

    def _particle(self, el, kind: str, nsmap, tns):
        children = []
        for child in el:
            if child.tag == XS + "element":
                ref = child.get("ref")
                qn = self._resolve(ref, nsmap, tns) if ref else (tns, child.get("name"))
                lo, hi = _occurs(child)
                children.append(("el", qn, lo, hi))
            elif child.tag in (XS + "sequence", XS + "choice"):
                children.append(self._particle(
                    child, "seq" if child.tag == XS + "sequence" else "choice", nsmap, tns))
        lo, hi = _occurs(el)
        return ("seq" if kind == "sequence" else kind, children, lo, hi)

    # -- validation --------------------------------------------------------

    def validate(self, xml_text: str, expected_root: tuple[str, str] | None = None) -> list[str]:
        errors: list[str] = []
        try:
            root = ET.fromstring(xml_text)
        except ET.ParseError as exc:
            return [f"not well-formed: {exc}"]
        qname = _split(root.tag)
        if expected_root and qname != expected_root:
            errors.append(f"root is {root.tag}, expected {{{expected_root[0]}}}{expected_root[1]}")
        self._walk(root, "/" + qname[1], errors)
        return errors

    def _walk(self, el, path: str, errors: list[str]) -> None:
        qname = _split(el.tag)
        edef = self.elements.get(qname)
        if edef is None:
            errors.append(f"{path}: element {el.tag} not declared")
            return
        seen = set()
        for attr, value in el.attrib.items():
            if attr.startswith(XSI):
                continue
            if attr.startswith("{"):
                errors.append(f"{path}: unexpected namespaced attribute {attr}")
                continue
            adef = edef.attrs.get(attr)
            if adef is None:
                errors.append(f"{path}: attribute {attr!r} not declared")
                continue
            seen.add(attr)
            if adef.values is not None and value not in adef.values:
                errors.append(f"{path}: attribute {attr}={value!r} not in {sorted(adef.values)}")
        for attr, adef in edef.attrs.items():
            if adef.required and attr not in el.attrib:
                errors.append(f"{path}: required attribute {attr!r} missing")
        children = list(el)
        if edef.simple or edef.particle is None:
            if children:
                errors.append(f"{path}: no child elements allowed")
            return
        if not edef.mixed:
            stray = (el.text or "").strip() or any((c.tail or "").strip() for c in children)
            if stray:
                errors.append(f"{path}: text not allowed in element-only content")
        stream = "".join(child.tag + ";" for child in children)
        rx = edef.regex()
        if rx is not None and not rx.fullmatch(stream):
            got = " ".join(_split(c.tag)[1] for c in children) or "(no children)"
            errors.append(f"{path}: children [{got}] violate content model")
        for i, child in enumerate(children):
            self._walk(child, f"{path}/{_split(child.tag)[1]}[{i}]", errors)


def _attr_def(a) -> AttrDef:
    required = a.get("use") == "required"
    values = None
    enums = a.findall(f"{XS}simpleType/{XS}restriction/{XS}enumeration")
    if enums:
        values = frozenset(e.get("value") for e in enums)
    return AttrDef(required, values)


def _split(tag: str) -> tuple[str, str]:
    if tag.startswith("{"):
        ns, local = tag[1:].split("}", 1)
        return ns, local
    return "", tag
