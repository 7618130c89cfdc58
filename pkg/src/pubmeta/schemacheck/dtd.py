"""A small DTD validator for the vendored subset DTDs.

Supports what the subsets use: ELEMENT declarations with EMPTY, (#PCDATA),
mixed, and regular content models (sequences, choices, ?, *, +), and ATTLIST
declarations with CDATA or enumerated types plus #REQUIRED/#IMPLIED/#FIXED
defaults.  Instances are read with expat *without* namespace processing, as
a DTD sees them (literal names).
"""

from __future__ import annotations

import re
import xml.parsers.expat


class XNode:
    __slots__ = ("tag", "attrs", "children", "text")

    def __init__(self, tag: str, attrs: dict):
        self.tag = tag
        self.attrs = dict(attrs)
        self.children: list[XNode] = []
        self.text = ""


def read_xml_literal(text: str) -> XNode:
    """Parse XML keeping prefixed names literal (no namespace expansion)."""
    parser = xml.parsers.expat.ParserCreate()
    root: list[XNode] = []
    stack: list[XNode] = []

    def start(name, attrs):
        node = XNode(name, attrs)
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(name):
        stack.pop()

    def chars(data):
        if stack:
            stack[-1].text += data

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.Parse(text, True)
    return root[0]


_COMMENT = re.compile(r"<!--.*?-->", re.S)
_ELEMENT = re.compile(r"<!ELEMENT\s+([\w:.-]+)\s+([^>]+?)\s*>", re.S)
_ATTLIST = re.compile(r"<!ATTLIST\s+([\w:.-]+)\s+([^>]+?)\s*>", re.S)
_ATTDEF = re.compile(
    r"([\w:.-]+)\s+(CDATA|ID|IDREF|IDREFS|NMTOKEN|NMTOKENS|ENTITY|\([^)]*\))\s+"
    r"(#REQUIRED|#IMPLIED|(?:#FIXED\s+)?(?:\"[^\"]*\"|'[^']*'))",
    re.S,
)
_NAME = re.compile(r"[\w:.-]+")


class ContentModel:
    __slots__ = ("kind", "allowed", "regex")

    def __init__(self, kind: str, allowed: frozenset | None = None, regex=None):
        self.kind = kind  # empty | any | text | mixed | children
        self.allowed = allowed
        self.regex = regex


def _compile_children(spec: str):
    """Compile an element content model into a regex over `name,` tokens."""
    pos = 0

    def fail(msg: str):
        raise ValueError(f"bad content model {spec!r} at {pos}: {msg}")

    def occurs(rx: str) -> str:
        nonlocal pos
        if pos < len(spec) and spec[pos] in "?*+":
            rx += spec[pos]
            pos += 1
        return rx

    def particle() -> str:
        nonlocal pos
        if pos < len(spec) and spec[pos] == "(":
            pos += 1
            rx = group()
            return occurs(rx)
        m = _NAME.match(spec, pos)
        if not m:
            fail("expected a name")
        pos = m.end()
        return occurs(f"(?:{re.escape(m.group(0))},)")

    def group() -> str:
        nonlocal pos
        parts = [particle()]
        sep = None
        while pos < len(spec) and spec[pos] in ",|":
            if sep is None:
                sep = spec[pos]
            elif spec[pos] != sep:
                fail("mixed , and | in one group")
            pos += 1
            parts.append(particle())
        if pos >= len(spec) or spec[pos] != ")":
            fail("expected )")
        pos += 1
        if sep == "|":
            return "(?:" + "|".join(parts) + ")"
        return "(?:" + "".join(parts) + ")"

    rx = particle()
    if pos != len(spec):
        fail("trailing input")
    return re.compile(rx)


def _parse_model(spec: str) -> ContentModel:
    spec = re.sub(r"\s+", "", spec)
    if spec == "EMPTY":
        return ContentModel("empty")
    if spec == "ANY":
        return ContentModel("any")
    if spec.startswith("(#PCDATA"):
        if spec == "(#PCDATA)" or spec == "(#PCDATA)*":
            return ContentModel("text")
        if not spec.endswith(")*"):
            raise ValueError(f"mixed model must end with )*: {spec!r}")
        names = [n for n in spec[len("(#PCDATA"):-2].split("|") if n]
        return ContentModel("mixed", allowed=frozenset(names))
    return ContentModel("children", regex=_compile_children(spec))


class Dtd:
    def __init__(self):
        self.elements: dict[str, ContentModel] = {}
        self.attlists: dict[str, dict[str, tuple[frozenset | None, bool]]] = {}

    @classmethod
    def parse(cls, text: str) -> "Dtd":
        dtd = cls()
        text = _COMMENT.sub("", text)
        for m in _ELEMENT.finditer(text):
            dtd.elements[m.group(1)] = _parse_model(m.group(2))
        for m in _ATTLIST.finditer(text):
            table = dtd.attlists.setdefault(m.group(1), {})
            for am in _ATTDEF.finditer(m.group(2)):
                name, typ, default = am.group(1), am.group(2), am.group(3)
                values = None
                if typ.startswith("("):
                    values = frozenset(v.strip() for v in typ[1:-1].split("|"))
                table[name] = (values, default == "#REQUIRED")
        return dtd

    def validate(self, root: XNode, expected_root: str | None = None) -> list[str]:
        errors: list[str] = []
        if expected_root and root.tag != expected_root:
            errors.append(f"root is <{root.tag}>, expected <{expected_root}>")
        self._walk(root, "/" + root.tag, errors)
        return errors

    def _walk(self, node: XNode, path: str, errors: list[str]) -> None:
        model = self.elements.get(node.tag)
        if model is None:
            errors.append(f"{path}: element <{node.tag}> not declared")
            return
        declared = self.attlists.get(node.tag, {})
        for attr, value in node.attrs.items():
            spec = declared.get(attr)
            if spec is None:
                errors.append(f"{path}: attribute {attr!r} not declared")
                continue
            values, _ = spec
            if values is not None and value not in values:
                errors.append(f"{path}: attribute {attr}={value!r} not in {sorted(values)}")
        for attr, (_, required) in declared.items():
            if required and attr not in node.attrs:
                errors.append(f"{path}: required attribute {attr!r} missing")
        if model.kind == "empty":
            if node.children or node.text.strip():
                errors.append(f"{path}: declared EMPTY but has content")
            return
        if model.kind == "text":
            for child in node.children:
                errors.append(f"{path}: no child elements allowed, found <{child.tag}>")
            return
        if model.kind == "mixed":
            for i, child in enumerate(node.children):
                if child.tag not in model.allowed:
                    errors.append(f"{path}: <{child.tag}> not allowed here")
                else:
                    self._walk(child, f"{path}/{child.tag}[{i}]", errors)
            return
        if model.kind == "children":
            if node.text.strip():
                errors.append(f"{path}: text not allowed in element-only content")
            stream = "".join(child.tag + "," for child in node.children)
            if not model.regex.fullmatch(stream):
                got = " ".join(child.tag for child in node.children) or "(no children)"
                errors.append(f"{path}: children [{got}] violate content model")
            for i, child in enumerate(node.children):
                self._walk(child, f"{path}/{child.tag}[{i}]", errors)
            return
        for i, child in enumerate(node.children):  # ANY
            self._walk(child, f"{path}/{child.tag}[{i}]", errors)
