"""Clean TeX residue out of text fields, preserving inline math verbatim.

Text written out during a LaTeX run arrives with expansion artifacts: spurious
``\\protect`` tokens, ``\\penalty`` glue, extra spaces after control words,
accent macros instead of accented characters, and ``~`` instead of U+00A0.
:func:`normalize` turns such a string into a :class:`RichText`: a canonical
sequence of plain-text segments (pure UTF-8, NFC, no macros) interleaved with
math segments whose TeX content is kept as written.

The accent and glyph tables live in ``data/tex_tables.txt`` so a journal can
extend them without touching code.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources

from .diagnostics import Diagnostic, CodedError, warning


class NormalizeError(CodedError):
    """Raised for inputs that cannot be normalized (E-UNBALANCED, E-BADUTF8)."""


@dataclass(frozen=True)
class Text:
    value: str


@dataclass(frozen=True)
class Math:
    """Inline math content, stored without its ``$`` / ``\\(`` delimiters."""

    value: str


Segment = Text | Math


@dataclass(frozen=True)
class RichText:
    segments: tuple[Segment, ...] = ()

    def is_empty(self) -> bool:
        return not self.segments

    def plain(self) -> str:
        return to_plain(self)


@dataclass
class NormalizeReport:
    """What normalize erased or worked around.

    dropped_macros lists every control sequence that was erased rather than
    translated, with a count, in first-seen order.
    """

    dropped_macros: list[tuple[str, int]] = field(default_factory=list)
    warnings: list[Diagnostic] = field(default_factory=list)


def parse_tables(text: str) -> tuple[dict[str, str], dict[str, str]]:
    """Read the `macro<TAB>codepoint(s)` table format (see data/tex_tables.txt)."""
    accents: dict[str, str] = {}
    glyphs: dict[str, str] = {}
    table = None
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        if line.strip() == "[accents]":
            table = accents
            continue
        if line.strip() == "[glyphs]":
            table = glyphs
            continue
        if table is None:
            continue
        name, _, codes = line.partition("\t")
        table[name] = "".join(chr(int(c, 16)) for c in codes.split())
    return accents, glyphs


def _load_tables() -> tuple[dict[str, str], dict[str, str]]:
    text = resources.files("pubmeta").joinpath("data/tex_tables.txt").read_text("utf-8")
    return parse_tables(text)


ACCENTS, GLYPHS = _load_tables()

# Face markup is unwrapped, keeping the argument.
FACES = frozenset({"textbf", "textit", "texttt", "emph", "textsc", "textrm", "textsf"})

# Characters that need a macro to appear literally in TeX.
ESCAPES = {
    "%": "%",
    "&": "&",
    "#": "#",
    "_": "_",
    "$": "$",
    "{": "{",
    "}": "}",
    "textbackslash": "\\",
    "textasciitilde": "~",
}

_WS_RUN = re.compile(r"[ \t\n\r\f\v]+")


def _is_cs_letter(c: str) -> bool:
    return ("a" <= c <= "z") or ("A" <= c <= "Z") or c == "@"


_MAX_GROUP_DEPTH = 80  # metadata fields are flat; reject absurd nesting early


def _tokenize(s: str, i: int = 0, closing: bool = False, depth: int = 0) -> tuple[list, int]:
    """Split into control sequences, groups, math spans and literal chars.

    Tokens: ("cs", name) | ("group", [tokens]) | ("math", content) | ("char", c).
    """
    out: list = []
    n = len(s)
    while i < n:
        c = s[i]
        if c == "\\":
            if i + 1 >= n:
                out.append(("cs", ""))
                i += 1
            elif s[i + 1] == "(":
                content, i = _scan_math(s, i + 2, latex_close=True)
                out.append(("math", content))
            elif s[i + 1] == ")":
                raise NormalizeError("E-UNBALANCED", "\\) without matching \\(")
            elif _is_cs_letter(s[i + 1]):
                j = i + 1
                while j < n and _is_cs_letter(s[j]):
                    j += 1
                out.append(("cs", s[i + 1:j]))
                i = j
            else:
                out.append(("cs", s[i + 1]))
                i += 2
        elif c == "$":
            content, i = _scan_math(s, i + 1, latex_close=False)
            out.append(("math", content))
        elif c == "{":
            if depth >= _MAX_GROUP_DEPTH:
                raise NormalizeError("E-UNBALANCED", "brace groups nested too deeply")
            sub, i = _tokenize(s, i + 1, closing=True, depth=depth + 1)
            out.append(("group", sub))
        elif c == "}":
            if closing:
                return out, i + 1
            raise NormalizeError("E-UNBALANCED", "closing brace without opening brace")
        else:
            out.append(("char", c))
            i += 1
    if closing:
        raise NormalizeError("E-UNBALANCED", "unclosed brace group")
    return out, i


def _scan_math(s: str, i: int, latex_close: bool) -> tuple[str, int]:
    """Collect math content up to the matching delimiter, keeping it verbatim."""
    n = len(s)
    buf: list[str] = []
    while i < n:
        c = s[i]
        if c == "\\" and i + 1 < n:
            if latex_close and s[i + 1] == ")":
                return "".join(buf), i + 2
            buf.append(s[i])
            buf.append(s[i + 1])
            i += 2
            continue
        if c == "$":
            if latex_close:
                raise NormalizeError("E-UNBALANCED", "$ inside \\( ... \\)")
            return "".join(buf), i + 1
        buf.append(c)
        i += 1
    raise NormalizeError(
        "E-UNBALANCED", "math opened with " + ("\\(" if latex_close else "$") + " never closed"
    )


_MATH_PROTECT = re.compile(r"\\protect(?![A-Za-z@]) ?")
_MATH_PENALTY = re.compile(r"\\penalty(?![A-Za-z@])\s*(?:\\@M(?![A-Za-z@])|\d+) ?")
_MATH_ARGSPACE = re.compile(r"(\\[A-Za-z@]+)[ \t]+(?=\{)")


class _Drops:
    """Counts erased control sequences in first-seen order."""

    def __init__(self) -> None:
        self.counts: dict[str, int] = {}

    def add(self, name: str, n: int = 1) -> None:
        self.counts[name] = self.counts.get(name, 0) + n

    def report(self) -> NormalizeReport:
        rep = NormalizeReport(dropped_macros=list(self.counts.items()))
        for name, count in rep.dropped_macros:
            rep.warnings.append(
                warning("W-DROPPED-MACRO", f"dropped macro \\{name} ({count}x)")
            )
        return rep


def _clean_math(src: str, drops: _Drops) -> str:
    out, n = _MATH_PROTECT.subn("", src)
    if n:
        drops.add("protect", n)
    out, n = _MATH_PENALTY.subn("", out)
    if n:
        drops.add("penalty", n)
    # spaces between a control word and its brace argument are write artifacts
    out = _MATH_ARGSPACE.sub(r"\1", out)
    return out.strip()


# the token sequence \write produces for a ~ in horizontal mode
_TILDE_SEQ = ("unhbox", "voidb@x", "protect", "penalty", "@M", " ")


class _Renderer:
    def __init__(self, drops: _Drops):
        self.drops = drops
        self.segments: list[Segment] = []
        self.buf: list[str] = []

    def text(self, s: str) -> None:
        self.buf.append(s)

    def _flush(self) -> None:
        if self.buf:
            self.segments.append(Text("".join(self.buf)))
            self.buf = []

    def math(self, content: str) -> None:
        cleaned = _clean_math(content, self.drops)
        self._flush()
        self.segments.append(Math(cleaned))

    def finish(self) -> list[Segment]:
        self._flush()
        return self.segments

    def walk(self, tokens: list) -> None:
        i = 0
        while i < len(tokens):
            kind, val = tokens[i]
            if kind == "char":
                self.text("\u00a0" if val == "~" else val)
                i += 1
            elif kind == "math":
                self.math(val)
                i += 1
            elif kind == "group":
                self.walk(val)
                i += 1
            else:
                i = self._control(tokens, i)

    def _skip_spaces(self, tokens: list, i: int) -> int:
        while i < len(tokens) and tokens[i][0] == "char" and tokens[i][1].isspace():
            i += 1
        return i

    def _match_tilde(self, tokens: list, i: int) -> int | None:
        for want in _TILDE_SEQ:
            i = self._skip_spaces(tokens, i)
            if i >= len(tokens) or tokens[i] != ("cs", want):
                return None
            i += 1
        i = self._skip_spaces(tokens, i)
        if i < len(tokens) and tokens[i][0] == "group" and not tokens[i][1]:
            return i + 1
        return None

    def _control(self, tokens: list, i: int) -> int:
        name = tokens[i][1]
        if name == "unhbox":
            end = self._match_tilde(tokens, i)
            if end is not None:
                self.text("\u00a0")
                return end
        if name == "protect":
            i += 1
            if i < len(tokens) and tokens[i] == ("char", " "):
                i += 1
            return i
        if name == "penalty":
            j = self._skip_spaces(tokens, i + 1)
            if j < len(tokens) and tokens[j] == ("cs", "@M"):
                j += 1
            else:
                while j < len(tokens) and tokens[j][0] == "char" and tokens[j][1].isdigit():
                    j += 1
            if j < len(tokens) and tokens[j] == ("char", " "):
                j += 1
            self.drops.add("penalty")
            return j
        if name in ACCENTS:
            return self._accent(tokens, i)
        if name in GLYPHS:
            self.text(GLYPHS[name])
            return i + 1
        if name in FACES:
            j = self._skip_spaces(tokens, i + 1)
            if j >= len(tokens):
                self.drops.add(name)
                return j
            # unwrap: keep the argument, lose the face
            return j
        if name in ESCAPES:
            self.text(ESCAPES[name])
            return i + 1
        if name and name.isspace():
            self.text(" ")
            return i + 1
        self.drops.add(name if name else "\\")
        return i + 1

    def _accent(self, tokens: list, i: int) -> int:
        name = tokens[i][1]
        j = self._skip_spaces(tokens, i + 1)
        if j >= len(tokens):
            self.drops.add(name)
            return j
        kind, val = tokens[j]
        if kind == "char":
            self.text(_compose(name, val))
            return j + 1
        if kind == "cs":
            if val in ("i", "j"):
                self.text(_compose(name, val))
                return j + 1
            self.drops.add(name)
            return j  # reprocess the control sequence on its own
        if kind == "group":
            base = _single_char(val)
            if base is not None:
                self.text(_compose(name, base))
                return j + 1
            if name == "t" and _two_chars(val) is not None:
                a, b = _two_chars(val)
                self.text(a + ACCENTS["t"] + b)
                return j + 1
            self.drops.add(name)
            self.walk(val)  # keep the argument text, lose the accent
            return j + 1
        self.drops.add(name)
        return j  # math follows; handled by the caller


def _single_char(group_tokens: list) -> str | None:
    if len(group_tokens) != 1:
        return None
    kind, val = group_tokens[0]
    if kind == "char":
        return val
    if kind == "cs" and val in ("i", "j"):
        return val
    return None


def _two_chars(group_tokens: list):
    if len(group_tokens) == 2 and all(t[0] == "char" for t in group_tokens):
        return group_tokens[0][1], group_tokens[1][1]
    return None


def _compose(accent: str, base: str) -> str:
    if base in ("ı", "ȷ"):
        base = "i" if base == "ı" else "j"
    return unicodedata.normalize("NFC", base + ACCENTS[accent])


def _canonical(segments: list[Segment]) -> tuple[Segment, ...]:
    cur = list(segments)
    changed = True
    while changed:
        changed = False
        nxt: list[Segment] = []
        for seg in cur:
            if isinstance(seg, Math):
                if not seg.value:
                    changed = True
                    continue
                if nxt and isinstance(nxt[-1], Math):
                    nxt[-1] = Math(nxt[-1].value + " " + seg.value)
                    changed = True
                    continue
                nxt.append(seg)
                continue
            val = unicodedata.normalize("NFC", _WS_RUN.sub(" ", seg.value))
            if val != seg.value:
                changed = True
            if not val:
                changed = True
                continue
            if nxt and isinstance(nxt[-1], Text):
                nxt[-1] = Text(nxt[-1].value + val)
                changed = True
                continue
            nxt.append(Text(val))
        cur = nxt
    if cur and isinstance(cur[0], Text):
        stripped = cur[0].value.lstrip(" ")
        if stripped:
            cur[0] = Text(stripped)
        else:
            cur.pop(0)
    if cur and isinstance(cur[-1], Text):
        stripped = cur[-1].value.rstrip(" ")
        if stripped:
            cur[-1] = Text(stripped)
        else:
            cur.pop()
    return tuple(cur)


def normalize(raw: str | bytes) -> tuple[RichText, NormalizeReport]:
    """Convert a TeX-residue string into RichText plus a report of what was erased.

    Raises NormalizeError with E-BADUTF8 for undecodable bytes and E-UNBALANCED
    for mismatched braces or math delimiters.  Unknown macros never raise: they
    are dropped and recorded in the report.
    """
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise NormalizeError("E-BADUTF8", str(exc)) from exc
    drops = _Drops()
    tokens, _ = _tokenize(raw)
    renderer = _Renderer(drops)
    renderer.walk(tokens)
    rt = RichText(_canonical(renderer.finish()))
    return rt, drops.report()


def expand_accent(accent: str, base: str) -> str:
    """Compose an accent control sequence with a one-character base.

    Returns the precomposed (NFC) character when Unicode has one, otherwise
    base + combining mark.  The dotless \\i and \\j behave as i and j.
    """
    name = accent[1:] if accent.startswith("\\") else accent
    if name not in ACCENTS:
        raise NormalizeError("E-UNSUPPORTED-ACCENT", f"\\{name} is not a known accent")
    if base in ("\\i", "\\j"):
        base = base[1]
    if base in ("ı", "ȷ"):
        base = "i" if base == "ı" else "j"
    if name == "t" and len(base) == 2:
        return base[0] + ACCENTS["t"] + base[1]
    if len(base) != 1:
        raise ValueError("accent base must be a single character")
    return unicodedata.normalize("NFC", base + ACCENTS[name])


def expand_glyph(name: str) -> str:
    """Translate a glyph control sequence (e.g. \\dag, \\ss) to its text form."""
    key = name[1:] if name.startswith("\\") else name
    if key not in GLYPHS:
        raise NormalizeError("E-UNKNOWN-GLYPH", f"\\{key} is not in the glyph table")
    return GLYPHS[key]


def to_plain(rt: RichText) -> str:
    """Flatten to one string, math wrapped back in ``$...$``."""
    parts = []
    for seg in rt.segments:
        if isinstance(seg, Math):
            parts.append("$" + seg.value + "$")
        else:
            parts.append(seg.value)
    return "".join(parts)
