"""Optional lookups against public identifier registries (ROR, funder registry).

Strictly additive: nothing else in the package needs this module, and the
default client is offline (every lookup answers status=unknown).  Results are
cached in an append-only JSONL file so repeated pipeline runs stay quiet.
"""

from __future__ import annotations

import json
import time
import unicodedata
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .diagnostics import CodedError, Diagnostic, warning
from .model import Identifier, PaperMeta, valid_identifier

ACTIVE = "active"
WITHDRAWN = "withdrawn"
UNKNOWN = "unknown"

DEFAULT_ENDPOINTS = {
    "ror": "https://api.ror.org/organizations/{value}",
    "fundref": "https://api.crossref.org/funders/{value}",
}


class RegistryError(CodedError):
    """Lookup failure: E-NETWORK (transport) or E-NOTFOUND (no such id)."""


@dataclass(frozen=True)
class RegistryRecord:
    identifier: Identifier
    canonical_name: str
    status: str  # active | withdrawn | unknown
    fetched_at: float | None  # set iff status != unknown


class HttpRegistryClient:
    """Talks to the public JSON endpoints; injectable and replaceable in tests."""

    def __init__(self, endpoints: dict[str, str] | None = None, timeout: float = 10.0):
        self.endpoints = dict(DEFAULT_ENDPOINTS)
        if endpoints:
            self.endpoints.update(endpoints)
        self.timeout = timeout

    def fetch(self, ident: Identifier) -> tuple[str, str]:
        template = self.endpoints.get(ident.namespace)
        if template is None:
            raise RegistryError("E-NOTFOUND", f"no endpoint for namespace {ident.namespace}")
        url = template.replace("{value}", ident.value)
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                data = json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            if exc.code == 404:
                raise RegistryError("E-NOTFOUND", f"{ident.namespace}:{ident.value}") from exc
            raise RegistryError("E-NETWORK", f"HTTP {exc.code} from {url}") from exc
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise RegistryError("E-NETWORK", str(exc)) from exc
        if ident.namespace == "ror":
            return data.get("name", ""), data.get("status", ACTIVE)
        message = data.get("message", {})
        return message.get("name", ""), ACTIVE


class FileCache:
    """Append-only JSONL cache keyed by namespace:value; last entry wins."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def get(self, key: str, ttl: float, now: float) -> tuple[str, str, float] | None:
        try:
            lines = self.path.read_text("utf-8").splitlines()
        except FileNotFoundError:
            return None
        hit = None
        for line in lines:
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                continue
            if entry.get("key") == key:
                hit = entry
        if hit is None:
            return None
        fetched_at = float(hit["fetched_at"])
        if now - fetched_at > ttl:
            return None
        return hit["name"], hit["status"], fetched_at

    def put(self, key: str, name: str, status: str, fetched_at: float) -> None:
        line = json.dumps(
            {"key": key, "name": name, "status": status, "fetched_at": fetched_at},
            ensure_ascii=False,
        )
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            try:
                import fcntl
                fcntl.flock(fh, fcntl.LOCK_EX)
            except ImportError:
                pass
            fh.write(line + "\n")


def lookup(ident: Identifier, client, cache: FileCache | None = None,
           ttl: float = 30 * 86400, now=time.time) -> RegistryRecord:
    """Resolve one identifier through the injected client, with caching.

    Precondition: the identifier passes its syntactic validator; violations
    raise ValueError before any client call.  client=None is the offline mode
    and deterministically answers status=unknown.
    """
    if not valid_identifier(ident):
        raise ValueError(f"refusing lookup of invalid identifier {ident.namespace}:{ident.value}")
    if client is None:
        return RegistryRecord(ident, "", UNKNOWN, None)
    key = f"{ident.namespace}:{ident.value}"
    stamp = now()
    if cache is not None:
        hit = cache.get(key, ttl, stamp)
        if hit is not None:
            name, status, fetched_at = hit
            return RegistryRecord(ident, name, status, fetched_at)
    name, status = client.fetch(ident)  # may raise RegistryError
    if cache is not None:
        cache.put(key, name, status, stamp)
    return RegistryRecord(ident, name, status, stamp)


def _fold(name: str) -> str:
    """Case folding plus diacritic stripping; nothing fuzzier than that."""
    decomposed = unicodedata.normalize("NFKD", name.casefold())
    return "".join(c for c in decomposed if not unicodedata.combining(c))


def cross_check(pm: PaperMeta, records: list[RegistryRecord]) -> list[Diagnostic]:
    """Compare display names in the article against registry canonical names."""
    by_key = {f"{r.identifier.namespace}:{r.identifier.value}": r for r in records}
    diags: list[Diagnostic] = []

    def check(display_name: str, ident: Identifier, what: str) -> None:
        rec = by_key.get(f"{ident.namespace}:{ident.value}")
        if rec is None or rec.status == UNKNOWN:
            return
        if rec.status == WITHDRAWN:
            diags.append(warning("W-WITHDRAWN", f"{what}: {ident.value} is withdrawn"))
        if rec.canonical_name and _fold(display_name) != _fold(rec.canonical_name):
            diags.append(warning(
                "W-NAMEMISMATCH",
                f"{what}: {display_name!r} vs registry {rec.canonical_name!r}"))

    for aff in pm.affiliations:
        if aff.ror is not None:
            check(aff.name, aff.ror, f"affiliation {aff.index}")
    for pos, funder in enumerate(pm.funders, start=1):
        if funder.funder_id is not None:
            check(funder.name, funder.funder_id, f"funder {pos}")
    return diags
