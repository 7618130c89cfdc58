"""Command line front end: parse, normalize, validate, emit.

Diagnostics go to stderr, one per line, as ``severity:code:line:message``
(line 0 = not tied to a source line); data goes to stdout or ``--out``.
Exit codes: 0 clean (warnings allowed unless ``--strict``), 1 validation
errors, 2 I/O, encoding or grammar failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import metafile, model, registry
from .diagnostics import CodedError, Diagnostic, error, warning
from .emitters import EmitConfig, emit_crossref, emit_jats, emit_json, emit_xmp
from .textex import to_plain

OK, INVALID, FAILED = 0, 1, 2

FORMATS = ("json", "crossref", "jats", "xmp")
EXTENSIONS = {"json": ".json", "crossref": ".xml", "jats": ".jats.xml", "xmp": ".xmp"}

CONFIG_KEYS = {
    "journal_title", "journal_abbrev", "issn", "doi_prefix", "depositor_name",
    "depositor_email", "registrant", "volume", "issue", "timestamp",
    "landing_url", "ror_endpoint", "funder_endpoint", "cache_path", "cache_ttl",
}

# grammar-level failures mean "this is not a well-formed .meta file"
_PARSE_CODES = {"E-ENCODING", "E-NOHEADER", "E-DUPHEADER", "E-BADKIND",
                "E-BADINDENT", "E-BADFIELD", "E-ORPHANFIELD", "E-DUPKEY"}


def _print_diags(diags: list[Diagnostic]) -> None:
    for diag in diags:
        print(diag.format(), file=sys.stderr)


def _read_config(path: str | None) -> tuple[dict[str, str], list[Diagnostic]]:
    if path is None:
        return {}, []
    values: dict[str, str] = {}
    diags: list[Diagnostic] = []
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        return {}, [error("E-IO", f"cannot read config: {exc}")]
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition(":")
        key = key.strip()
        if not sep or not key:
            diags.append(warning("W-UNKNOWNCONFIG", f"config line {lineno} ignored"))
            continue
        if key not in CONFIG_KEYS:
            diags.append(warning("W-UNKNOWNCONFIG", f"unknown config key {key!r}"))
        values[key] = value.strip()
    return values, diags


class Pipeline:
    """Shared parse -> lower -> check flow with collected diagnostics."""

    def __init__(self, meta_path: str, config: dict[str, str], online: bool):
        self.meta_path = meta_path
        self.config = config
        self.online = online
        self.diags: list[Diagnostic] = []
        self.pm: model.PaperMeta | None = None
        self.status = OK

    def run(self) -> "Pipeline":
        try:
            data = Path(self.meta_path).read_bytes()
        except OSError as exc:
            self.diags.append(error("E-IO", str(exc)))
            self.status = FAILED
            return self
        doc, parse_diags = metafile.parse_meta(data, source_name=self.meta_path)
        self.diags.extend(parse_diags)
        if any(d.is_error for d in parse_diags):
            self.status = FAILED
            return self
        pm, lower_diags = metafile.lower_to_paper_meta(doc)
        self.pm = pm
        self.diags.extend(lower_diags)
        self.diags.extend(model.check_relationships(pm))
        self.diags.extend(model.check_identifiers(pm))
        if self.online:
            self.diags.extend(self._registry_checks(pm))
        if any(d.is_error for d in self.diags):
            self.status = INVALID
        return self

    def _registry_checks(self, pm: model.PaperMeta) -> list[Diagnostic]:
        client = registry.HttpRegistryClient(endpoints={
            ns: self.config[key]
            for ns, key in (("ror", "ror_endpoint"), ("fundref", "funder_endpoint"))
            if key in self.config
        })
        cache_path = self.config.get(
            "cache_path", os.path.expanduser("~/.cache/pubmeta/registry.jsonl"))
        cache = registry.FileCache(cache_path)
        try:
            ttl = float(self.config.get("cache_ttl", 30 * 86400))
        except ValueError:
            ttl = 30 * 86400
        idents = [aff.ror for aff in pm.affiliations if aff.ror is not None]
        idents += [f.funder_id for f in pm.funders if f.funder_id is not None]
        records = []
        diags: list[Diagnostic] = []
        for ident in idents:
            if not model.valid_identifier(ident):
                continue  # already reported by check_identifiers
            try:
                records.append(registry.lookup(ident, client, cache=cache, ttl=ttl))
            except registry.RegistryError as exc:
                code = "W-NOTFOUND" if exc.code == "E-NOTFOUND" else "W-NETWORK"
                diags.append(warning(code, f"{ident.namespace}:{ident.value}: {exc.message}"))
        diags.extend(registry.cross_check(pm, records))
        return diags

    def exit_status(self, strict: bool) -> int:
        if self.status != OK:
            return self.status
        if strict and self.diags:
            return INVALID
        return OK


def _build_emit_config(config: dict[str, str]) -> EmitConfig:
    timestamp = None
    if "timestamp" in config:
        try:
            timestamp = int(config["timestamp"])
        except ValueError:
            raise CodedError("E-NOCONFIG", f"timestamp {config['timestamp']!r} is not an integer")
    return EmitConfig(
        journal_title=config.get("journal_title", ""),
        journal_abbrev=config.get("journal_abbrev", ""),
        issn=config.get("issn"),
        doi_prefix=config.get("doi_prefix", ""),
        depositor_name=config.get("depositor_name", ""),
        depositor_email=config.get("depositor_email", ""),
        registrant=config.get("registrant", ""),
        volume=config.get("volume"),
        issue=config.get("issue"),
        timestamp=timestamp,
        landing_url=config.get("landing_url"),
    )


def cmd_validate(args) -> int:
    config, cfg_diags = _read_config(args.config)
    if any(d.is_error for d in cfg_diags):
        _print_diags(cfg_diags)
        return FAILED
    pipe = Pipeline(args.meta, config, args.online).run()
    _print_diags(cfg_diags + pipe.diags)
    return pipe.exit_status(args.strict)


def cmd_emit(args) -> int:
    config, cfg_diags = _read_config(args.config)
    if any(d.is_error for d in cfg_diags):
        _print_diags(cfg_diags)
        return FAILED
    pipe = Pipeline(args.meta, config, args.online).run()
    _print_diags(cfg_diags + pipe.diags)
    status = pipe.exit_status(args.strict)
    if status != OK:
        return status
    pm = pipe.pm
    assert pm is not None

    if args.doi_from:
        prefix, sep, paperid = args.doi_from.partition(":")
        if not sep:
            print(error("E-BADPAPERID", "--doi-from wants <prefix>:<paperid>").format(),
                  file=sys.stderr)
            return INVALID
        try:
            pm.doi = model.derive_doi(prefix, paperid)
        except CodedError as exc:
            print(exc.as_diagnostic().format(), file=sys.stderr)
            return INVALID

    try:
        cfg = _build_emit_config(config)
    except CodedError as exc:
        print(exc.as_diagnostic().format(), file=sys.stderr)
        return FAILED

    wanted = FORMATS if args.all else (args.format,)
    emitters = {"json": lambda: emit_json(pm), "crossref": lambda: emit_crossref(pm, cfg),
                "jats": lambda: emit_jats(pm, cfg), "xmp": lambda: emit_xmp(pm)}
    outputs: dict[str, str] = {}
    for fmt in wanted:
        try:
            outputs[fmt] = emitters[fmt]()
        except CodedError as exc:
            print(exc.as_diagnostic().format(), file=sys.stderr)
            return FAILED if exc.code in ("E-NOCONFIG", "E-NOLANDING") else INVALID

    if args.all:
        base = Path(args.out) if args.out else Path(args.meta)
        if base.suffix == ".meta":
            base = base.with_suffix("")
        targets = {fmt: base.with_name(base.name + EXTENSIONS[fmt]) for fmt in wanted}
        return _write_atomic({targets[fmt]: outputs[fmt] for fmt in wanted})
    if args.out:
        return _write_atomic({Path(args.out): outputs[wanted[0]]})
    sys.stdout.write(outputs[wanted[0]])
    return OK


def _write_atomic(files: dict[Path, str]) -> int:
    """All-or-nothing: stage every file first, then rename into place."""
    staged: list[tuple[str, Path]] = []
    try:
        for target, content in files.items():
            fd, tmp = tempfile.mkstemp(dir=str(target.parent) or ".",
                                       prefix=f".{target.name}.")
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(content)
            staged.append((tmp, target))
    except OSError as exc:
        for tmp, _ in staged:
            try:
                os.unlink(tmp)
            except OSError:
                pass
        print(error("E-IO", str(exc)).format(), file=sys.stderr)
        return FAILED
    for tmp, target in staged:
        os.replace(tmp, target)
    return OK


def cmd_inspect(args) -> int:
    try:
        data = Path(args.meta).read_bytes()
    except OSError as exc:
        print(error("E-IO", str(exc)).format(), file=sys.stderr)
        return FAILED
    doc, parse_diags = metafile.parse_meta(data, source_name=args.meta)
    if any(d.is_error for d in parse_diags):
        _print_diags(parse_diags)
        return FAILED
    pm, _ = metafile.lower_to_paper_meta(doc)
    out = sys.stdout
    print(f"title: {to_plain(pm.title.main)}", file=out)
    if pm.doi:
        print(f"doi: {pm.doi.value}", file=out)
    print(f"authors: {len(pm.authors)}", file=out)
    for pos, author in enumerate(pm.authors, start=1):
        links = ", ".join(str(i) for i in author.affiliations) or "none"
        orcid = f" orcid:{author.orcid.value}" if author.orcid else ""
        print(f"  {pos}. {author.name} (affiliations: {links}){orcid}", file=out)
    print(f"affiliations: {len(pm.affiliations)}", file=out)
    for aff in pm.affiliations:
        print(f"  {aff.index}. {aff.name}", file=out)
    print(f"funders: {len(pm.funders)}", file=out)
    for funder in pm.funders:
        grant = f" (grant {funder.grantid})" if funder.grantid else ""
        print(f"  - {funder.name}{grant}", file=out)
    print(f"citations: {len(pm.citations)}", file=out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pubmeta",
        description="Validate article .meta files and emit publishing metadata.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("meta", help="path to the .meta file")
    common.add_argument("--config", help="journal config file (key: value lines)")
    common.add_argument("--strict", action="store_true",
                        help="promote warnings to errors (exit 1)")
    common.add_argument("--online", action="store_true",
                        help="verify ROR/funder ids against their registries")
    common.add_argument("--diag-json", action="store_true",
                        help="(reserved) JSON diagnostics; not implemented yet")

    p_validate = sub.add_parser("validate", parents=[common],
                                help="check the file and print diagnostics")
    p_validate.set_defaults(func=cmd_validate)

    p_emit = sub.add_parser("emit", parents=[common], help="write an output format")
    group = p_emit.add_mutually_exclusive_group()
    group.add_argument("--format", choices=FORMATS, help="format to emit")
    group.add_argument("--all", action="store_true",
                       help="write all four formats next to the input")
    p_emit.add_argument("--out", help="output path (with --all: base path)")
    p_emit.add_argument("--doi-from", metavar="PREFIX:PAPERID",
                        help="derive the DOI when the file carries none")
    p_emit.set_defaults(func=cmd_emit)

    p_inspect = sub.add_parser("inspect", help="print a human-readable summary")
    p_inspect.add_argument("meta", help="path to the .meta file")
    p_inspect.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "diag_json", False):
        print("error:E-IO:0:--diag-json is reserved and not implemented", file=sys.stderr)
        return FAILED
    if args.func is cmd_emit and not args.all and not args.format:
        print("error:E-IO:0:emit needs --format or --all", file=sys.stderr)
        return FAILED
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
