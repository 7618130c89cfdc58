"""Serializers from the article model to the downstream publishing formats."""

from .common import EmitConfig
from .crossref import emit_crossref
from .jats import emit_jats
from .jsonio import JsonSchemaError, emit_json, parse_json
from .xmp import emit_xmp

__all__ = [
    "EmitConfig",
    "JsonSchemaError",
    "emit_crossref",
    "emit_jats",
    "emit_json",
    "emit_xmp",
    "parse_json",
]
