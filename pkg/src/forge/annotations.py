"""Line grammar for transaction annotations.

    transaction <name>: req.valid=<port> [req.ready=<port>] [req.data=<p1>,<p2>]
                        resp.valid=<port> [resp.ready=<port>] [resp.data=...]
                        [attrs=stable_data,eventual_response]
"""
from typing import Dict, List
import logging
import re

from ..errors import MalformedAnnotation, UnknownPort
from ..frontend import RtlModule
from .models import AnnotationSet, Attribute, HandshakeGroup, TransactionAnnotation

# Configure logging
logger = logging.getLogger(__name__)

_HEAD_RE = re.compile(r"^transaction\s+([A-Za-z_]\w*)\s*:\s*(.*)$")
_KEYS = {"req.valid", "req.ready", "req.data", "resp.valid", "resp.ready", "resp.data", "attrs"}


def _group(fields: Dict[str, str], prefix: str, lineno: int) -> HandshakeGroup:
    valid = fields.get(f"{prefix}.valid")
    if not valid:
        raise MalformedAnnotation(f"{prefix}.valid is required", lineno)
    data = [d.strip() for d in fields.get(f"{prefix}.data", "").split(",") if d.strip()]
    return HandshakeGroup(valid=valid, ready=fields.get(f"{prefix}.ready") or None, data=data)


def _parse_line(body: str, name: str, lineno: int) -> TransactionAnnotation:
    fields: Dict[str, str] = {}
    for item in body.split():
        key, sep, value = item.partition("=")
        if not sep or not value:
            raise MalformedAnnotation(f"expected key=value, got {item!r}", lineno)
        if key not in _KEYS:
            raise MalformedAnnotation(f"unknown key {key!r}", lineno)
        if key in fields:
            raise MalformedAnnotation(f"{key} given twice", lineno)
        fields[key] = value

    attributes = set()
    for attr in filter(None, fields.get("attrs", "").split(",")):
        try:
            attributes.add(Attribute(attr))
        except ValueError:
            raise MalformedAnnotation(f"unknown attribute {attr!r}", lineno) from None
    return TransactionAnnotation(
        name=name,
        request=_group(fields, "req", lineno),
        response=_group(fields, "resp", lineno),
        attributes=frozenset(attributes),
    )


def parse_annotation_set(text: str, module: RtlModule) -> AnnotationSet:
    ports = set(module.port_names)
    annotations: List[TransactionAnnotation] = []
    unknown = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _HEAD_RE.match(line)
        if not m:
            if line.startswith("transaction"):
                raise MalformedAnnotation("expected 'transaction <name>: ...'", lineno)
            logger.warning(f"Annotation line {lineno} is not a transaction, ignored: {line[:60]}")
            unknown.append((lineno, line))
            continue
        annotation = _parse_line(m.group(2), m.group(1), lineno)
        for group in (annotation.request, annotation.response):
            for port in group.ports:
                if port not in ports:
                    raise UnknownPort(f"line {lineno}: {port} is not a port of {module.name}")
        annotations.append(annotation)
    logger.debug(f"Parsed {len(annotations)} transaction annotation(s) for {module.name}")
    return AnnotationSet(annotations=annotations, unknown_lines=unknown)


def parse_annotations(text: str, module: RtlModule) -> List[TransactionAnnotation]:
    return parse_annotation_set(text, module).annotations
