from .annotations import parse_annotation_set, parse_annotations
from .emit import (
    BIND_PATH, design_path, emit_engine_config, emit_ft, emit_liveness, emit_scaffold, engine_path,
    prop_path,
)
from .models import (
    AnnotationSet, Attribute, EngineMode, EngineOptions, FtArtifact, FtOptions, HandshakeGroup,
    TransactionAnnotation,
)
from .store import MANIFEST, ft_dir, load_ft, write_ft

__all__ = [
    "AnnotationSet",
    "Attribute",
    "BIND_PATH",
    "EngineMode",
    "EngineOptions",
    "FtArtifact",
    "FtOptions",
    "HandshakeGroup",
    "MANIFEST",
    "TransactionAnnotation",
    "design_path",
    "emit_engine_config",
    "emit_ft",
    "emit_liveness",
    "emit_scaffold",
    "engine_path",
    "ft_dir",
    "load_ft",
    "parse_annotation_set",
    "parse_annotations",
    "prop_path",
    "write_ft",
]
