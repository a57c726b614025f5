from pathlib import Path
from typing import Union
import json
import logging

from ..digest import sha256_hex
from ..sva import parse_batch
from .emit import BIND_PATH, engine_path, prop_path
from .models import FtArtifact

# Configure logging
logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def ft_dir(out_dir: Union[str, Path], design: str) -> Path:
    return Path(out_dir) / "ft" / design


def write_ft(artifact: FtArtifact, out_dir: Union[str, Path]) -> Path:
    """Write `ft/<design>/` under `out_dir` with a manifest of content hashes."""
    root = ft_dir(out_dir, artifact.design)
    entries = []
    for relative, content in artifact.files:
        path = root / relative
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
        entries.append({"path": relative, "sha256": sha256_hex(content)})
    manifest = {
        "design": artifact.design,
        "top": artifact.top,
        "assertions": artifact.assertion_names,
        "files": entries,
    }
    (root / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    logger.debug(f"Wrote FT for {artifact.design} to {root} ({len(entries)} files)")
    return root


def load_ft(directory: Union[str, Path]) -> FtArtifact:
    """Read an FT back through its manifest; edited files are taken as they are."""
    root = Path(directory)
    manifest = json.loads((root / MANIFEST).read_text(encoding="utf-8"))
    design = manifest["design"]
    files = []
    for entry in manifest["files"]:
        content = (root / entry["path"]).read_text(encoding="utf-8")
        if sha256_hex(content) != entry["sha256"]:
            logger.debug(f"{entry['path']} changed since it was emitted")
        files.append((entry["path"], content))

    by_path = dict(files)
    property_text = by_path[prop_path(design)]
    return FtArtifact(
        design=design,
        property_module_text=property_text,
        bind_text=by_path[BIND_PATH],
        engine_config_text=by_path[engine_path(design)],
        files=files,
        batch=parse_batch(property_text),
    )
