"""Reader/writer for the `|`-separated line files used for rules, config and scripts."""
from pathlib import Path
from typing import Iterator, List, Tuple, Union
import logging

# Configure logging
logger = logging.getLogger(__name__)

SEPARATOR = "|"


def iter_records(text: str, fields: int) -> Iterator[Tuple[int, List[str]]]:
    """Yield (line number, fields) for every record line.

    Comment (`#`) and blank lines are skipped. The last field keeps any further
    separators, so free text may contain `|`. Lines with fewer fields are
    yielded as-is; the caller decides whether that is an error.
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(SEPARATOR, fields - 1)]
        yield lineno, parts


def read_pairs(path: Union[str, Path]) -> List[Tuple[int, str, str]]:
    """Read a `key|value` file into (line, key, value) triples."""
    from .errors import ConfigError

    path = Path(path)
    logger.debug(f"Reading key-value file {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e

    pairs = []
    for lineno, parts in iter_records(text, 2):
        if len(parts) != 2 or not parts[0]:
            raise ConfigError(f"{path}:{lineno}: expected 'key|value'")
        pairs.append((lineno, parts[0], parts[1]))
    return pairs


def format_record(*fields: object) -> str:
    return SEPARATOR.join(str(f) for f in fields)
