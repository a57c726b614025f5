from collections import Counter
from typing import List, Sequence
import logging

from .models import Assertion, AssertionBatch, BatchDiff, Fragment

# Configure logging
logger = logging.getLogger(__name__)


def _free_name(name: str, used: set) -> str:
    n = 1
    while f"{name}_dup{n}" in used:
        n += 1
    return f"{name}_dup{n}"


def dedup(batches: Sequence[AssertionBatch]) -> AssertionBatch:
    """Merge batches in order; identical expressions collapse, clashing names get `_dupN`."""
    seen = set()
    used = set()
    merged: List[Assertion] = []
    residue: List[Fragment] = []
    for batch in batches:
        residue.extend(batch.residue)
        for a in batch.assertions:
            if a.identity in seen:
                continue
            seen.add(a.identity)
            if a.name in used:
                a = a.renamed(_free_name(a.name, used))
            used.add(a.name)
            merged.append(a)
    logger.debug(f"Merged {len(batches)} batch(es) into {len(merged)} assertions")
    return AssertionBatch(id=batches[0].id if batches else 0, assertions=merged, residue=residue)


def diff_batches(a: AssertionBatch, b: AssertionBatch) -> BatchDiff:
    counts_a = Counter(x.identity for x in a.assertions)
    counts_b = Counter(x.identity for x in b.assertions)
    identical = sum((counts_a & counts_b).values())

    left_budget = counts_a - counts_b
    right_budget = counts_b - counts_a
    left = []
    for x in a.assertions:
        if left_budget[x.identity] > 0:
            left_budget[x.identity] -= 1
            left.append(x)
    right = []
    for x in b.assertions:
        if right_budget[x.identity] > 0:
            right_budget[x.identity] -= 1
            right.append(x)

    variants = 0
    for x in left[:]:
        match = next((y for y in right if y.signal_names == x.signal_names), None)
        if match is not None:
            variants += 1
            left.remove(x)
            right.remove(match)
    return BatchDiff(identical=identical, variants=variants, only_a=len(left), only_b=len(right))
