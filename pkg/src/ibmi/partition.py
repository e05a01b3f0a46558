"""Index-set partitions that drive the block sweep.

A partition is an ordered list of index sets covering ``{0..p-1}``;
consecutive sets may share indices (overlap).  Contiguous partitions extend
each base block by ``h = round(f * m)`` indices into every existing
neighbor, so the first and last sets have ``m + h`` entries and interior
sets ``m + 2h``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DuplicateWithinSet,
    IndexOutOfRange,
    InvalidOverlap,
    TooManyBlocks,
    UncoveredIndices,
)

__all__ = [
    "Partition",
    "complement",
    "contiguous_partition",
    "load_partition_json",
    "overlap_depth",
    "red_black_partition",
    "validate",
]

CONTIGUOUS = "contiguous"
RED_BLACK = "red-black"
CUSTOM = "custom"


@dataclass(frozen=True)
class Partition:
    p: int
    sets: list[np.ndarray] = field(repr=False)
    overlap_fraction: float = 0.0
    ordering: str = CONTIGUOUS

    @property
    def k(self) -> int:
        return len(self.sets)


def overlap_depth(m: int, overlap_fraction: float) -> int:
    """Overlap depth per side: ``round(f * m)`` with half-up ties."""
    if not 0.0 <= overlap_fraction < 0.5:
        raise InvalidOverlap(
            f"overlap fraction must lie in [0, 0.5), got {overlap_fraction}"
        )
    return int(np.floor(overlap_fraction * m + 0.5))


def contiguous_partition(p: int, k: int, overlap_fraction: float = 0.0) -> Partition:
    """Split ``{0..p-1}`` into ``k`` contiguous blocks with symmetric overlap.

    The base block size is ``m = p // k`` (the last block absorbs the
    remainder); every block then grows by ``h`` indices into each existing
    neighbor.
    """
    if k < 2:
        raise ValueError(f"need at least 2 blocks, got {k}")
    if p < 2 * k:
        raise TooManyBlocks(f"p={p} is too small for {k} blocks of size >= 2")
    m = p // k
    h = overlap_depth(m, overlap_fraction)
    if 2 * h > m:
        raise TooManyBlocks(
            f"overlap depth {h} exceeds half the base block size {m}; "
            "blocks would chain into non-neighbors"
        )
    sets = []
    for j in range(k):
        lo = j * m - (h if j > 0 else 0)
        hi = ((j + 1) * m if j < k - 1 else p) + (h if j < k - 1 else 0)
        sets.append(np.arange(lo, hi, dtype=np.intp))
    return Partition(p=p, sets=sets, overlap_fraction=overlap_fraction, ordering=CONTIGUOUS)


def red_black_partition(p: int) -> Partition:
    """Two non-overlapping sets: alternating positions, starting with 0."""
    if p < 4:
        raise ValueError(f"need p >= 4 for a red-black split, got {p}")
    sets = [np.arange(0, p, 2, dtype=np.intp), np.arange(1, p, 2, dtype=np.intp)]
    return Partition(p=p, sets=sets, overlap_fraction=0.0, ordering=RED_BLACK)


def complement(part: Partition, j: int) -> np.ndarray:
    """Ascending list of the indices outside set ``j``."""
    mask = np.ones(part.p, dtype=bool)
    mask[part.sets[j]] = False
    return np.flatnonzero(mask).astype(np.intp)


def validate(part: Partition) -> None:
    """Check coverage and per-set invariants; raises on the first violation."""
    if part.k < 2:
        raise ValueError(f"partition needs at least 2 sets, got {part.k}")
    covered = np.zeros(part.p, dtype=bool)
    for j, idx in enumerate(part.sets):
        idx = np.asarray(idx)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError(f"set {j} must be a nonempty 1-D index list")
        if idx.min() < 0 or idx.max() >= part.p:
            raise IndexOutOfRange(f"set {j} has indices outside [0, {part.p})")
        if np.unique(idx).size != idx.size:
            raise DuplicateWithinSet(f"set {j} contains repeated indices")
        if part.ordering == CONTIGUOUS and not np.array_equal(
            idx, np.arange(idx.min(), idx.max() + 1)
        ):
            raise ValueError(f"set {j} is not a contiguous range")
        covered[idx] = True
    if not covered.all():
        raise UncoveredIndices(np.flatnonzero(~covered).tolist())


def load_partition_json(source) -> Partition:
    """Load a custom partition from ``{"p": int, "sets": [[int, ...], ...]}``.

    ``source`` may be a mapping, a JSON string, or a path to a JSON file.
    """
    if isinstance(source, dict):
        payload = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            payload = json.loads(text)
        else:
            with open(text) as fh:
                payload = json.load(fh)
    sets = [np.asarray(s, dtype=np.intp) for s in payload["sets"]]
    part = Partition(p=int(payload["p"]), sets=sets, overlap_fraction=0.0, ordering=CUSTOM)
    validate(part)
    return part
