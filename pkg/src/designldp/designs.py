"""Set systems, duals, incidence matrices and (r, lambda)-design classification.

Points are 0-based. A :class:`SetSystem` plays the role of ``(X, B)``: its
points are the raw outcomes and its blocks index the randomised reports.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from .errors import (
    DuplicateIndexInBlock,
    EmptyBlock,
    FullBlock,
    IndexOutOfRange,
    InvalidK,
    UncoveredPoint,
    UnknownName,
    WouldCreateEmptyBlock,
)
from .linalg import RationalMatrix


@dataclass(frozen=True, eq=False)
class SetSystem:
    """Points ``0..point_count-1`` and an ordered list of blocks.

    Build instances through :func:`validate_set_system`; the constructor
    trusts its input. Equality compares the blocks as a multiset, so two
    systems that list the same blocks in a different order are equal.
    """

    point_count: int
    blocks: tuple[tuple[int, ...], ...]
    name: Optional[str] = field(default=None, compare=False)

    @property
    def v(self) -> int:
        return self.point_count

    @property
    def b(self) -> int:
        return len(self.blocks)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetSystem):
            return NotImplemented
        return self.point_count == other.point_count and Counter(self.blocks) == Counter(other.blocks)

    def __hash__(self):
        return hash((self.point_count, tuple(sorted(self.blocks))))

    def block_sizes(self) -> list[int]:
        return [len(B) for B in self.blocks]

    def replication_counts(self) -> list[int]:
        counts = [0] * self.point_count
        for B in self.blocks:
            for x in B:
                counts[x] += 1
        return counts

    def to_dict(self) -> dict:
        d = {"points": self.point_count, "blocks": [list(B) for B in self.blocks]}
        if self.name is not None:
            d = {"name": self.name, **d}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def validate_set_system(point_count: int, blocks: Sequence[Sequence[int]], name: str | None = None) -> SetSystem:
    if not isinstance(point_count, int) or isinstance(point_count, bool) or point_count < 1:
        raise IndexOutOfRange(f"point_count must be a positive integer, got {point_count!r}")
    if len(blocks) == 0:
        raise UncoveredPoint("a set system needs at least one block")
    canon = []
    covered = [False] * point_count
    for i, block in enumerate(blocks):
        block = [int(x) for x in block]
        if not block:
            raise EmptyBlock(f"block {i} is empty")
        for x in block:
            if not 0 <= x < point_count:
                raise IndexOutOfRange(f"block {i} contains {x}, outside [0, {point_count})")
        if len(set(block)) != len(block):
            raise DuplicateIndexInBlock(f"block {i} repeats a point: {block}")
        if len(block) == point_count:
            raise FullBlock(f"block {i} is the whole point set")
        for x in block:
            covered[x] = True
        canon.append(tuple(sorted(block)))
    missing = [x for x, c in enumerate(covered) if not c]
    if missing:
        raise UncoveredPoint(f"points {missing} occur in no block")
    return SetSystem(point_count, tuple(canon), name)


def design_from_dict(d: dict) -> SetSystem:
    try:
        return validate_set_system(d["points"], d["blocks"], d.get("name"))
    except KeyError as exc:
        raise IndexOutOfRange(f"design JSON is missing field {exc}") from None


def design_from_json(text: str) -> SetSystem:
    return design_from_dict(json.loads(text))


def dual(s: SetSystem) -> SetSystem:
    """Swap points and blocks (transpose of the incidence matrix).

    Raises FullBlock if some point of ``s`` lies in every block, since that
    dual block would be the whole dual point set.
    """
    dual_blocks: list[list[int]] = [[] for _ in range(s.point_count)]
    for i, B in enumerate(s.blocks):
        for x in B:
            dual_blocks[x].append(i)
    return validate_set_system(s.b, dual_blocks)


class DesignKind(str, Enum):
    GENERAL = "GENERAL"
    R_LAMBDA_DESIGN = "R_LAMBDA_DESIGN"
    BIBD = "BIBD"


@dataclass(frozen=True)
class DesignProfile:
    v: int
    b: int
    replication: Optional[int]
    index: Optional[int]
    block_size: Optional[int]
    kind: DesignKind

    @property
    def r(self) -> int:
        return self.replication

    @property
    def lam(self) -> int:
        return self.index

    @property
    def k(self) -> int:
        return self.block_size

    @property
    def is_pure(self) -> bool:
        return self.kind is not DesignKind.GENERAL

    @property
    def parameters(self) -> tuple | None:
        """``(v, b, r, k, lambda)`` for a BIBD, else None."""
        if self.kind is DesignKind.BIBD:
            return (self.v, self.b, self.replication, self.block_size, self.index)
        return None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "v": self.v,
            "b": self.b,
            "r": self.replication,
            "lambda": self.index,
            "k": self.block_size,
        }


def pair_indices(s: SetSystem) -> dict[tuple[int, int], int]:
    """Number of blocks containing each unordered pair ``(x, y)``, ``x < y``."""
    counts = {pair: 0 for pair in combinations(range(s.point_count), 2)}
    for B in s.blocks:
        for pair in combinations(B, 2):
            counts[pair] += 1
    return counts


def classify(s: SetSystem) -> DesignProfile:
    reps = set(s.replication_counts())
    replication = reps.pop() if len(reps) == 1 else None
    idx = set(pair_indices(s).values())
    # a single point has no pairs; treat the index as 0
    index = (idx.pop() if idx else 0) if len(idx) <= 1 else None
    sizes = set(s.block_sizes())
    block_size = sizes.pop() if len(sizes) == 1 else None

    if replication is not None and index is not None:
        kind = DesignKind.BIBD if block_size is not None else DesignKind.R_LAMBDA_DESIGN
    else:
        kind = DesignKind.GENERAL
    return DesignProfile(s.point_count, s.b, replication, index, block_size, kind)


def incidence_matrix(s: SetSystem) -> RationalMatrix:
    """``b x v`` 0/1 matrix; entry ``(i, j)`` is 1 iff point j is in block i."""
    return RationalMatrix([[1 if x in set(B) else 0 for x in range(s.point_count)] for B in s.blocks])


def k_subset_design(v: int, k: int) -> SetSystem:
    """All k-subsets of ``v`` points in lexicographic order."""
    if not (isinstance(k, int) and isinstance(v, int)) or k <= 0 or k >= v:
        raise InvalidK(f"need 1 <= k < v, got v={v}, k={k}")
    return validate_set_system(v, list(combinations(range(v), k)), name=f"k-subsets-{v}-{k}")


def delete_point(s: SetSystem, p: int) -> SetSystem:
    if not 0 <= p < s.point_count:
        raise IndexOutOfRange(f"point {p} outside [0, {s.point_count})")
    new_blocks = []
    for i, B in enumerate(s.blocks):
        if B == (p,):
            raise WouldCreateEmptyBlock(f"block {i} contains only point {p}")
        new_blocks.append([x - (x > p) for x in B if x != p])
    return validate_set_system(s.point_count - 1, new_blocks)


# ---------------------------------------------------------------------------
# catalog

_FANO = [[0, 1, 3], [1, 2, 4], [2, 3, 5], [3, 4, 6], [4, 5, 0], [5, 6, 1], [6, 0, 2]]

_AG23 = [
    [0, 1, 2], [3, 4, 5], [6, 7, 8],
    [0, 3, 6], [1, 4, 7], [2, 5, 8],
    [0, 4, 8], [1, 5, 6], [2, 3, 7],
    [0, 5, 7], [1, 3, 8], [2, 4, 6],
]


def _develop_z5xz5(base_blocks) -> list[list[int]]:
    # point (a, b) of Z5 x Z5 is labelled 5a + b
    out = []
    for base in base_blocks:
        for da in range(5):
            for db in range(5):
                out.append(sorted(((a + da) % 5) * 5 + (b + db) % 5 for a, b in base))
    return out


# A (25, 4, 1) difference family in Z5 x Z5: the 24 differences of the two
# base blocks cover every nonzero group element exactly once.
_S2_4_25_BASE = (((0, 0), (0, 1), (1, 0), (2, 2)), ((0, 0), (0, 2), (1, 3), (3, 2)))

_CATALOG = {
    "warner": (2, [[0], [1]], "randomised response on two outcomes, (2,2,1,1,0)-BIBD"),
    "pairs-4": (4, [list(c) for c in combinations(range(4), 2)], "all pairs of 4 points, (4,6,3,2,1)-BIBD"),
    "fano": (7, _FANO, "Fano plane, (7,7,3,3,1)-BIBD"),
    "fano-minus-point": (
        6,
        [[0, 1, 3], [1, 2, 4], [2, 3, 5], [3, 4], [4, 5, 0], [5, 1], [0, 2]],
        "Fano plane with point 7 deleted, a (3,1)-design that is not a BIBD",
    ),
    "ag23": (9, _AG23, "affine plane of order 3, (9,12,4,3,1)-BIBD"),
    "bibd-25-4-1": (25, _develop_z5xz5(_S2_4_25_BASE), "(25,50,8,4,1)-BIBD from a difference family in Z5 x Z5"),
}

CATALOG_PARAMETERS = {
    "warner": ("BIBD", 2, 2, 1, 1, 0),
    "pairs-4": ("BIBD", 4, 6, 3, 2, 1),
    "fano": ("BIBD", 7, 7, 3, 3, 1),
    "fano-minus-point": ("R_LAMBDA_DESIGN", 6, 7, 3, None, 1),
    "ag23": ("BIBD", 9, 12, 4, 3, 1),
    "bibd-25-4-1": ("BIBD", 25, 50, 8, 4, 1),
}
"""Advertised ``(kind, v, b, r, k, lambda)`` per catalog entry."""


def catalog_names() -> list[str]:
    return list(_CATALOG)


def catalog_description(name: str) -> str:
    if name not in _CATALOG:
        raise UnknownName(f"no catalog design named {name!r}")
    return _CATALOG[name][2]


def catalog_lookup(name: str) -> SetSystem:
    try:
        v, blocks, _ = _CATALOG[name]
    except KeyError:
        raise UnknownName(f"no catalog design named {name!r}; known: {', '.join(_CATALOG)}") from None
    return validate_set_system(v, blocks, name=name)
