"""Equivalence relations on {0..n-1} in canonical class-id-vector form.

Canonical form: class ids appear in increasing order of first occurrence,
so class_ids[0] == 0 and each new id is the previous maximum plus one.
With that convention the blocks come out ordered by least element, which
matches the text form `0 1 | 2`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import AlgebraError


class DisjointSet:
    """Array-based union-find with path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True

    def class_ids(self) -> list:
        return [self.find(x) for x in range(len(self.parent))]


def _canonical(ids: Sequence[int]) -> tuple:
    remap: dict = {}
    out = []
    for v in ids:
        if v not in remap:
            remap[v] = len(remap)
        out.append(remap[v])
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    size: int
    class_ids: tuple

    def __post_init__(self):
        if self.size < 1:
            raise AlgebraError(f"partition size must be >= 1, got {self.size}")
        if len(self.class_ids) != self.size:
            raise AlgebraError(
                f"partition over size {self.size} needs {self.size} class ids, "
                f"got {len(self.class_ids)}")
        object.__setattr__(self, "class_ids", _canonical(self.class_ids))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(n: int) -> "Partition":
        """The identity partition: all classes singletons."""
        return Partition(n, tuple(range(n)))

    @staticmethod
    def one(n: int) -> "Partition":
        """The single-class partition."""
        return Partition(n, (0,) * n)

    @staticmethod
    def from_blocks(n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        ids = [-1] * n
        for i, block in enumerate(blocks):
            for x in block:
                if not 0 <= x < n:
                    raise AlgebraError(f"element {x} out of range 0..{n - 1}")
                if ids[x] != -1:
                    raise AlgebraError(f"element {x} appears in two blocks")
                ids[x] = i
        if -1 in ids:
            raise AlgebraError(f"element {ids.index(-1)} missing from the blocks")
        return Partition(n, tuple(ids))

    @staticmethod
    def from_pairs(n: int, pairs: Iterable[tuple]) -> "Partition":
        """Least equivalence relation containing the given pairs."""
        ds = DisjointSet(n)
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise AlgebraError(f"pair ({a}, {b}) out of range 0..{n - 1}")
            ds.union(a, b)
        return Partition(n, tuple(ds.class_ids()))

    @staticmethod
    def parse(text: str, n: int) -> "Partition":
        """Parse the `0 1 | 2` text form; every element must be listed once."""
        ids = [-1] * n
        nclasses = 0
        for chunk in text.split("|"):
            members = chunk.split()
            if not members:
                raise AlgebraError(f"empty class in partition text {text!r}")
            for tok in members:
                try:
                    x = int(tok)
                except ValueError:
                    raise AlgebraError(f"bad element {tok!r} in partition text") from None
                if not 0 <= x < n:
                    raise AlgebraError(f"element {x} out of range 0..{n - 1}")
                if ids[x] != -1:
                    raise AlgebraError(f"element {x} listed twice in partition text")
                ids[x] = nclasses
            nclasses += 1
        if -1 in ids:
            raise AlgebraError(
                f"element {ids.index(-1)} missing from partition text {text!r}")
        return Partition(n, tuple(ids))

    # -- queries -----------------------------------------------------------

    @property
    def num_classes(self) -> int:
        return max(self.class_ids) + 1

    @property
    def is_zero(self) -> bool:
        return self.num_classes == self.size

    @property
    def is_one(self) -> bool:
        return self.num_classes == 1

    def related(self, a: int, b: int) -> bool:
        return self.class_ids[a] == self.class_ids[b]

    def blocks(self) -> list:
        out = [[] for _ in range(self.num_classes)]
        for x, c in enumerate(self.class_ids):
            out[c].append(x)
        return [tuple(b) for b in out]

    def block_of(self, x: int) -> tuple:
        c = self.class_ids[x]
        return tuple(i for i, ci in enumerate(self.class_ids) if ci == c)

    def pairs(self):
        """All related ordered pairs, including the diagonal."""
        for block in self.blocks():
            for a in block:
                for b in block:
                    yield (a, b)

    def refines(self, other: "Partition") -> bool:
        """True when every class of self lies inside a class of other."""
        self._check_size(other)
        seen: dict = {}
        for c_self, c_other in zip(self.class_ids, other.class_ids):
            if seen.setdefault(c_self, c_other) != c_other:
                return False
        return True

    def __le__(self, other):
        return self.refines(other)

    def __lt__(self, other):
        return self != other and self.refines(other)

    # -- lattice operations --------------------------------------------------

    def _check_size(self, other: "Partition"):
        if self.size != other.size:
            raise AlgebraError(
                f"partition size mismatch: {self.size} vs {other.size}")

    def join(self, other: "Partition") -> "Partition":
        """Transitive closure of the union."""
        self._check_size(other)
        ds = DisjointSet(self.size)
        for p in (self, other):
            for block in p.blocks():
                for a, b in zip(block, block[1:]):
                    ds.union(a, b)
        return Partition(self.size, tuple(ds.class_ids()))

    def meet(self, other: "Partition") -> "Partition":
        """Common refinement."""
        self._check_size(other)
        return Partition(self.size, tuple(
            zip(self.class_ids, other.class_ids)))  # type: ignore[arg-type]

    def __str__(self):
        return " | ".join(" ".join(str(x) for x in block) for block in self.blocks())

    def json_classes(self) -> list:
        """Blocks as lists of ints, sorted by least element."""
        return [list(b) for b in self.blocks()]


def join_partitions(p: Partition, q: Partition) -> Partition:
    return p.join(q)


def meet_partitions(p: Partition, q: Partition) -> Partition:
    return p.meet(q)


def all_partitions(n: int):
    """Every partition of {0..n-1}, in a deterministic order."""
    if n == 1:
        yield Partition.one(1)
        return
    # grow by assigning each element to an existing class or a new one
    def rec(prefix, nclasses):
        if len(prefix) == n:
            yield Partition(n, tuple(prefix))
            return
        for c in range(nclasses + 1):
            yield from rec(prefix + [c], max(nclasses, c + 1))
    yield from rec([0], 1)
