"""Builders for the standard example algebras and a seeded corpus generator.

The named examples exposed through the CLI:

  e3   three elements {0,1,2}: d is mod-2 addition on {0,1} with 2
       absorbing, wedge(x,y) = d(x,x,y); regular SMB over 0 1 | 2
  b2   one Mal'cev block: d = x+y+z mod 2, wedge = second projection
  s2   the two-element chain semilattice with d = (x^y)^z
  n4   two mod-2 blocks glued over a two-chain with a wrong cross-class
       representative (0^2 = 3); SMB but not regular

Glued algebras put wedge(a, b) = b inside a block and the representative
of the meet class across blocks, and d(a, b, c) = the block Mal'cev
operation inside a block and (a^b)^c across blocks.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional

from .core import (AlgebraError, FalsificationError, FiniteAlgebra,
                   OperationTable, materialize_term, table_flags, App, Var)
from .partitions import Partition
from .analyzer import WEDGE, D, check_smb_over
from .relations import congruence_lattice
from .pipeline import regularize


def trivial_algebra() -> FiniteAlgebra:
    return FiniteAlgebra("one", 1, {WEDGE: OperationTable(2, 1, [0]),
                                    D: OperationTable(3, 1, [0])})


def example_b2() -> FiniteAlgebra:
    d = [(x + y + z) % 2 for x in range(2) for y in range(2) for z in range(2)]
    return FiniteAlgebra("b2", 2, {WEDGE: OperationTable(2, 2, [0, 1, 0, 1]),
                                   D: OperationTable(3, 2, d)})


def chain_semilattice(k: int, name: Optional[str] = None) -> FiniteAlgebra:
    """The k-element chain 0 < 1 < ... < k-1 with meet = min and
    d = (x^y)^z."""
    wedge = [min(x, y) for x in range(k) for y in range(k)]
    d = [min(x, y, z) for x in range(k) for y in range(k) for z in range(k)]
    return FiniteAlgebra(name or f"chain{k}", k,
                         {WEDGE: OperationTable(2, k, wedge),
                          D: OperationTable(3, k, d)})


def example_s2() -> FiniteAlgebra:
    return chain_semilattice(2, "s2")


def example_e3() -> FiniteAlgebra:
    entries = []
    for x in range(3):
        for y in range(3):
            for z in range(3):
                entries.append(2 if 2 in (x, y, z) else (x + y + z) % 2)
    d = OperationTable(3, 3, entries)
    alg = FiniteAlgebra("e3", 3, {D: d})
    wedge = materialize_term(alg, App(D, (Var(0), Var(0), Var(1))), 2)
    return FiniteAlgebra("e3", 3, {D: d, WEDGE: wedge})


def affine_block(size: int) -> FiniteAlgebra:
    """A one-block Mal'cev algebra: d(x, y, z) = x - y + z mod size."""
    d = [(x - y + z) % size
         for x in range(size) for y in range(size) for z in range(size)]
    return FiniteAlgebra(f"z{size}", size, {D: OperationTable(3, size, d)})


# ---------------------------------------------------------------------------
# Gluing

def _validate_semilattice(alg: FiniteAlgebra) -> OperationTable:
    wedge = alg.op(WEDGE)
    if wedge.arity != 2:
        raise AlgebraError("the semilattice operation must be binary")
    n = alg.size
    e = wedge.entries
    for x in range(n):
        if e[x * n + x] != x:
            raise AlgebraError(f"not a semilattice: wedge({x},{x}) != {x}")
        for y in range(n):
            if e[x * n + y] != e[y * n + x]:
                raise AlgebraError(f"not a semilattice: wedge not commutative at ({x},{y})")
            for z in range(n):
                if e[e[x * n + y] * n + z] != e[x * n + e[y * n + z]]:
                    raise AlgebraError(
                        f"not a semilattice: wedge not associative at ({x},{y},{z})")
    return wedge


def glue_layout(semilattice: FiniteAlgebra,
                blocks: Mapping[int, FiniteAlgebra]) -> Partition:
    """The block partition of the glued universe (blocks are laid out in
    semilattice-element order)."""
    sizes = [blocks[c].size for c in range(semilattice.size)]
    ids = []
    for c, s in enumerate(sizes):
        ids.extend([c] * s)
    return Partition(sum(sizes), tuple(ids))


def glue_smb(semilattice: FiniteAlgebra,
             blocks: Mapping[int, FiniteAlgebra],
             reps: Optional[Mapping[int, int]] = None,
             name: Optional[str] = None) -> FiniteAlgebra:
    """Glue Mal'cev blocks over a meet-semilattice into an SMB algebra.

    Each semilattice element c carries blocks[c], whose designated d must
    be Mal'cev.  reps picks one global element per class, used as the
    value of cross-class wedges; the default is each block's first
    element, and any in-block choice keeps the output SMB (a nonsingleton
    block below another class makes it non-regular).
    """
    sl_wedge = _validate_semilattice(semilattice)
    m = semilattice.size
    if set(blocks) != set(range(m)):
        raise AlgebraError("blocks must be indexed by the semilattice elements")
    offsets = []
    total = 0
    for c in range(m):
        offsets.append(total)
        total += blocks[c].size
    class_of = []
    for c in range(m):
        class_of.extend([c] * blocks[c].size)

    if reps is None:
        reps = {c: offsets[c] for c in range(m)}
    rep = [0] * m
    for c in range(m):
        if c not in reps:
            raise AlgebraError(f"no representative given for class {c}")
        r = reps[c]
        if not (offsets[c] <= r < offsets[c] + blocks[c].size):
            raise AlgebraError(f"representative {r} is not in block {c}")
        rep[c] = r

    block_d = []
    for c in range(m):
        table = blocks[c].op(D)
        if not table_flags(table).malcev:
            raise AlgebraError(f"block {c} operation d is not Mal'cev")
        block_d.append(table)

    n = total
    wedge_entries = [0] * (n * n)
    for a in range(n):
        ca = class_of[a]
        for b in range(n):
            cb = class_of[b]
            if ca == cb:
                wedge_entries[a * n + b] = b
            else:
                meet = sl_wedge.entries[ca * m + cb]
                wedge_entries[a * n + b] = rep[meet]

    d_entries = [0] * (n * n * n)
    for a in range(n):
        ca = class_of[a]
        for b in range(n):
            cb = class_of[b]
            for c in range(n):
                idx = (a * n + b) * n + c
                if ca == cb == class_of[c]:
                    off = offsets[ca]
                    d_entries[idx] = off + block_d[ca].apply(a - off, b - off, c - off)
                else:
                    ab = wedge_entries[a * n + b]
                    d_entries[idx] = wedge_entries[ab * n + c]

    out = FiniteAlgebra(name or f"glued{n}", n, {
        WEDGE: OperationTable(2, n, wedge_entries),
        D: OperationTable(3, n, d_entries),
    })
    sim = glue_layout(semilattice, blocks)
    report = check_smb_over(out, sim)
    if not report.verdict:
        raise FalsificationError(
            f"glued algebra failed the SMB check: {report.violations[0]}")
    return out


def example_n4() -> FiniteAlgebra:
    """Two mod-2 blocks over a two-chain with the wrong bottom
    representative, so wedge(0, 2) = 3."""
    # semilattice element 1 below element 0
    sl = FiniteAlgebra("chain2r", 2, {WEDGE: OperationTable(2, 2, [0, 1, 1, 1])})
    alg = glue_smb(sl, {0: affine_block(2), 1: affine_block(2)},
                   reps={0: 0, 1: 3}, name="n4")
    return alg


def n4_sim() -> Partition:
    return Partition(4, (0, 0, 1, 1))


# ---------------------------------------------------------------------------
# The simple type-5 extension

def extend_simple_type5(alg: FiniteAlgebra, w_symbol: str) -> FiniteAlgebra:
    """Extend a wnu algebra by three fresh elements (absorbing zero, a
    shift element s, and a top generator) into a simple algebra whose only
    operation is a wnu of the same arity.

    Fresh elements are appended after the original universe in the order
    (zero, s, top).  Nearly unanimous means exactly one dissident
    coordinate; the absorbing rule takes precedence.  Both the wnu check
    and the simplicity of the result are verified.
    """
    w = alg.op(w_symbol)
    if not table_flags(w).wnu:
        raise AlgebraError(
            f"operation '{w_symbol}' of '{alg.name}' is not a wnu operation")
    if w.arity < 3:
        raise AlgebraError("the extension needs a wnu of arity at least 3")
    n = alg.size
    k = w.arity
    zero, s, top = n, n + 1, n + 2
    size = n + 3

    def circ(r, t):
        # nearly unanimous value: repeated r, single dissident t
        if r == s:
            if t < n:
                return t + 1 if t + 1 < n else top
            return zero            # t == top
        if t == s:
            if r < n:
                return r + 1 if r + 1 < n else top
            return 0               # r == top: the first original element
        if r == top:
            return top             # t < n
        return s                   # r < n, t == top

    entries = []
    for args in itertools.product(range(size), repeat=k):
        first = args[0]
        if all(a == first for a in args):
            entries.append(first)
        elif zero in args:
            entries.append(zero)
        elif all(a < n for a in args):
            entries.append(w.entries[w.index(args)])
        else:
            counts: Dict[int, int] = {}
            for a in args:
                counts[a] = counts.get(a, 0) + 1
            if len(counts) == 2 and max(counts.values()) == k - 1:
                (r, t) = sorted(counts, key=counts.get, reverse=True)
                entries.append(circ(r, t))
            else:
                entries.append(zero)
    out = FiniteAlgebra(f"{alg.name}_ext", size,
                        {"v": OperationTable(k, size, entries)})

    if not table_flags(out.op("v")).wnu:
        raise FalsificationError(
            f"extension of '{alg.name}' did not produce a wnu operation")
    lattice = congruence_lattice(out, max_size=max(10, size))
    if len(lattice) != (1 if size == 1 else 2):
        raise FalsificationError(
            f"extension of '{alg.name}' is not simple: found "
            f"{len(lattice)} congruences")
    return out


# ---------------------------------------------------------------------------
# Random and exhaustive streams

def random_algebra(n: int, signature: Mapping[str, int], seed: int) -> FiniteAlgebra:
    """A reproducible random algebra for the given signature."""
    rng = random.Random(seed)
    ops = {}
    for sym, arity in signature.items():
        ops[sym] = OperationTable(
            arity, n, [rng.randrange(n) for _ in range(n ** arity)])
    return FiniteAlgebra(f"rand{n}_{seed}", n, ops)


def exhaustive_enumerate(n: int, signature: Mapping[str, int]) -> Iterator[FiniteAlgebra]:
    """Every algebra of the signature on {0..n-1}; refuses when the stream
    would be infeasibly large."""
    total = 1
    for arity in signature.values():
        total *= n ** (n ** arity)
    if total > 1_000_000:
        raise AlgebraError(
            f"infeasible enumeration request: {total} algebras of signature "
            f"{dict(signature)} on {n} elements")
    syms = list(signature.items())
    spaces = [itertools.product(range(n), repeat=n ** arity) for _, arity in syms]
    for i, combo in enumerate(itertools.product(*spaces)):
        ops = {sym: OperationTable(arity, n, entries)
               for (sym, arity), entries in zip(syms, combo)}
        yield FiniteAlgebra(f"enum{n}_{i}", n, ops)


def random_semilattice(size: int, rng: random.Random,
                       name: Optional[str] = None) -> FiniteAlgebra:
    """A meet-semilattice from a random rooted tree (root 0 is the least
    element; meets are deepest common ancestors)."""
    parents = [None] + [rng.randrange(i) for i in range(1, size)]
    anc = []
    for i in range(size):
        path = [i]
        while parents[path[-1]] is not None:
            path.append(parents[path[-1]])
        anc.append(path)
    wedge = []
    for a in range(size):
        for b in range(size):
            bs = set(anc[b])
            wedge.append(next(x for x in anc[a] if x in bs))
    table = OperationTable(2, size, wedge)
    e = table.entries
    d = [e[e[x * size + y] * size + z]
         for x in range(size) for y in range(size) for z in range(size)]
    return FiniteAlgebra(name or f"tree{size}", size,
                         {WEDGE: table, D: OperationTable(3, size, d)})


# ---------------------------------------------------------------------------
# Corpus

@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 20240817
    max_size: int = 8
    families: tuple = ("semilattice+d", "affine block", "glued SMB",
                       "random signature")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    algebra: FiniteAlgebra
    sim: Optional[Partition]
    tags: frozenset

    def has(self, *tags: str) -> bool:
        return all(t in self.tags for t in tags)


def _entry(alg, sim, *tags):
    return CorpusEntry(alg.name, alg, sim, frozenset(tags))


# block size layouts per glued algebra: (tree size, block sizes)
_GLUE_LAYOUTS = (
    (2, (2, 2)), (2, (3, 2)), (2, (2, 3)), (2, (2, 2)),
    (3, (2, 2, 1)), (3, (2, 1, 2)), (3, (3, 2, 2)), (3, (2, 2, 2)),
    (4, (2, 1, 1, 1)), (4, (2, 2, 1, 1)), (4, (2, 1, 2, 1)), (4, (3, 1, 2, 1)),
)


def build_corpus(spec: CorpusSpec = CorpusSpec()) -> list:
    """The deterministic test corpus.

    Tags: smb (with sim the witness partition), regular, semilattice,
    glued, regularized, extension, random, simple.  Every glued entry has
    a nonsingleton bottom block below another class, which guarantees it
    is SMB but not regular; its regularization is included as well.
    """
    rng = random.Random(spec.seed)
    entries = []

    def zero_sim(alg):
        return Partition.zero(alg.size)

    entries.append(_entry(trivial_algebra(), Partition.one(1),
                          "smb", "regular", "semilattice"))
    entries.append(_entry(example_b2(), Partition.one(2), "smb", "regular", "affine"))
    e3 = example_e3()
    entries.append(_entry(e3, Partition(3, (0, 0, 1)), "smb", "regular"))
    n4 = example_n4()
    entries.append(_entry(n4, n4_sim(), "smb", "glued"))
    entries.append(_entry(regularize(n4, n4_sim()), n4_sim(),
                          "smb", "regular", "regularized"))

    if "semilattice+d" in spec.families:
        s2 = example_s2()
        entries.append(_entry(s2, zero_sim(s2), "smb", "regular", "semilattice"))
        for k in range(3, min(4, spec.max_size) + 1):
            alg = chain_semilattice(k)
            entries.append(_entry(alg, zero_sim(alg), "smb", "regular", "semilattice"))
        for size in range(5, spec.max_size + 1):
            alg = random_semilattice(size, rng)
            entries.append(_entry(alg, zero_sim(alg), "smb", "regular", "semilattice"))

    if "glued SMB" in spec.families:
        for i, (tree_size, block_sizes) in enumerate(_GLUE_LAYOUTS):
            if sum(block_sizes) > spec.max_size:
                continue
            sl = random_semilattice(tree_size, rng)
            blocks = {c: affine_block(s) for c, s in enumerate(block_sizes)}
            sim = glue_layout(sl, blocks)
            offsets = [sum(block_sizes[:c]) for c in range(tree_size)]
            reps = {c: offsets[c] + rng.randrange(block_sizes[c])
                    for c in range(tree_size)}
            glued = glue_smb(sl, blocks, reps, name=f"glued{sum(block_sizes)}_{i}")
            entries.append(_entry(glued, sim, "smb", "glued"))
            entries.append(_entry(
                regularize(glued, sim).rename(f"{glued.name}_reg"), sim,
                "smb", "regular", "regularized"))

    if "affine block" in spec.families:
        for alg in (trivial_algebra(), example_b2(), example_s2(),
                    chain_semilattice(3), e3):
            if alg.size + 3 > spec.max_size:
                continue
            ext = extend_simple_type5(alg, D)
            entries.append(_entry(ext, None, "extension", "simple"))

    if "random signature" in spec.families:
        for i, n in enumerate((3, 3, 4)):
            alg = random_algebra(n, {WEDGE: 2, D: 3}, rng.randrange(1 << 30))
            entries.append(_entry(alg, None, "random"))

    return entries
