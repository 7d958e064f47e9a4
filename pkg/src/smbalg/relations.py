"""Closure computations in finite powers.

Subuniverse generation with derivation traces, principal congruences and
congruence lattices, quotients, products and subalgebras, the D-relation,
unary polynomials, and the binary commutator.

Two closure engines live here.  `generate_subpower` is the traced,
deterministic breadth-first engine used wherever witnesses must be
replayed.  `subpower_closure_fast` is a vectorized engine without traces,
used for the commutator's matrix sets in A^4; the two are cross-checked
against each other in the test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .core import (AlgebraError, App, CapExceeded, Const, FalsificationError,
                   FiniteAlgebra, OperationTable, PreconditionError, Term, Var)
from .partitions import DisjointSet, Partition

POL1_SIZE_CAP = 8
LATTICE_SIZE_CAP = 10
FAST_CLOSURE_SPACE_CAP = 6_000_000


# ---------------------------------------------------------------------------
# Traced subpower generation

@dataclass(frozen=True)
class GeneratedSet:
    """A generated subset of A^k with one derivation trace per element.

    `trace[i]` is None for a generator and otherwise a pair
    (operation symbol, tuple of parent element indices).  Replaying the
    trace from the generators reproduces the element.
    """
    power: int
    elements: tuple            # tuples of length `power`, in discovery order
    trace: tuple               # parallel to elements

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.elements)})

    @property
    def index(self):
        return self._index  # type: ignore[attr-defined]

    def __contains__(self, item) -> bool:
        return tuple(item) in self.index

    def __len__(self):
        return len(self.elements)

    def as_set(self) -> frozenset:
        return frozenset(self.elements)

    def replay(self, alg: FiniteAlgebra, i: int) -> tuple:
        """Recompute element i from its trace (generators return themselves)."""
        step = self.trace[i]
        if step is None:
            return self.elements[i]
        sym, parents = step
        table = alg.op(sym)
        nested = table.nested
        cols = []
        parent_elems = [self.replay(alg, p) for p in parents]
        for c in range(self.power):
            t = nested
            for pe in parent_elems:
                t = t[pe[c]]
            cols.append(t)
        return tuple(cols)

    def term_for(self, i: int, leaf_terms: dict) -> Term:
        """A term over the generators witnessing element i.

        `leaf_terms` maps generator element index to a Term; derived
        elements become applications along the trace.
        """
        memo: dict = {}

        def build(j):
            if j in memo:
                return memo[j]
            step = self.trace[j]
            if step is None:
                try:
                    t = leaf_terms[j]
                except KeyError:
                    raise AlgebraError(
                        f"no leaf term supplied for generator index {j}") from None
            else:
                sym, parents = step
                t = App(sym, tuple(build(p) for p in parents))
            memo[j] = t
            return t

        return build(i)


def generate_subpower(alg: FiniteAlgebra, k: int,
                      generators: Sequence[tuple]) -> GeneratedSet:
    """Least subset of A^k containing `generators`, closed under all
    operations applied coordinatewise.

    Deterministic: generators in the given order (duplicates dropped),
    then breadth-first discovery, operations tried in declaration order.
    """
    if k < 1:
        raise AlgebraError(f"power must be >= 1, got {k}")
    n = alg.size
    elements: list = []
    trace: list = []
    index: dict = {}
    for g in generators:
        g = tuple(g)
        if len(g) != k:
            raise AlgebraError(f"generator {g} does not have length {k}")
        if any(not 0 <= x < n for x in g):
            raise AlgebraError(f"generator {g} has entries outside 0..{n - 1}")
        if g not in index:
            index[g] = len(elements)
            elements.append(g)
            trace.append(None)
    if not elements:
        raise AlgebraError("at least one generator is required")

    ops = [(sym, t.arity, t.nested) for sym, t in alg.operations.items()]
    rng_k = range(k)

    processed = 0
    while processed < len(elements):
        cur = processed          # combinations containing element `cur` and
        processed += 1           # otherwise only elements with smaller index
        for sym, arity, nested in ops:
            for pos in range(arity):
                for pre in itertools.product(range(cur), repeat=pos):
                    for post in itertools.product(range(cur + 1), repeat=arity - 1 - pos):
                        arg_idx = pre + (cur,) + post
                        args = [elements[j] for j in arg_idx]
                        out = []
                        for c in rng_k:
                            t = nested
                            for a in args:
                                t = t[a[c]]
                            out.append(t)
                        tup = tuple(out)
                        if tup not in index:
                            index[tup] = len(elements)
                            elements.append(tup)
                            trace.append((sym, arg_idx))
    return GeneratedSet(k, tuple(elements), tuple(trace))


def generate_subuniverse(alg: FiniteAlgebra, generators: Iterable[int]) -> tuple:
    """Subuniverse of A generated by a set of elements, as a sorted tuple."""
    gen = generate_subpower(alg, 1, [(g,) for g in generators])
    return tuple(sorted(t[0] for t in gen.elements))


# ---------------------------------------------------------------------------
# Congruence generation

@lru_cache(maxsize=None)
def _translations(alg: FiniteAlgebra) -> tuple:
    """All unary translations f(c1,..,x,..,ck) of the basic operations."""
    n = alg.size
    out = []
    for table in alg.operations.values():
        arity = table.arity
        nested = table.nested
        for pos in range(arity):
            for consts in itertools.product(range(n), repeat=arity - 1):
                row = []
                for x in range(n):
                    args = consts[:pos] + (x,) + consts[pos:]
                    t = nested
                    for a in args:
                        t = t[a]
                    row.append(t)
                tmap = tuple(row)
                if tmap != tuple(range(n)):
                    out.append(tmap)
    return tuple(sorted(set(out)))


def congruence_generated(alg: FiniteAlgebra, pairs: Iterable[tuple]) -> Partition:
    """Least congruence containing the given pairs.

    Union-find over the one-step images: whenever two elements merge, all
    their images under unary translations are queued to merge as well.
    """
    n = alg.size
    maps = _translations(alg)
    ds = DisjointSet(n)
    queue = [(a, b) for a, b in pairs]
    for a, b in queue:
        if not (0 <= a < n and 0 <= b < n):
            raise AlgebraError(f"pair ({a}, {b}) out of range 0..{n - 1}")
    while queue:
        a, b = queue.pop()
        if ds.find(a) == ds.find(b):
            continue
        ds.union(a, b)
        for m in maps:
            ma, mb = m[a], m[b]
            if ds.find(ma) != ds.find(mb):
                queue.append((ma, mb))
    return Partition(n, tuple(ds.class_ids()))


@lru_cache(maxsize=None)
def principal_congruence(alg: FiniteAlgebra, a: int, b: int) -> Partition:
    """Least congruence of `alg` containing (a, b)."""
    return congruence_generated(alg, [(a, b)])


def congruence_by_alternating_closure(alg: FiniteAlgebra, pairs: Iterable[tuple]) -> Partition:
    """Reference implementation: alternate subpower closure of the relation
    in A^2 with reflexive-symmetric-transitive closure until stable.

    Slower than `congruence_generated`; kept as an independent oracle and
    exercised against it in the tests.
    """
    n = alg.size
    relation = set((c, c) for c in range(n))
    for a, b in pairs:
        relation.add((a, b))
        relation.add((b, a))
    while True:
        closed = generate_subpower(alg, 2, sorted(relation)).as_set()
        part = Partition.from_pairs(n, closed)
        new_rel = set(part.pairs())
        if new_rel == relation:
            return part
        relation = new_rel


def congruence_violation(alg: FiniteAlgebra, p: Partition) -> Optional[tuple]:
    """None when p is a congruence, else (symbol, args, args') with the two
    argument tuples related coordinatewise but with unrelated outputs."""
    if p.size != alg.size:
        raise AlgebraError(f"partition size {p.size} does not match algebra size {alg.size}")
    ids = p.class_ids
    n = alg.size
    classes = p.blocks()
    for sym, table in alg.operations.items():
        nested = table.nested
        for args in itertools.product(range(n), repeat=table.arity):
            t = nested
            for a in args:
                t = t[a]
            base = t
            for pos in range(table.arity):
                for b in classes[ids[args[pos]]]:
                    if b == args[pos]:
                        continue
                    alt = args[:pos] + (b,) + args[pos + 1:]
                    t = nested
                    for a in alt:
                        t = t[a]
                    if ids[t] != ids[base]:
                        return (sym, args, alt)
    return None


def is_congruence(alg: FiniteAlgebra, p: Partition) -> bool:
    return congruence_violation(alg, p) is None


@dataclass(frozen=True)
class CongruenceLattice:
    """Con(alg): all congruences plus the covering relation by inclusion."""
    congruences: tuple         # Partitions, sorted from 0_A towards 1_A
    covers: tuple              # (i, j) index pairs with congruences[i] -< congruences[j]

    def __len__(self):
        return len(self.congruences)

    def __iter__(self):
        return iter(self.congruences)

    def __contains__(self, p):
        return p in self.congruences

    def index(self, p: Partition) -> int:
        return self.congruences.index(p)


@lru_cache(maxsize=None)
def congruence_lattice(alg: FiniteAlgebra, max_size: int = LATTICE_SIZE_CAP) -> CongruenceLattice:
    """All congruences (principal congruences closed under join) and covers."""
    n = alg.size
    if n > max_size:
        raise CapExceeded(
            f"congruence lattice capped at universe size {max_size}, algebra has {n}")
    found = {Partition.zero(n)}
    for a in range(n):
        for b in range(a + 1, n):
            found.add(principal_congruence(alg, a, b))
    # close under join
    work = list(found)
    while work:
        p = work.pop()
        for q in list(found):
            j = p.join(q)
            if j not in found:
                found.add(j)
                work.append(j)
    ordered = sorted(found, key=lambda p: (-p.num_classes, p.class_ids))
    covers = []
    for i, p in enumerate(ordered):
        for j, q in enumerate(ordered):
            if not (p != q and p.refines(q)):
                continue
            if any(p != r != q and p.refines(r) and r.refines(q) for r in ordered):
                continue
            covers.append((i, j))
    return CongruenceLattice(tuple(ordered), tuple(covers))


# ---------------------------------------------------------------------------
# Quotients, subalgebras, products

def quotient_algebra(alg: FiniteAlgebra, theta: Partition) -> Tuple[FiniteAlgebra, tuple]:
    """The algebra on theta-classes, plus the element -> class-id map.

    theta is verified to be a congruence; induced tables are computed via
    representatives, which the congruence property makes well defined.
    """
    bad = congruence_violation(alg, theta)
    if bad is not None:
        sym, t1, t2 = bad
        raise PreconditionError(
            f"partition is not a congruence: operation '{sym}' separates {t1} and {t2}")
    ids = theta.class_ids
    reps = [block[0] for block in theta.blocks()]
    m = theta.num_classes
    ops = {}
    for sym, table in alg.operations.items():
        nested = table.nested
        entries = []
        for args in itertools.product(range(m), repeat=table.arity):
            t = nested
            for c in args:
                t = t[reps[c]]
            entries.append(ids[t])
        ops[sym] = OperationTable(table.arity, m, entries)
    return FiniteAlgebra(f"{alg.name}_mod", m, ops), tuple(ids)


def push_partition(theta: Partition, class_map: Sequence[int], quotient_size: int,
                   p: Partition) -> Partition:
    """Image of a partition p >= theta under the quotient map."""
    ids = [0] * quotient_size
    seen = [False] * quotient_size
    for x in range(p.size):
        c = class_map[x]
        if seen[c] and ids[c] != p.class_ids[x]:
            raise AlgebraError("partition does not factor through the quotient")
        ids[c] = p.class_ids[x]
        seen[c] = True
    return Partition(quotient_size, tuple(ids))


def all_subuniverses(alg: FiniteAlgebra) -> list:
    """Every nonempty subuniverse, each as a sorted tuple of elements."""
    out = set()
    n = alg.size
    for r in range(1, n + 1):
        for subset in itertools.combinations(range(n), r):
            out.add(generate_subuniverse(alg, subset))
    return sorted(out, key=lambda s: (len(s), s))


def subalgebra(alg: FiniteAlgebra, subuniverse: Sequence[int]) -> FiniteAlgebra:
    """Restrict to a subuniverse, relabelling elements by their sorted position."""
    sub = tuple(sorted(subuniverse))
    pos = {x: i for i, x in enumerate(sub)}
    ops = {}
    for sym, table in alg.operations.items():
        nested = table.nested
        entries = []
        for args in itertools.product(sub, repeat=table.arity):
            t = nested
            for a in args:
                t = t[a]
            if t not in pos:
                raise AlgebraError(
                    f"{sub} is not closed under '{sym}' at {args} (value {t})")
            entries.append(pos[t])
        ops[sym] = OperationTable(table.arity, len(sub), entries)
    return FiniteAlgebra(f"{alg.name}_sub", len(sub), ops)


def product_algebra(a: FiniteAlgebra, b: FiniteAlgebra) -> FiniteAlgebra:
    """Binary direct product; element (x, y) is encoded as x*b.size + y."""
    if set(a.operations) != set(b.operations):
        raise AlgebraError("product factors must share their signature")
    ops = {}
    nb = b.size
    for sym, ta in a.operations.items():
        tb = b.operations[sym]
        if ta.arity != tb.arity:
            raise AlgebraError(f"arity mismatch for '{sym}' in product")
        na_nested, nb_nested = ta.nested, tb.nested
        entries = []
        for args in itertools.product(range(a.size * nb), repeat=ta.arity):
            t1 = na_nested
            t2 = nb_nested
            for e in args:
                t1 = t1[e // nb]
                t2 = t2[e % nb]
            entries.append(t1 * nb + t2)
        ops[sym] = OperationTable(ta.arity, a.size * nb, entries)
    return FiniteAlgebra(f"{a.name}x{b.name}", a.size * b.size, ops)


# ---------------------------------------------------------------------------
# D-relations and relation composition

@lru_cache(maxsize=None)
def d_rel(alg: FiniteAlgebra, a: int, b: int) -> GeneratedSet:
    """D_{a,b}: the subuniverse of A^2 generated by (a,b), (b,a) and the
    diagonal.  Always reflexive and symmetric."""
    gens = [(a, b), (b, a)] + [(c, c) for c in range(alg.size)]
    return generate_subpower(alg, 2, gens)


@lru_cache(maxsize=None)
def polynomial_image_pairs(alg: FiniteAlgebra, a: int, b: int) -> GeneratedSet:
    """{(p(a), p(b)) : p a unary polynomial}, as the subuniverse of A^2
    generated by (a,b) and the diagonal."""
    gens = [(a, b)] + [(c, c) for c in range(alg.size)]
    return generate_subpower(alg, 2, gens)


def compose_relations(r: Iterable[tuple], s: Iterable[tuple]) -> frozenset:
    """{(x, z) : exists y with (x,y) in r and (y,z) in s}."""
    by_mid: dict = {}
    for y, z in s:
        by_mid.setdefault(y, []).append(z)
    out = set()
    for x, y in r:
        for z in by_mid.get(y, ()):
            out.add((x, z))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Unary polynomials

@lru_cache(maxsize=None)
def unary_polynomials(alg: FiniteAlgebra, max_size: int = POL1_SIZE_CAP) -> tuple:
    """All unary polynomial operations, each with one witnessing term.

    Computed as the subuniverse of the function power A^A generated by the
    identity map and the constant maps.  Returns ((values, term), ...) in
    deterministic discovery order; `values` is the map as a tuple.
    """
    n = alg.size
    if n > max_size:
        raise CapExceeded(
            f"unary polynomial enumeration capped at universe size {max_size}, "
            f"algebra has {n}")
    identity = tuple(range(n))
    gens = [identity] + [(c,) * n for c in range(n)]
    gen_set = generate_subpower(alg, n, gens)
    leaf_terms = {0: Var(0)}
    for c in range(n):
        idx = gen_set.index[(c,) * n]
        if idx != 0:
            leaf_terms.setdefault(idx, Const(c))
    return tuple((elem, gen_set.term_for(i, leaf_terms))
                 for i, elem in enumerate(gen_set.elements))


# ---------------------------------------------------------------------------
# Fast (untraced) closure and the commutator

def _op_arrays(alg: FiniteAlgebra) -> list:
    return [(t.arity, np.asarray(t.entries, dtype=np.int64))
            for t in alg.operations.values()]


def subpower_closure_fast(alg: FiniteAlgebra, power: int,
                          generators: Sequence[tuple],
                          chunk: int = 1 << 20) -> np.ndarray:
    """Vectorized closure of a generated subset of A^power, no traces.

    Returns an (m, power) int array.  Element order is deterministic but
    differs from the breadth-first order of `generate_subpower`.
    """
    n = alg.size
    space = n ** power
    if space > FAST_CLOSURE_SPACE_CAP:
        raise CapExceeded(f"A^{power} has {space} tuples, beyond the closure cap")
    weights = n ** np.arange(power - 1, -1, -1, dtype=np.int64)
    visited = np.zeros(space, dtype=bool)

    gen = np.asarray(sorted(set(tuple(g) for g in generators)), dtype=np.int64)
    if gen.ndim != 2 or gen.shape[1] != power:
        raise AlgebraError("generators must be tuples of length `power`")
    visited[gen @ weights] = True
    elements = gen
    new = gen
    ops = _op_arrays(alg)

    while len(new):
        old_count = len(elements) - len(new)
        fresh_keys = []
        for arity, table in ops:
            for pos in range(arity):
                # first occurrence of a new element at `pos`
                ranges = []
                for i in range(arity):
                    if i < pos:
                        ranges.append(np.arange(old_count))
                    elif i == pos:
                        ranges.append(np.arange(old_count, len(elements)))
                    else:
                        ranges.append(np.arange(len(elements)))
                sizes = [len(r) for r in ranges]
                total = 1
                for s in sizes:
                    total *= s
                if total == 0:
                    continue
                for start in range(0, total, chunk):
                    stop = min(start + chunk, total)
                    flat = np.arange(start, stop, dtype=np.int64)
                    idx_cols = []
                    rem = flat
                    for s in reversed(sizes):
                        idx_cols.append(rem % s)
                        rem = rem // s
                    idx_cols.reverse()
                    acc = None
                    for r, col in zip(ranges, idx_cols):
                        coords = elements[r[col]]
                        acc = coords if acc is None else acc * n + coords
                    keys = table[acc] @ weights
                    mask = ~visited[keys]
                    if mask.any():
                        fresh_keys.append(np.unique(keys[mask]))
        if not fresh_keys:
            break
        keys = np.unique(np.concatenate(fresh_keys))
        keys = keys[~visited[keys]]
        if not len(keys):
            break
        visited[keys] = True
        coords = np.empty((len(keys), power), dtype=np.int64)
        rem = keys
        for c in range(power - 1, -1, -1):
            coords[:, c] = rem % n
            rem = rem // n
        new = coords
        elements = np.concatenate([elements, coords])
    return elements


@lru_cache(maxsize=None)
def matrix_set(alg: FiniteAlgebra, alpha: Partition, beta: Partition) -> tuple:
    """M(alpha, beta): tuples (m11, m12, m21, m22) read as 2x2 matrices,
    generated from alpha-pairs duplicated as rows and beta-pairs duplicated
    as columns."""
    gens = set()
    for a, b in alpha.pairs():
        gens.add((a, a, b, b))
    for c, d in beta.pairs():
        gens.add((c, d, c, d))
    closed = subpower_closure_fast(alg, 4, sorted(gens))
    return tuple(map(tuple, closed.tolist()))


def _check_congruences(alg: FiniteAlgebra, *parts: Partition):
    for p in parts:
        bad = congruence_violation(alg, p)
        if bad is not None:
            raise PreconditionError(
                f"partition {p} is not a congruence of {alg.name}: "
                f"operation '{bad[0]}' separates {bad[1]} and {bad[2]}")


@lru_cache(maxsize=None)
def commutator(alg: FiniteAlgebra, alpha: Partition, beta: Partition) -> Partition:
    """The binary commutator [alpha, beta], via 2x2 matrix generation.

    The congruence generated by the bottom rows of all matrices in
    M(alpha, beta) whose top row is constant.  Guaranteed to lie below
    alpha meet beta; a violation of that bound is raised loudly.
    """
    _check_congruences(alg, alpha, beta)
    matrices = matrix_set(alg, alpha, beta)
    pairs = set()
    for m11, m12, m21, m22 in matrices:
        if m11 == m12:
            pairs.add((m21, m22))
    result = congruence_generated(alg, sorted(pairs))
    if not result.refines(alpha.meet(beta)):
        raise FalsificationError(
            f"commutator bound failed on {alg.name}: [{alpha}, {beta}] = {result} "
            f"is not below the meet")
    return result


@lru_cache(maxsize=None)
def commutator_oracle(alg: FiniteAlgebra, alpha: Partition, beta: Partition,
                      max_size: int = LATTICE_SIZE_CAP) -> Partition:
    """Independent commutator: the least congruence delta for which every
    matrix in M(alpha, beta) with a delta-related top row has a
    delta-related bottom row, found by scanning the whole lattice."""
    _check_congruences(alg, alpha, beta)
    matrices = np.asarray(matrix_set(alg, alpha, beta), dtype=np.int64)
    lattice = congruence_lattice(alg, max_size)

    def satisfies(delta: Partition) -> bool:
        ids = np.asarray(delta.class_ids, dtype=np.int64)
        top = ids[matrices[:, 0]] == ids[matrices[:, 1]]
        bottom = ids[matrices[:, 2]] == ids[matrices[:, 3]]
        return not bool(np.any(top & ~bottom))

    candidates = [delta for delta in lattice if satisfies(delta)]
    if not candidates:
        raise FalsificationError(
            f"no congruence of {alg.name} satisfies the term condition for "
            f"({alpha}, {beta}); 1_A should always work")
    least = candidates[0]
    for delta in candidates[1:]:
        least = least.meet(delta)
    if not satisfies(least):
        raise FalsificationError(
            "congruences satisfying the term condition are not meet closed "
            f"on {alg.name} for ({alpha}, {beta})")
    return least


def is_abelian(alg: FiniteAlgebra, alpha: Partition) -> bool:
    """Whether [alpha, alpha] is the identity congruence."""
    return commutator(alg, alpha, alpha).is_zero
