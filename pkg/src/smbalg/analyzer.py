"""Recognition and verification for semilattices of Mal'cev blocks.

An SMB algebra is an idempotent algebra with designated operations
`wedge` (binary) and `d` (ternary) together with a congruence `sim` such
that the quotient is a wedge-semilattice while on each sim-class wedge is
the second projection and d is Mal'cev.  This module recognizes that
structure, checks regularity and its twelve-identity equational base,
verifies the principal-congruence decomposition Cg(a,b) = D o D o D with
six-step polynomial witnesses, and runs the congruence/commutator
biconditionals that hold in the regular case.

The biconditional checkers compute both sides independently and raise
FalsificationError when they disagree, so the test suite doubles as a
falsification harness rather than assuming the mathematics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

from .core import (AlgebraError, App, Const, FalsificationError, FiniteAlgebra,
                   Identity, OperationTable, PreconditionError, Quasiidentity,
                   Term, Var, Verdict, check_identity, eval_term, substitute)
from .partitions import Partition
from .relations import (GeneratedSet, compose_relations, congruence_violation,
                        d_rel, polynomial_image_pairs, principal_congruence,
                        quotient_algebra, commutator, congruence_lattice)

WEDGE = "wedge"
D = "d"

_x, _y, _z = Var(0), Var(1), Var(2)


def _w(a: Term, b: Term) -> Term:
    return App(WEDGE, (a, b))


def _d(a: Term, b: Term, c: Term) -> Term:
    return App(D, (a, b, c))


# ---------------------------------------------------------------------------
# Report types

@dataclass(frozen=True)
class ClassOrder:
    """A partial order on sim-classes; classes are tuples sorted by least
    element and leq holds index pairs (i, j) meaning classes[i] <= classes[j]."""
    classes: tuple
    leq: frozenset

    def le(self, i: int, j: int) -> bool:
        return (i, j) in self.leq

    def least(self) -> Optional[int]:
        for i in range(len(self.classes)):
            if all((i, j) in self.leq for j in range(len(self.classes))):
                return i
        return None

    def greatest(self) -> Optional[int]:
        for j in range(len(self.classes)):
            if all((i, j) in self.leq for i in range(len(self.classes))):
                return j
        return None

    def glb(self, i: int, j: int) -> Optional[int]:
        lower = [k for k in range(len(self.classes))
                 if (k, i) in self.leq and (k, j) in self.leq]
        for k in lower:
            if all((m, k) in self.leq for m in lower):
                return k
        return None

    def glb_closed(self) -> bool:
        m = len(self.classes)
        return all(self.glb(i, j) is not None for i in range(m) for j in range(m))


@dataclass(frozen=True)
class SmbReport:
    verdict: bool
    sim: Partition
    violations: tuple          # of (condition tag, witness tuple)
    class_order: Optional[ClassOrder]

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "sim": str(self.sim),
            "violations": [{"rule": rule, "witness": list(w)} for rule, w in self.violations],
        }


@dataclass(frozen=True)
class RegularityReport:
    holds: bool
    conditions: dict           # "i".."iv" -> Verdict

    def as_dict(self) -> dict:
        return {
            "verdict": self.holds,
            "conditions": {
                name: {"holds": v.holds,
                       "witness": None if v.witness is None else list(v.witness)}
                for name, v in self.conditions.items()},
        }


BASE_IDENTITY_NAMES = ("Idem1", "Idem2", "Comm", "Assoc1", "Assoc2", "Mal",
                       "Regi1", "Regi2", "Regii1", "Regii2", "Regiii", "Regiv")


@dataclass(frozen=True)
class BaseReport:
    verdicts: dict             # identity name -> Verdict
    holds: bool
    recovered_sim: Optional[Partition]

    def as_dict(self) -> dict:
        return {
            "verdict": self.holds,
            "identities": {
                name: {"holds": v.holds,
                       "witness": None if v.witness is None else list(v.witness)}
                for name, v in self.verdicts.items()},
            "sim": None if self.recovered_sim is None else str(self.recovered_sim),
        }


# ---------------------------------------------------------------------------
# Designated operations

def designated_ops(alg: FiniteAlgebra) -> Tuple[OperationTable, OperationTable]:
    if not alg.has_op(WEDGE, 2):
        raise AlgebraError(f"algebra '{alg.name}' has no binary operation '{WEDGE}'")
    if not alg.has_op(D, 3):
        raise AlgebraError(f"algebra '{alg.name}' has no ternary operation '{D}'")
    return alg.op(WEDGE), alg.op(D)


# ---------------------------------------------------------------------------
# SMB recognition

def check_smb_over(alg: FiniteAlgebra, sim: Partition) -> SmbReport:
    """Check the SMB conditions for one candidate congruence.

    Violations carry the exact failing tuples:
      Idempotence   (symbol, element)
      Congruence    (symbol, args, args')
      Idem/Comm/Assoc-mod-sim   representative tuples at class level
      SecondProj    (a, b) in one class with wedge(a, b) != b
      Malcev        the failing d-argument triple inside one class
    """
    wedge, d = designated_ops(alg)
    if sim.size != alg.size:
        raise AlgebraError(
            f"partition size {sim.size} does not match algebra size {alg.size}")
    violations = []

    for sym, table in alg.operations.items():
        for x in range(alg.size):
            if table.entries[table.index((x,) * table.arity)] != x:
                violations.append(("Idempotence", (sym, x)))
                break

    cong_ok = True
    bad = congruence_violation(alg, sim)
    if bad is not None:
        cong_ok = False
        violations.append(("Congruence", bad))

    ids = sim.class_ids
    blocks = sim.blocks()
    order = None
    if cong_ok:
        reps = [blk[0] for blk in blocks]
        m = len(reps)

        def qw(i, j):
            return ids[wedge.entries[wedge.index((reps[i], reps[j]))]]

        for i in range(m):
            if qw(i, i) != i:
                violations.append(("Idem-mod-sim", (reps[i],)))
        for i in range(m):
            for j in range(m):
                if qw(i, j) != qw(j, i):
                    violations.append(("Comm-mod-sim", (reps[i], reps[j])))
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    if qw(qw(i, j), k) != qw(i, qw(j, k)):
                        violations.append(("Assoc-mod-sim", (reps[i], reps[j], reps[k])))

    for blk in blocks:
        for a in blk:
            for b in blk:
                if wedge.entries[wedge.index((a, b))] != b:
                    violations.append(("SecondProj", (a, b)))
        for x in blk:
            for y in blk:
                if d.entries[d.index((x, y, y))] != x:
                    violations.append(("Malcev", (x, y, y)))
                if d.entries[d.index((y, y, x))] != x:
                    violations.append(("Malcev", (y, y, x)))

    verdict = not violations
    if verdict:
        m = len(blocks)
        reps = [blk[0] for blk in blocks]
        leq = frozenset(
            (i, j) for i in range(m) for j in range(m)
            if ids[wedge.entries[wedge.index((reps[i], reps[j]))]] == i)
        order = ClassOrder(tuple(blocks), leq)
    return SmbReport(verdict, sim, tuple(violations), order)


def find_smb_congruences(alg: FiniteAlgebra, max_size: int = 10) -> list:
    """All congruences over which the algebra is SMB; empty means not SMB."""
    designated_ops(alg)
    lattice = congruence_lattice(alg, max_size)
    return [theta for theta in lattice if check_smb_over(alg, theta).verdict]


# ---------------------------------------------------------------------------
# Regularity

def check_regular(alg: FiniteAlgebra, sim: Partition) -> RegularityReport:
    """The four regularity conditions for an SMB algebra over sim.

    (i)   the sim-class of d(a,b,c) is the class of (a wedge b) wedge c,
    (ii)  comparable classes absorb: [a] >= [b] forces a wedge b = b,
    (iii) d(x,y,z) = d((y^z)^x, (x^z)^y, (x^y)^z) as an identity,
    (iv)  (x^y)^y = x^y as an identity.
    """
    report = check_smb_over(alg, sim)
    if not report.verdict:
        rule, witness = report.violations[0]
        raise PreconditionError(
            f"'{alg.name}' is not SMB over {sim}: {rule} fails at {witness}")
    wedge, d = designated_ops(alg)
    ids = sim.class_ids
    n = alg.size

    cond_i = Verdict(True)
    for args in itertools.product(range(n), repeat=3):
        a, b, c = args
        left = d.entries[d.index(args)]
        right = wedge.entries[wedge.index(
            (wedge.entries[wedge.index((a, b))], c))]
        if ids[left] != ids[right]:
            cond_i = Verdict(False, args)
            break

    order = report.class_order
    cond_ii = Verdict(True)
    for a in range(n):
        for b in range(n):
            if order.le(ids[b], ids[a]) and wedge.entries[wedge.index((a, b))] != b:
                cond_ii = Verdict(False, (a, b))
                break
        if not cond_ii.holds:
            break

    cond_iii = check_identity(alg, Identity(
        _d(_x, _y, _z),
        _d(_w(_w(_y, _z), _x), _w(_w(_x, _z), _y), _w(_w(_x, _y), _z))))
    cond_iv = check_identity(alg, Identity(_w(_w(_x, _y), _y), _w(_x, _y)))

    conditions = {"i": cond_i, "ii": cond_ii, "iii": cond_iii, "iv": cond_iv}
    return RegularityReport(all(v.holds for v in conditions.values()), conditions)


def regular_base_identities() -> dict:
    """The twelve-identity equational base, by name.  Each entry is a tuple
    of identities that must all hold (Mal bundles two)."""
    x, y, z = _x, _y, _z
    return {
        "Idem1": (Identity(_w(x, x), x),),
        "Idem2": (Identity(_d(x, x, x), x),),
        "Comm": (Identity(_w(_w(x, y), _w(y, x)), _w(y, x)),),
        "Assoc1": (Identity(_w(_w(x, _w(y, z)), _w(_w(x, y), z)), _w(_w(x, y), z)),),
        "Assoc2": (Identity(_w(_w(_w(x, y), z), _w(x, _w(y, z))), _w(x, _w(y, z))),),
        "Mal": (Identity(_d(_w(x, y), _w(y, x), _w(y, x)), _w(x, y)),
                Identity(_d(_w(y, x), _w(y, x), _w(x, y)), _w(x, y))),
        "Regi1": (Identity(_w(_w(_w(x, y), z), _d(x, y, z)), _d(x, y, z)),),
        "Regi2": (Identity(_w(_d(x, y, z), _w(_w(x, y), z)), _w(_w(x, y), z)),),
        "Regii1": (Identity(_w(x, _w(x, y)), _w(x, y)),),
        "Regii2": (Identity(_w(x, _w(y, x)), _w(y, x)),),
        "Regiii": (Identity(_d(x, y, z),
                            _d(_w(_w(y, z), x), _w(_w(x, z), y), _w(_w(x, y), z))),),
        "Regiv": (Identity(_w(_w(x, y), y), _w(x, y)),),
    }


def recovered_sim(alg: FiniteAlgebra) -> Partition:
    """The relation x ~ y iff x^y = y and y^x = x, which is the SMB
    congruence whenever the regular base holds.  Raises FalsificationError
    if the relation is not transitive."""
    wedge, _ = designated_ops(alg)
    n = alg.size
    ids = list(range(n))

    def rel(a, b):
        return (wedge.entries[wedge.index((a, b))] == b
                and wedge.entries[wedge.index((b, a))] == a)

    related = [[rel(a, b) for b in range(n)] for a in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if related[a][b] and related[b][c] and not related[a][c]:
                    raise FalsificationError(
                        f"wedge-derived relation on '{alg.name}' is not transitive "
                        f"at ({a}, {b}, {c})")
    pairs = [(a, b) for a in range(n) for b in range(n) if related[a][b]]
    return Partition.from_pairs(n, pairs)


@lru_cache(maxsize=None)
def check_regular_base(alg: FiniteAlgebra) -> BaseReport:
    """Verify the twelve base identities; when they all hold, recover sim
    from the tables and confirm the algebra really is regular SMB over it."""
    designated_ops(alg)
    verdicts = {}
    for name, idents in regular_base_identities().items():
        verdict = Verdict(True)
        for ident in idents:
            verdict = check_identity(alg, ident)
            if not verdict.holds:
                break
        verdicts[name] = verdict
    holds = all(v.holds for v in verdicts.values())
    sim = None
    if holds:
        sim = recovered_sim(alg)
        smb = check_smb_over(alg, sim)
        if not smb.verdict:
            raise FalsificationError(
                f"base identities hold on '{alg.name}' but SMB fails over the "
                f"recovered sim: {smb.violations[0]}")
        reg = check_regular(alg, sim)
        if not reg.holds:
            bad = [k for k, v in reg.conditions.items() if not v.holds]
            raise FalsificationError(
                f"base identities hold on '{alg.name}' but regularity condition(s) "
                f"{bad} fail over the recovered sim")
    return BaseReport(verdicts, holds, sim)


@lru_cache(maxsize=None)
def _regular_context(alg: FiniteAlgebra):
    """(sim, quotient algebra, class map) for a regular SMB algebra."""
    base = check_regular_base(alg)
    if not base.holds:
        failing = [name for name, v in base.verdicts.items() if not v.holds]
        raise PreconditionError(
            f"'{alg.name}' does not satisfy the regular base; failing: {failing}")
    quot, cmap = quotient_algebra(alg, base.recovered_sim)
    return base.recovered_sim, quot, cmap


# ---------------------------------------------------------------------------
# The Taylor term

@dataclass(frozen=True)
class TaylorReport:
    holds: bool
    checks: tuple              # (label, Verdict)

    def as_dict(self) -> dict:
        return {"verdict": self.holds,
                "checks": {label: {"holds": v.holds,
                                   "witness": None if v.witness is None else list(v.witness)}
                           for label, v in self.checks}}


def taylor_check(alg: FiniteAlgebra) -> TaylorReport:
    """Check the six-variable term t = d(x1^x2, x3^x4, x5^x6) against the
    three two-variable instances that must all equal x^y."""
    designated_ops(alg)
    xy, yx = _w(_x, _y), _w(_y, _x)
    checks = (
        ("t(x,y,x,y,x,y)", check_identity(alg, Identity(_d(xy, xy, xy), xy))),
        ("t(y,x,y,x,x,y)", check_identity(alg, Identity(_d(yx, yx, xy), xy))),
        ("t(x,y,y,x,y,x)", check_identity(alg, Identity(_d(xy, yx, yx), xy))),
    )
    return TaylorReport(all(v.holds for _, v in checks), checks)


# ---------------------------------------------------------------------------
# Cg = D o D o D with six-polynomial witnesses

@dataclass(frozen=True)
class ChainStep:
    poly: Term                 # unary polynomial, variable 0
    lo: int
    hi: int


@dataclass(frozen=True)
class CgD3Result:
    a: int
    b: int
    cg: Partition
    relation: frozenset
    chains: dict               # (c, d) -> tuple of 6 ChainStep


def _d_rel_leaf_terms(dset: GeneratedSet, a: int, b: int) -> dict:
    leaves = {}
    for i, elem in enumerate(dset.elements):
        if dset.trace[i] is not None:
            continue
        if elem == (a, b) and not any(isinstance(t, Var) and t.index == 0
                                      for t in leaves.values()):
            leaves[i] = Var(0)
        elif elem == (b, a) and not any(isinstance(t, Var) and t.index == 1
                                        for t in leaves.values()):
            leaves[i] = Var(1)
        else:
            leaves[i] = Const(elem[0])
    return leaves


def verify_cg_d3(alg: FiniteAlgebra, a: int, b: int) -> CgD3Result:
    """Confirm Cg(a,b) = D_{a,b} composed with itself three times, and build
    a six-step polynomial chain for every related pair.

    Requires the regular base; inequality of the two sides, or a chain that
    fails to replay, raises FalsificationError.
    """
    _regular_context(alg)
    cg = principal_congruence(alg, a, b)
    dset = d_rel(alg, a, b)
    dpairs = dset.as_set()
    d3 = compose_relations(compose_relations(dpairs, dpairs), dpairs)
    cg_rel = frozenset(cg.pairs())
    if cg_rel != d3:
        raise FalsificationError(
            f"Cg({a},{b}) and the triple D-composition differ on '{alg.name}': "
            f"symmetric difference {sorted(cg_rel ^ d3)[:4]}")

    succ: dict = {}
    for u, v in dset.elements:
        succ.setdefault(u, []).append(v)
    leaves = _d_rel_leaf_terms(dset, a, b)
    term_cache: dict = {}

    def binary_term(u, v):
        if (u, v) not in term_cache:
            term_cache[(u, v)] = dset.term_for(dset.index[(u, v)], leaves)
        return term_cache[(u, v)]

    def midpoints(c, d):
        if (c, d) in dset.index:
            return c, c
        for e4 in succ.get(c, ()):
            if (e4, d) in dset.index:
                return c, e4
        for e2 in succ.get(c, ()):
            for e4 in succ.get(e2, ()):
                if (e4, d) in dset.index:
                    return e2, e4
        raise FalsificationError(
            f"({c},{d}) in the composed relation has no 3-step decomposition")

    chains = {}
    for c, dd in sorted(cg_rel):
        e2, e4 = midpoints(c, dd)
        evens = (c, e2, e4, dd)
        steps = []
        for i in range(3):
            q = binary_term(evens[i], evens[i + 1])
            mid = eval_term(alg, q, (a, a))
            left = substitute(q, {0: Const(a), 1: Var(0)})
            right = substitute(q, {1: Const(a)})
            steps.append(ChainStep(left, evens[i], mid))
            steps.append(ChainStep(right, mid, evens[i + 1]))
        for step in steps:
            images = {eval_term(alg, step.poly, (a,)), eval_term(alg, step.poly, (b,))}
            if images != {step.lo, step.hi}:
                raise FalsificationError(
                    f"witness chain for ({c},{dd}) does not replay: step "
                    f"{step.lo}-{step.hi} has polynomial images {sorted(images)}")
        chains[(c, dd)] = tuple(steps)
    return CgD3Result(a, b, cg, d3, chains)


# ---------------------------------------------------------------------------
# Join membership chains

@dataclass(frozen=True)
class JoinChain:
    member: bool
    cs: Optional[tuple] = None
    ds: Optional[tuple] = None
    steps: Optional[tuple] = None   # (term, (u, v)) linking ds[i-1] to cs[i]


def join_membership_chain(alg: FiniteAlgebra, sim: Partition,
                          a: int, b: int, c: int, d: int) -> JoinChain:
    """Is (c, d) in Cg(a,b) join sim, with an explicit alternating chain
    c = c0 ~ d0, c1 ~ d1, ..., ck ~ dk = d whose links {d_{i-1}, c_i} are
    unary polynomial images of {a, b}."""
    bad = congruence_violation(alg, sim)
    if bad is not None:
        raise PreconditionError(f"sim is not a congruence: {bad}")
    cg = principal_congruence(alg, a, b)
    member = cg.join(sim).related(c, d)

    pg = polynomial_image_pairs(alg, a, b)
    n = alg.size
    poly_adj: dict = {u: [] for u in range(n)}
    for u, v in pg.elements:
        poly_adj[u].append((v, (u, v)))
        if (v, u) not in pg.index:
            poly_adj[v].append((u, (u, v)))

    prev: dict = {c: None}
    frontier = [c]
    while frontier and d not in prev:
        nxt = []
        for u in frontier:
            for v in range(n):
                if sim.related(u, v) and v not in prev:
                    prev[v] = (u, "sim", None)
                    nxt.append(v)
            for v, oriented in sorted(poly_adj[u]):
                if v not in prev:
                    prev[v] = (u, "poly", oriented)
                    nxt.append(v)
        frontier = nxt

    reachable = d in prev
    if reachable != member:
        raise FalsificationError(
            f"join membership and chain reachability disagree for "
            f"Cg({a},{b}) v sim at ({c},{d}) on '{alg.name}'")
    if not member:
        return JoinChain(False)

    edges = []
    node = d
    while prev[node] is not None:
        u, kind, oriented = prev[node]
        edges.append((u, node, kind, oriented))
        node = u
    edges.reverse()

    leaves = {}
    for i, elem in enumerate(pg.elements):
        if pg.trace[i] is None:
            leaves[i] = Var(0) if elem == (a, b) else Const(elem[0])

    cs, ds, steps = [c], [], []
    current = c
    for u, v, kind, oriented in edges:
        if kind == "sim":
            current = v
        else:
            term = pg.term_for(pg.index[oriented], leaves)
            ds.append(current)
            steps.append((term, (current, v)))
            cs.append(v)
            current = v
    ds.append(current)
    return JoinChain(True, tuple(cs), tuple(ds), tuple(steps))


def cgvsim_below(alg: FiniteAlgebra, a: int, b: int, c: int, d: int) -> Tuple[int, int]:
    """From a chain witnessing (c,d) in Cg(a,b) join sim, produce (e, f) with
    (c,e), (d,f) in Cg(a,b), e ~ f, and the class of e below both [c] and [d].

    Built by left-nested wedge folds over the chain; all three properties
    are verified and a violation raises FalsificationError.
    """
    sim, _, _ = _regular_context(alg)
    chain = join_membership_chain(alg, sim, a, b, c, d)
    if not chain.member:
        raise PreconditionError(
            f"({c},{d}) is not in Cg({a},{b}) join sim on '{alg.name}'")
    wedge = alg.op(WEDGE)

    e = chain.cs[0]
    for cl in chain.cs[1:]:
        e = wedge.entries[wedge.index((cl, e))]
    f = chain.ds[-1]
    for dl in reversed(chain.ds[:-1]):
        f = wedge.entries[wedge.index((dl, f))]

    cg = principal_congruence(alg, a, b)
    ids = sim.class_ids
    wcd = wedge.entries[wedge.index((c, d))]
    below = ids[wedge.entries[wedge.index((e, wcd))]] == ids[e]
    if not (cg.related(c, e) and cg.related(d, f) and sim.related(e, f) and below):
        raise FalsificationError(
            f"fold witnesses (e,f)=({e},{f}) violate the lowering properties "
            f"for ({a},{b},{c},{d}) on '{alg.name}'")
    return e, f


def check_cgvsim(alg: FiniteAlgebra, a: int, b: int, c: int, d: int) -> bool:
    """(c,d) in Cg(a,b) join sim iff (c, d^c) and (d, c^d) are in Cg(a,b).

    Both sides are computed independently; disagreement raises
    FalsificationError.
    """
    sim, _, _ = _regular_context(alg)
    wedge = alg.op(WEDGE)
    cg = principal_congruence(alg, a, b)
    left = cg.join(sim).related(c, d)
    right = (cg.related(c, wedge.entries[wedge.index((d, c))])
             and cg.related(d, wedge.entries[wedge.index((c, d))]))
    if left != right:
        raise FalsificationError(
            f"join-membership biconditional fails at ({a},{b},{c},{d}) on "
            f"'{alg.name}': join side {left}, wedge side {right}")
    return left


def check_undersim(alg: FiniteAlgebra, a: int, b: int, c: int, d: int) -> bool:
    """Cg(a,b) meet Cg(c,d) below sim iff the corresponding quotient
    principal congruences meet trivially."""
    sim, quot, cmap = _regular_context(alg)
    left = principal_congruence(alg, a, b).meet(
        principal_congruence(alg, c, d)).refines(sim)
    right = principal_congruence(quot, cmap[a], cmap[b]).meet(
        principal_congruence(quot, cmap[c], cmap[d])).is_zero
    if left != right:
        raise FalsificationError(
            f"meet-below-sim biconditional fails at ({a},{b},{c},{d}) on "
            f"'{alg.name}': algebra side {left}, quotient side {right}")
    return left


def commutator_below_sim(alg: FiniteAlgebra, a: int, b: int, c: int, d: int) -> bool:
    """[Cg(a,b), Cg(c,d)] below sim iff the quotient commutator vanishes;
    the quotient side uses that commutator equals meet there."""
    sim, quot, cmap = _regular_context(alg)
    comm = commutator(alg, principal_congruence(alg, a, b),
                      principal_congruence(alg, c, d))
    left = comm.refines(sim)
    right = principal_congruence(quot, cmap[a], cmap[b]).meet(
        principal_congruence(quot, cmap[c], cmap[d])).is_zero
    if left != right:
        raise FalsificationError(
            f"commutator biconditional fails at ({a},{b},{c},{d}) on "
            f"'{alg.name}': commutator side {left}, quotient side {right}")
    return left


# ---------------------------------------------------------------------------
# The alternating-chain fold

@dataclass(frozen=True)
class FoldResult:
    element: int
    holds: bool
    failures: tuple


def alternating_chain_fold(alg: FiniteAlgebra, sim: Partition, theta: Partition,
                      chain: Sequence[int]) -> FoldResult:
    """Left-nested wedge fold e = (..(c0 ^ c1) ^ ..) ^ ck over an alternating
    (sim, theta) chain c0, d0, c1, d1, ..., ck, dk.

    Verifies that the theta-class systems over [c0]~ and [dk]~ both inject
    into the one over [e]~, and that [e]~ lies below [c0 ^ dk]~.
    """
    if len(chain) < 2 or len(chain) % 2 != 0:
        raise AlgebraError("chain must list c0, d0, ..., ck, dk")
    wedge, _ = designated_ops(alg)
    smb = check_smb_over(alg, sim)
    if not smb.verdict:
        raise PreconditionError(
            f"'{alg.name}' is not SMB over {sim}: {smb.violations[0]}")
    bad = congruence_violation(alg, theta)
    if bad is not None:
        raise PreconditionError(f"theta is not a congruence: {bad}")
    cs = tuple(chain[0::2])
    ds = tuple(chain[1::2])
    for ci, di in zip(cs, ds):
        if not sim.related(ci, di):
            raise PreconditionError(f"chain entries {ci} and {di} are not sim-related")
    for di, cnext in zip(ds, cs[1:]):
        if not theta.related(di, cnext):
            raise PreconditionError(f"chain entries {di} and {cnext} are not theta-related")

    e = cs[0]
    for cl in cs[1:]:
        e = wedge.entries[wedge.index((e, cl))]

    def theta_classes_over(u):
        return {theta.class_ids[x] for x in sim.block_of(u)}

    over_e = theta_classes_over(e)
    failures = []
    if not theta_classes_over(cs[0]) <= over_e:
        failures.append("start-class-system")
    if not theta_classes_over(ds[-1]) <= over_e:
        failures.append("end-class-system")
    ids = sim.class_ids
    meet_cd = wedge.entries[wedge.index((cs[0], ds[-1]))]
    if ids[wedge.entries[wedge.index((e, meet_cd))]] != ids[e]:
        failures.append("class-bound")
    return FoldResult(e, not failures, tuple(failures))


# ---------------------------------------------------------------------------
# The quasi-identity axioms for the SMB class

def smb_axioms() -> Tuple[dict, dict]:
    """Identities and quasi-identities axiomatizing SMB algebras, with the
    relation x ~ y encoded as x^y = y and y^x = x."""
    x1, x2, y1, y2, z1, z2 = (Var(i) for i in range(6))

    def sim_prem(u, v):
        return (Identity(_w(u, v), v), Identity(_w(v, u), u))

    identities = {
        "sl-idem-1": Identity(_w(_w(x1, x1), x1), x1),
        "sl-idem-2": Identity(_w(x1, _w(x1, x1)), _w(x1, x1)),
        "sl-comm-1": Identity(_w(_w(x1, y1), _w(y1, x1)), _w(y1, x1)),
        "sl-comm-2": Identity(_w(_w(y1, x1), _w(x1, y1)), _w(x1, y1)),
        "sl-assoc-1": Identity(_w(_w(_w(x1, y1), z1), _w(x1, _w(y1, z1))),
                               _w(x1, _w(y1, z1))),
        "sl-assoc-2": Identity(_w(_w(x1, _w(y1, z1)), _w(_w(x1, y1), z1)),
                               _w(_w(x1, y1), z1)),
    }
    wxy = _w(_w(x1, y1), _w(x2, y2))
    wyx = _w(_w(x2, y2), _w(x1, y1))
    dxyz1 = _d(x1, y1, z1)
    dxyz2 = _d(x2, y2, z2)
    quasis = {
        "wedge-compat-1": Quasiidentity(
            sim_prem(x1, x2) + sim_prem(y1, y2),
            Identity(wxy, _w(x2, y2))),
        "wedge-compat-2": Quasiidentity(
            sim_prem(x1, x2) + sim_prem(y1, y2),
            Identity(wyx, _w(x1, y1))),
        "d-compat-1": Quasiidentity(
            sim_prem(x1, x2) + sim_prem(y1, y2) + sim_prem(z1, z2),
            Identity(_w(dxyz1, dxyz2), dxyz2)),
        "d-compat-2": Quasiidentity(
            sim_prem(x1, x2) + sim_prem(y1, y2) + sim_prem(z1, z2),
            Identity(_w(dxyz2, dxyz1), dxyz1)),
        "block-proj": Quasiidentity(
            sim_prem(x1, y1), Identity(_w(x1, y1), y1)),
        "block-malcev-left": Quasiidentity(
            sim_prem(x1, y1), Identity(_d(y1, x1, x1), y1)),
        "block-malcev-right": Quasiidentity(
            sim_prem(x1, y1), Identity(_d(x1, x1, y1), y1)),
        "block-closure-1": Quasiidentity(
            sim_prem(x1, y1) + sim_prem(x1, z1),
            Identity(_w(x1, _d(x1, y1, z1)), _d(x1, y1, z1))),
        "block-closure-2": Quasiidentity(
            sim_prem(x1, y1) + sim_prem(x1, z1),
            Identity(_w(_d(x1, y1, z1), x1), x1)),
    }
    return identities, quasis
