"""Term-iteration pipeline for weak near-unanimity operations.

Stages: the binary operation x o y = w(x,...,x,y) derived from a wnu w,
the n-fold iteration of w that makes covering class pairs behave like
meets, the absorption-closed (special) version of o obtained through
unique idempotent powers of the maps y -> x o y, the derived binary
candidate (y o x) o y which is a semilattice modulo sim and the second
projection on classes, and the regularization transform that upgrades an
SMB algebra to a regular one on the same universe.

Factorial-fold compositions are never performed literally: for a self-map
f of a finite set, f composed with itself |A|! times is the unique
idempotent element of the monogenic semigroup generated by f, and that
idempotent is computed by fast exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .core import (AlgebraError, FalsificationError, FiniteAlgebra,
                   OperationTable, PreconditionError, table_flags)
from .partitions import Partition
from .analyzer import (ClassOrder, SmbReport, WEDGE, D, check_regular_base,
                       check_smb_over, find_smb_congruences, recovered_sim)
from .relations import congruence_lattice, congruence_violation, is_abelian

ITERATION_ENTRY_CAP = 1_000_000


class RepresentativeInconsistency(AlgebraError):
    """The class order is ill defined: the defining comparison gives
    different answers for different representatives of the same classes."""


# ---------------------------------------------------------------------------
# Idempotent powers of self-maps

def idempotent_power(f: Sequence[int]) -> tuple:
    """The unique idempotent in {f, f^2, f^3, ...}.

    Equals the |A|!-fold composition of f with itself, computed by fast
    exponentiation instead of literal iteration.
    """
    n = len(f)
    exponent = math.factorial(n)
    base = tuple(f)
    result = None
    while exponent:
        if exponent & 1:
            result = base if result is None else tuple(base[x] for x in result)
        exponent >>= 1
        if exponent:
            base = tuple(base[x] for x in base)
    assert result is not None
    if tuple(result[x] for x in result) != result:
        raise FalsificationError("factorial power of a self-map is not idempotent")
    return result


def literal_power(f: Sequence[int], times: int) -> tuple:
    """f composed with itself `times` times, one composition at a time."""
    if times < 1:
        raise AlgebraError("need at least one composition")
    f = tuple(f)
    g = f
    for _ in range(times - 1):
        g = tuple(f[x] for x in g)
    return g


# ---------------------------------------------------------------------------
# Pipeline stages

def _require_wnu(alg: FiniteAlgebra, w_symbol: str) -> OperationTable:
    table = alg.op(w_symbol)
    flags = table_flags(table)
    if not flags.wnu:
        raise PreconditionError(
            f"operation '{w_symbol}' of '{alg.name}' is not a weak "
            f"near-unanimity operation")
    return table


def _circ_of(table: OperationTable) -> OperationTable:
    """x o y = w(x, ..., x, y) for a wnu table w."""
    n = table.size
    k = table.arity
    entries = []
    for x in range(n):
        prefix = (x,) * (k - 1)
        for y in range(n):
            entries.append(table.entries[table.index(prefix + (y,))])
    return OperationTable(2, n, entries)


def circ_table(alg: FiniteAlgebra, w_symbol: str) -> OperationTable:
    """The binary table x o y = w(x, ..., x, y); requires w to be wnu."""
    return _circ_of(_require_wnu(alg, w_symbol))


def iterate_wnu(alg: FiniteAlgebra, w_symbol: str,
                max_entries: int = ITERATION_ENTRY_CAP) -> OperationTable:
    """The |A|-th iterate of w under
    w_{i+1}(xs) = w_i(w_i(xs) o x_1, ..., w_i(xs) o x_n).

    Each iterate is verified to stay wnu; losing the property would be an
    internal falsification.  Stops early at a table fixpoint.
    """
    table = _require_wnu(alg, w_symbol)
    n = alg.size
    k = table.arity
    if n ** k > max_entries:
        raise AlgebraError(
            f"iterating an arity-{k} table on {n} elements needs {n ** k} "
            f"entries, above the cap {max_entries}")
    current = table
    # argument tuples enumerated once, reused across iterations
    args_list = []
    for idx in range(n ** k):
        rem, args = idx, []
        for _ in range(k):
            args.append(rem % n)
            rem //= n
        args.reverse()
        args_list.append(tuple(args))
    for _ in range(1, n):
        circ = _circ_of(current)
        centries = circ.entries
        entries = current.entries
        new = []
        for idx, args in enumerate(args_list):
            m = entries[idx]
            inner = 0
            for a in args:
                inner = inner * n + centries[m * n + a]
            new.append(entries[inner])
        new_table = OperationTable(k, n, new)
        if not table_flags(new_table).wnu:
            raise FalsificationError(
                f"iterating the wnu '{w_symbol}' on '{alg.name}' lost the "
                f"wnu property")
        if new_table == current:
            break
        current = new_table
    return current


def special_circ(alg: FiniteAlgebra, w_symbol: str) -> OperationTable:
    """The binary operation of the absorption-closed (special) wnu derived
    from w, built directly from idempotent powers of the maps y -> x o y.

    The special wnu itself has arity k^(|A|!) and is never materialized;
    everything downstream only needs its binary operation.
    """
    return _special_of_circ(circ_table(alg, w_symbol))


def _special_of_circ(circ: OperationTable) -> OperationTable:
    n = circ.size
    entries = [0] * (n * n)
    for x in range(n):
        row = circ.entries[x * n:(x + 1) * n]
        h = idempotent_power(row)
        for y in range(n):
            entries[x * n + y] = h[y]
    out = OperationTable(2, n, entries)
    for x in range(n):
        for y in range(n):
            xy = out.entries[x * n + y]
            if out.entries[x * n + xy] != xy:
                raise FalsificationError(
                    f"special circ is not absorbing at ({x}, {y})")
    return out


# ---------------------------------------------------------------------------
# Class order

@dataclass(frozen=True)
class OrderDiagnostics:
    reflexive: bool
    antisymmetric: bool
    transitive: bool
    has_least: bool
    has_greatest: bool
    glb_closed: bool

    @property
    def is_partial_order(self) -> bool:
        return self.reflexive and self.antisymmetric and self.transitive


def class_order_from_circ(alg: FiniteAlgebra, circ: OperationTable,
                          sim: Partition) -> Tuple[ClassOrder, OrderDiagnostics]:
    """Order the sim-classes by [x] <= [y] iff (y o x) ~ x.

    sim must be a congruence of the algebra and circ must be compatible
    with sim; otherwise the comparison would depend on the representatives
    chosen, which is surfaced as RepresentativeInconsistency.
    """
    bad = congruence_violation(alg, sim)
    if bad is not None:
        raise PreconditionError(f"sim is not a congruence: {bad}")
    if circ.size != alg.size:
        raise AlgebraError("circ table size does not match the algebra")
    n = alg.size
    ids = sim.class_ids
    for a in range(n):
        for b in range(n):
            if ids[a] != ids[b]:
                continue
            for x in range(n):
                if (ids[circ.entries[a * n + x]] != ids[circ.entries[b * n + x]]
                        or ids[circ.entries[x * n + a]] != ids[circ.entries[x * n + b]]):
                    raise RepresentativeInconsistency(
                        f"circ is not compatible with sim at representatives "
                        f"{a} ~ {b} against {x}")

    blocks = sim.blocks()
    m = len(blocks)
    reps = [blk[0] for blk in blocks]
    leq = frozenset((i, j) for i in range(m) for j in range(m)
                    if ids[circ.entries[reps[j] * n + reps[i]]] == i)
    order = ClassOrder(tuple(blocks), leq)

    reflexive = all((i, i) in leq for i in range(m))
    antisymmetric = all(not ((i, j) in leq and (j, i) in leq)
                        for i in range(m) for j in range(m) if i != j)
    transitive = all((i, k) in leq
                     for i in range(m) for j in range(m) for k in range(m)
                     if (i, j) in leq and (j, k) in leq)
    diag = OrderDiagnostics(
        reflexive, antisymmetric, transitive,
        order.least() is not None, order.greatest() is not None,
        order.glb_closed())
    return order, diag


# ---------------------------------------------------------------------------
# Full pipeline and the derived semilattice term

@dataclass(frozen=True)
class PipelineResult:
    circ: OperationTable            # o of the input wnu
    iterated_wnu: OperationTable    # the |A|-th iterate of w
    circ_iterated: OperationTable   # o of the iterate
    circ_special: OperationTable    # o of the derived special wnu
    wedge_candidate: OperationTable  # (y o x) o y over the special circ
    diagnostics: dict


def run_pipeline(alg: FiniteAlgebra, w_symbol: str) -> PipelineResult:
    """All term-construction stages for one wnu operation."""
    circ = circ_table(alg, w_symbol)
    iterated = iterate_wnu(alg, w_symbol)
    circ_iter = _circ_of(iterated)
    special = _special_of_circ(circ_iter)
    n = alg.size
    cand = [0] * (n * n)
    for x in range(n):
        for y in range(n):
            cand[x * n + y] = special.entries[special.entries[y * n + x] * n + y]
    wedge_candidate = OperationTable(2, n, cand)

    def idem(t):
        return all(t.entries[t.index((x,) * t.arity)] == x for x in range(n))

    diagnostics = {
        "circ": {"idempotent": idem(circ)},
        "iterated_wnu": {"idempotent": idem(iterated),
                         "wnu": table_flags(iterated).wnu,
                         "fixpoint": iterated == alg.op(w_symbol)},
        "circ_special": {"idempotent": idem(special),
                         "absorbing": True},   # construction verified it
        "wedge_candidate": {"idempotent": idem(wedge_candidate)},
    }
    return PipelineResult(circ, iterated, circ_iter, special, wedge_candidate,
                          diagnostics)


def _wedge_conclusion(size: int, table: OperationTable, sim: Partition) -> SmbReport:
    """Check that `table` is a semilattice modulo sim and the second
    projection on every sim-class; reported in SmbReport form."""
    ids = sim.class_ids
    blocks = sim.blocks()
    reps = [blk[0] for blk in blocks]
    m = len(blocks)
    n = size
    violations = []

    for a in range(n):
        for b in range(n):
            if ids[a] != ids[b]:
                continue
            for x in range(n):
                if ids[table.entries[a * n + x]] != ids[table.entries[b * n + x]] \
                        or ids[table.entries[x * n + a]] != ids[table.entries[x * n + b]]:
                    violations.append(("Congruence", (WEDGE, (a, x), (b, x))))
    def qw(i, j):
        return ids[table.entries[reps[i] * n + reps[j]]]

    if not violations:
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
                if table.entries[a * n + b] != b:
                    violations.append(("SecondProj", (a, b)))

    verdict = not violations
    order = None
    if verdict:
        leq = frozenset((i, j) for i in range(m) for j in range(m) if qw(i, j) == i)
        order = ClassOrder(tuple(blocks), leq)
    return SmbReport(verdict, sim, tuple(violations), order)


@dataclass(frozen=True)
class SemilatticeTermResult:
    table: OperationTable
    report: SmbReport
    hypotheses: dict
    hypotheses_established: bool
    conclusion_holds: bool


def semilattice_term(alg: FiniteAlgebra, w_symbol: str,
                     sim: Partition) -> SemilatticeTermResult:
    """The derived binary term (y o x) o y over the special circ of the
    iterated wnu, with the checkable surrogate hypotheses and the
    semilattice-plus-projection conclusion both verified.

    A failing conclusion under established hypotheses raises
    FalsificationError; with hypotheses not established the failure is
    only reported.
    """
    bad = congruence_violation(alg, sim)
    if bad is not None:
        raise PreconditionError(f"sim is not a congruence: {bad}")
    result = run_pipeline(alg, w_symbol)

    lattice = congruence_lattice(alg)
    maximal = (not sim.is_one) and not any(
        sim < theta < Partition.one(alg.size) for theta in lattice)
    _, diag = class_order_from_circ(alg, result.circ_iterated, sim)
    hypotheses = {
        "sim_abelian": is_abelian(alg, sim),
        "sim_maximal": maximal,
        "greatest_class_exists": diag.has_greatest,
    }
    established = all(hypotheses.values())

    report = _wedge_conclusion(alg.size, result.wedge_candidate, sim)
    if established and not report.verdict:
        raise FalsificationError(
            f"semilattice-term conclusion fails on '{alg.name}' although the "
            f"surrogate hypotheses hold: {report.violations[0]}")
    return SemilatticeTermResult(result.wedge_candidate, report, hypotheses,
                                 established, report.verdict)


# ---------------------------------------------------------------------------
# Regularization

def regularize(alg: FiniteAlgebra, sim: Optional[Partition] = None) -> FiniteAlgebra:
    """Replace wedge and d by term operations making the algebra regular,
    over the same universe and the same sim.

    wedge'(x, y) applies the unique idempotent power of t -> t wedge y to
    x, and d' is d composed with the three wedge'-folds
    ((y'z)'x, (x'z)'y, (x'y)'z).  The output is verified to satisfy the
    regular base with sim unchanged and d' = d on every sim-class.
    """
    if sim is None:
        sims = find_smb_congruences(alg)
        if not sims:
            raise PreconditionError(f"'{alg.name}' is not an SMB algebra")
        sim = sims[0]
    else:
        smb = check_smb_over(alg, sim)
        if not smb.verdict:
            raise PreconditionError(
                f"'{alg.name}' is not SMB over {sim}: {smb.violations[0]}")

    wedge, d = alg.op(WEDGE), alg.op(D)
    n = alg.size
    new_wedge = [0] * (n * n)
    for y in range(n):
        h = idempotent_power([wedge.entries[t * n + y] for t in range(n)])
        for x in range(n):
            new_wedge[x * n + y] = h[x]

    def w2(a, b):
        return new_wedge[a * n + b]

    new_d = []
    for x in range(n):
        for y in range(n):
            for z in range(n):
                u = w2(w2(y, z), x)
                v = w2(w2(x, z), y)
                w_ = w2(w2(x, y), z)
                new_d.append(d.entries[(u * n + v) * n + w_])
    out = FiniteAlgebra(f"{alg.name}_reg", n, {
        WEDGE: OperationTable(2, n, new_wedge),
        D: OperationTable(3, n, new_d),
    })

    base = check_regular_base(out)
    if not base.holds:
        failing = [k for k, v in base.verdicts.items() if not v.holds]
        raise FalsificationError(
            f"regularization of '{alg.name}' does not satisfy the regular "
            f"base; failing: {failing}")
    if base.recovered_sim != sim:
        raise FalsificationError(
            f"regularization of '{alg.name}' changed sim: {sim} became "
            f"{base.recovered_sim}")
    dn = d.entries
    dn_new = out.op(D).entries
    for blk in sim.blocks():
        for a in blk:
            for b in blk:
                for c in blk:
                    idx = (a * n + b) * n + c
                    if dn[idx] != dn_new[idx]:
                        raise FalsificationError(
                            f"regularization of '{alg.name}' changed d on the "
                            f"block triple ({a},{b},{c})")
    return out
