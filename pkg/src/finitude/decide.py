"""Classification: is the solution set empty, finite (and which), or infinite.

The verdict for a plain-P constraint system follows the congruential
criterion of its oracle: a system not in good position is inconsistent;
one whose residue clauses all hold has infinitely many solutions (tagged
with the oracle's conditionality); otherwise the failing boundary modulus
traps every solution in a finite set, which is enumerated and filtered by
exact membership tests.  General formulas are first rewritten into
branches and the branch verdicts are assembled.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .formula import BasicFormula, PrimaryFormula, Term, are_compatible
from .normalize import DEFAULT_BRANCH_CAP, normalize_basic
from .randomness import Instance, RandomnessOracle

INCONSISTENT = "Inconsistent"
FINITE = "Finite"
INFINITE = "Infinite"


@dataclass(frozen=True)
class Classification:
    """Verdict plus the data backing it.

    solutions and witness_k are set for Finite verdicts (witness_k is the
    boundary modulus that trapped the solutions; None when the finite set
    came from equality pinning or a multi-branch union).  conditionality is
    set for Infinite verdicts.  compatible reports the cross-conjunct check
    of classify_conjunction.  branch_count/branch_chi carry the branch
    breakdown when the verdict came through normalization.
    """

    verdict: str
    solutions: tuple[int, ...] | None = None
    witness_k: int | None = None
    conditionality: str | None = None
    compatible: bool | None = None
    branch_count: int | None = None
    branch_chi: tuple[bool | None, ...] | None = None


def _fold_constant_terms(
    f: PrimaryFormula | Instance, oracle: RandomnessOracle
) -> tuple[tuple[Term, ...], tuple[Term, ...]] | None:
    """Evaluate coeff-0 terms by membership; None means a contradiction."""
    pos, neg = [], []
    for t in f.positive:
        if t.coeff == 0:
            if not oracle.membership(t.const):
                return None
        else:
            pos.append(t)
    for t in f.negative:
        if t.coeff == 0:
            if oracle.membership(t.const):
                return None
        else:
            neg.append(t)
    return tuple(pos), tuple(neg)


def classify_primary(
    f: PrimaryFormula | Instance, oracle: RandomnessOracle
) -> Classification:
    """Classify a plain-P constraint system under the given oracle."""
    folded = _fold_constant_terms(f, oracle)
    if folded is None:
        return Classification(INCONSISTENT)
    inst = Instance(*folded)
    if not inst.good_position:
        return Classification(INCONSISTENT)
    if oracle.chi_holds(inst):
        return Classification(INFINITE, conditionality=oracle.conditionality)
    if oracle.positive_failing_modulus(inst) is None:
        # no positive-side trap: a negated term proportional to an asserted
        # one cannot leave the predicate, so the solution set is empty
        return Classification(FINITE, solutions=())
    k = oracle.failing_boundary_witness(inst)
    trapped = oracle.boundary_trapped_set(k)
    candidates: set[int] = set()
    for t in inst.positive:
        for v in trapped:
            num = v - t.const
            if num % t.coeff == 0:
                candidates.add(num // t.coeff)
    solutions = tuple(
        sorted(x for x in candidates if inst.holds_at(x, oracle.membership))
    )
    return Classification(FINITE, solutions=solutions, witness_k=k)


def classify_conjunction(
    fs: list[PrimaryFormula], oracle: RandomnessOracle
) -> Classification:
    """Classify the conjunction of several plain-P formulas.

    Incompatible conjuncts (a term positive in one, negative in another)
    are inconsistent outright; otherwise the conjuncts merge into one
    deduplicated formula.
    """
    if not are_compatible(fs):
        return Classification(INCONSISTENT, compatible=False)
    merged = PrimaryFormula(
        tuple(t for f in fs for t in f.positive),
        tuple(t for f in fs for t in f.negative),
    )
    return replace(classify_primary(merged, oracle), compatible=True)


def resolve_equalities(f: BasicFormula) -> BasicFormula | frozenset[int]:
    """Strip equality atoms, pinning x where they force a single value.

    Returns the formula without equalities when they are all trivially
    true, the pinned candidate set ({x0} or, when unsatisfiable, the empty
    set) otherwise.  Remaining atoms still need evaluating at the pinned
    value.
    """
    pinned: int | None = None
    for eq in f.equalities:
        if eq.coeff == 0:
            if eq.const != eq.value:
                return frozenset()
            continue
        num = eq.value - eq.const
        if num % eq.coeff:
            return frozenset()
        x0 = num // eq.coeff
        if pinned is None:
            pinned = x0
        elif pinned != x0:
            return frozenset()
    if pinned is None:
        return BasicFormula(f.congruences, f.atoms)
    return frozenset({pinned})


def decide_exists_basic(
    f: BasicFormula,
    oracle: RandomnessOracle,
    *,
    branch_cap: int = DEFAULT_BRANCH_CAP,
) -> Classification:
    """Classify a basic formula: normalize into branches, classify each,
    and assemble the overall verdict.

    Any infinite branch makes the whole formula infinite; otherwise the
    finite branch solutions are transported through the substitution terms
    and unioned.  Equality atoms short-circuit to direct evaluation.
    """
    resolved = resolve_equalities(f)
    if isinstance(resolved, frozenset):
        if not resolved:
            return Classification(INCONSISTENT)
        rest = BasicFormula(f.congruences, f.atoms)
        solutions = tuple(
            sorted(x for x in resolved if rest.holds_at(x, oracle.membership))
        )
        return Classification(FINITE, solutions=solutions)
    f = resolved

    atoms = []
    for a in f.atoms:
        if a.term.coeff == 0:
            if not a.holds_at(0, oracle.membership):
                return Classification(INCONSISTENT)
            continue
        atoms.append(a)
    f = BasicFormula(f.congruences, tuple(atoms))

    branches = normalize_basic(f, branch_cap=branch_cap)
    if not branches:
        return Classification(INCONSISTENT, branch_count=0, branch_chi=())

    results = [classify_primary(b.psi, oracle) for b in branches]
    chi = tuple(
        True if r.verdict == INFINITE else False if r.verdict == FINITE else None
        for r in results
    )
    n = len(branches)
    if any(r.verdict == INFINITE for r in results):
        return Classification(
            INFINITE,
            conditionality=oracle.conditionality,
            branch_count=n,
            branch_chi=chi,
        )
    if all(r.verdict == INCONSISTENT for r in results):
        return Classification(INCONSISTENT, branch_count=n, branch_chi=chi)
    transported: set[int] = set()
    finite = []
    for branch, r in zip(branches, results):
        if r.verdict == FINITE:
            finite.append(r)
            for e in r.solutions:
                transported.add(branch.subst_coeff * e + branch.subst_const)
    witness = finite[0].witness_k if len(finite) == 1 else None
    return Classification(
        FINITE,
        solutions=tuple(sorted(transported)),
        witness_k=witness,
        branch_count=n,
        branch_chi=chi,
    )
