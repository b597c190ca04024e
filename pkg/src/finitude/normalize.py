"""Rewrite a congruence-and-P_n conjunction into plain-P branches.

A formula built from congruences and signed P_k atoms is expanded into
finitely many branches.  Each branch fixes a residue context, carries a
substitution term t(x) = subst_coeff*x + subst_const, and a plain-P
formula psi such that the images t(e) of the psi-solutions partition the
original solution set:

* every negated P_k atom splits into k cases - for each nonzero residue j
  the atom reduces to a congruence "term = j mod k", and one case keeps
  the atom together with the divisibility congruence "term = 0 mod k";
* positive P_k atoms contribute their divisibility congruence outright;
* per case, all congruences consolidate (CRT) into a single class
  x = R mod M, giving t1(x) = M*x + R;
* the atom indices remaining in the case span N = lcm(indices) residue
  sub-branches; sub-branch m0 substitutes t(x) = M*N*x + (M*m0 + R) and
  divides each atom constant by its index, leaving only plain P atoms.

Inconsistent cases are pruned, so every surviving branch is realizable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm

from .arith import CongruenceClass, crt, solve_linear_congruence
from .formula import (
    BasicFormula,
    CongruenceAtom,
    PredicateAtom,
    PrimaryFormula,
    Term,
    unify_coefficients,
)

DEFAULT_BRANCH_CAP = 100_000


class BranchCapExceeded(RuntimeError):
    """Raised when branch enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class DerivationTrace:
    """The constants produced while deriving one branch, in pipeline order.

    unified_coeff     shared atom coefficient after rescaling
    combined_coeff    coefficient of the consolidated congruence (canonical 1)
    combined_modulus  modulus of the consolidated congruence
    shared_divisor    gcd of combined coefficient and modulus
    reduced_coeff     combined coefficient divided by the shared divisor
    reduced_modulus   combined modulus divided by the shared divisor
    inverse_unit      unit inverting the reduced coefficient mod reduced_modulus
    shift_constant    c with t1(x) = reduced_modulus*x - c
    index_span        lcm N of the surviving atom indices (1: no residue split)
    residue_choice    the residue m0 < N this branch assumes
    divided_constants per-atom constants after dividing out the index
    """

    unified_coeff: int
    combined_coeff: int
    combined_modulus: int
    shared_divisor: int
    reduced_coeff: int
    reduced_modulus: int
    inverse_unit: int
    shift_constant: int
    index_span: int
    residue_choice: int
    divided_constants: tuple[int, ...]


@dataclass(frozen=True)
class NormalizationBranch:
    """One branch: residue context, substitution term, plain-P formula."""

    witness_class: CongruenceClass
    subst_coeff: int
    subst_const: int
    psi: PrimaryFormula
    trace: DerivationTrace

    @property
    def subst_term(self) -> Term:
        return Term(self.subst_coeff, self.subst_const)

    def preimage(self, b: int) -> int | None:
        """The unique e with t(e) = b, or None when b is outside the image."""
        if b not in self.witness_class:
            return None
        return (b - self.subst_const) // self.subst_coeff


@dataclass(frozen=True)
class NegExpansionCase:
    """One case of a negated P_k atom: a congruence, a retained atom, or both."""

    congruence: CongruenceAtom | None
    retained: PredicateAtom | None


def expand_neg_Pk(atom: PredicateAtom) -> list[NegExpansionCase]:
    """The k cases of a negated P_k atom.

    For j = 1..k-1 the atom is equivalent to "term = j mod k" alone; the
    last case keeps the negated atom and adds "term = 0 mod k".  For k = 1
    there is a single case retaining the atom.
    """
    if not atom.negated:
        raise ValueError("expand_neg_Pk expects a negated atom")
    k = atom.index
    t = atom.term
    if k == 1:
        return [NegExpansionCase(None, atom)]
    cases = [
        NegExpansionCase(CongruenceAtom(t.coeff, t.const, k, j), None)
        for j in range(1, k)
    ]
    cases.append(NegExpansionCase(CongruenceAtom(t.coeff, t.const, k, 0), atom))
    return cases


def normalize_basic(
    f: BasicFormula, *, branch_cap: int = DEFAULT_BRANCH_CAP
) -> list[NormalizationBranch]:
    """Expand a basic formula into branches whose t-images partition it.

    Requires equality atoms to be resolved and constant atoms folded
    beforehand.  An empty branch list means the formula is unsatisfiable
    on congruence grounds alone.
    """
    if f.equalities:
        raise ValueError("resolve equality atoms before normalization")
    if any(a.term.coeff == 0 for a in f.atoms):
        raise ValueError("fold constant predicate atoms before normalization")

    base_classes: list[CongruenceClass] = []
    for c in f.congruences:
        cls = solve_linear_congruence(c.coeff, c.const - c.residue, c.modulus)
        if cls is None:
            return []
        base_classes.append(cls)

    negatives = [a for a in f.atoms if a.negated]
    expansions = [expand_neg_Pk(a) for a in negatives]
    total_choices = 1
    for e in expansions:
        total_choices *= len(e)
        if total_choices > branch_cap:
            raise BranchCapExceeded(
                f"negation expansion needs {total_choices}+ cases (cap {branch_cap})"
            )

    branches: list[NormalizationBranch] = []
    for combo in itertools.product(*expansions):
        classes = list(base_classes)
        consistent = True
        cases = iter(combo)
        kept: list[PredicateAtom] = []
        for a in f.atoms:
            if a.negated:
                case = next(cases)
                if case.congruence is not None:
                    cong = case.congruence
                    cls = solve_linear_congruence(
                        cong.coeff, cong.const - cong.residue, cong.modulus
                    )
                    if cls is None:
                        consistent = False
                        break
                    classes.append(cls)
                if case.retained is not None:
                    kept.append(case.retained)
            else:
                kept.append(a)
        if not consistent:
            continue

        uni = unify_coefficients(BasicFormula(atoms=tuple(kept)))
        remaining = list(uni.atoms)
        m = remaining[0].term.coeff if remaining else 1
        for a in remaining:
            if a.index > 1:
                cls = solve_linear_congruence(m, a.term.const, a.index)
                if cls is None:
                    consistent = False
                    break
                classes.append(cls)
        if not consistent:
            continue
        merged = crt(classes)
        if merged is None:
            continue
        mod_m, res_r = merged.modulus, merged.residue

        span = lcm(*(a.index for a in remaining)) if remaining else 1
        if len(branches) + span > branch_cap:
            raise BranchCapExceeded(
                f"residue split needs more than {branch_cap} branches"
            )

        for m0 in range(span):
            pos_terms: list[Term] = []
            neg_terms: list[Term] = []
            divided: list[int] = []
            for a in remaining:
                shifted = a.term.const + m * res_r + m * mod_m * m0
                if shifted % a.index:
                    raise AssertionError(
                        "divisibility lost in a consistent branch; this is a bug"
                    )
                d = shifted // a.index
                divided.append(d)
                term = Term(m * mod_m * (span // a.index), d)
                (neg_terms if a.negated else pos_terms).append(term)
            subst_coeff = mod_m * span
            subst_const = mod_m * m0 + res_r
            trace = DerivationTrace(
                unified_coeff=m,
                combined_coeff=1,
                combined_modulus=mod_m,
                shared_divisor=1,
                reduced_coeff=1,
                reduced_modulus=mod_m,
                inverse_unit=1,
                shift_constant=-res_r,
                index_span=span,
                residue_choice=m0,
                divided_constants=tuple(divided),
            )
            branches.append(
                NormalizationBranch(
                    witness_class=CongruenceClass(subst_coeff, subst_const),
                    subst_coeff=subst_coeff,
                    subst_const=subst_const,
                    psi=PrimaryFormula(tuple(pos_terms), tuple(neg_terms)),
                    trace=trace,
                )
            )

    branches.sort(key=lambda br: (br.witness_class.residue, br.witness_class.modulus))
    return branches


@dataclass(frozen=True)
class CoverReport:
    """Exhaustive soundness/completeness check of a branch set on a window."""

    checked: int
    soundness_violations: tuple[int, ...]
    completeness_violations: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.soundness_violations and not self.completeness_violations


def branch_cover_check(
    f: BasicFormula,
    branches: list[NormalizationBranch],
    bound: int,
    oracle,
    *,
    max_listed: int = 20,
) -> CoverReport:
    """Verify on [-bound, bound] that every satisfying b is accepted by
    exactly one branch (integral preimage satisfying psi) and that accepted
    values satisfy the formula."""
    import numpy as np

    from . import verify

    if bound < 1:
        raise ValueError("bound must be >= 1")
    direct = verify.accept_mask(f, oracle, -bound, bound + 1)

    limit = 0
    for br in branches:
        lo = -((bound + br.subst_const) // br.subst_coeff)
        hi = (bound - br.subst_const) // br.subst_coeff
        e_mag = max(abs(lo), abs(hi), 0)
        for t in br.psi.positive + br.psi.negative:
            limit = max(limit, abs(t.coeff) * e_mag + abs(t.const))
    bitmap = verify.membership_bitmap(oracle, max(limit, 1))

    acc = np.zeros(2 * bound + 1, dtype=np.int64)
    for br in branches:
        step = br.subst_coeff
        # smallest b >= -bound congruent to subst_const mod step
        first = br.subst_const - ((br.subst_const + bound) // step) * step
        bs = np.arange(first, bound + 1, step, dtype=np.int64)
        if bs.size == 0:
            continue
        es = (bs - br.subst_const) // step
        ok = np.ones(es.shape, dtype=bool)
        for t in br.psi.positive:
            ok &= bitmap.test_abs(t.coeff * es + t.const)
        for t in br.psi.negative:
            ok &= ~bitmap.test_abs(t.coeff * es + t.const)
        np.add.at(acc, bs + bound, ok.astype(np.int64))

    expected = direct.astype(np.int64)
    bad = np.flatnonzero(acc != expected)
    sound = [int(b) - bound for b in bad if not direct[b]][:max_listed]
    complete = [int(b) - bound for b in bad if direct[b]][:max_listed]
    return CoverReport(2 * bound + 1, tuple(sound), tuple(complete))
