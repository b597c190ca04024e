"""Seeded generators for random constraint systems and formulas."""

from __future__ import annotations

import random

from .formula import BasicFormula, CongruenceAtom, PredicateAtom, PrimaryFormula, Term
from .randomness import Instance


def _distinct_terms(rng: random.Random, n: int, max_coeff: int, max_const: int) -> list[Term]:
    terms: dict[Term, None] = {}
    while len(terms) < n:
        terms[Term(rng.randint(1, max_coeff), rng.randint(-max_const, max_const))] = None
    return list(terms)


def random_instance(
    rng: random.Random,
    *,
    max_pos: int = 3,
    max_neg: int = 2,
    max_coeff: int = 5,
    max_const: int = 30,
) -> Instance:
    """A random constraint system in good position (positive part nonempty)."""
    r = rng.randint(1, max_pos)
    r_neg = rng.randint(0, max_neg)
    terms = _distinct_terms(rng, r + r_neg, max_coeff, max_const)
    return Instance(tuple(terms[:r]), tuple(terms[r:]))


def random_primary(rng: random.Random, **kwargs) -> PrimaryFormula:
    inst = random_instance(rng, **kwargs)
    return PrimaryFormula(inst.positive, inst.negative)


def random_basic_formula(
    rng: random.Random,
    *,
    max_atoms: int = 4,
    max_coeff: int = 6,
    max_index: int = 6,
    max_const: int = 50,
    max_congruences: int = 2,
    max_modulus: int = 6,
    negation_rate: float = 0.4,
) -> BasicFormula:
    """A random conjunction of signed P_n atoms and congruences."""
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        term = Term(rng.randint(1, max_coeff), rng.randint(-max_const, max_const))
        atoms.append(
            PredicateAtom(term, rng.randint(1, max_index), rng.random() < negation_rate)
        )
    congruences = []
    for _ in range(rng.randint(0, max_congruences)):
        modulus = rng.randint(1, max_modulus)
        congruences.append(
            CongruenceAtom(
                rng.randint(1, max_coeff),
                rng.randint(-max_const, max_const),
                modulus,
                rng.randint(0, modulus - 1),
            )
        )
    return BasicFormula(tuple(congruences), tuple(atoms))
