import random

from finitude.decide import (
    FINITE,
    INCONSISTENT,
    INFINITE,
    classify_conjunction,
    classify_primary,
    decide_exists_basic,
    resolve_equalities,
)
from finitude.formula import BasicFormula, PrimaryFormula, Term, parse_formula
from finitude.randomness import (
    DICKSON_CONDITIONAL,
    UNCONDITIONAL,
    GenericOracle,
    PrimesOracle,
    SquarefreeOracle,
)

PR = PrimesOracle()
SF = SquarefreeOracle()


def primary(text):
    return parse_formula(text).as_primary()


def test_classify_adjacent_primes():
    cls = classify_primary(primary("P(x) & P(x+1)"), PR)
    assert cls.verdict == FINITE
    assert cls.solutions == (-3, 2)
    assert cls.witness_k == 2


def test_classify_squarefree_multiple_of_four():
    cls = classify_primary(primary("P(4x)"), SF)
    assert cls.verdict == FINITE
    assert cls.solutions == ()
    assert cls.witness_k == 4


def test_classify_bad_position_inconsistent():
    x = Term(1, 0)
    assert classify_primary(PrimaryFormula((x,), (x,)), PR).verdict == INCONSISTENT


def test_classify_twin_primes_conditional():
    cls = classify_primary(primary("P(x) & P(x+2)"), PR)
    assert cls.verdict == INFINITE
    assert cls.conditionality == DICKSON_CONDITIONAL


def test_classify_squarefree_unconditional():
    cls = classify_primary(primary("P(x)"), SF)
    assert cls.verdict == INFINITE
    assert cls.conditionality == UNCONDITIONAL


def test_classify_generic_tag():
    cls = classify_primary(primary("P(x) & !P(x+1)"), GenericOracle(seed=4))
    assert cls.verdict == INFINITE
    assert cls.conditionality == "generic-probabilistic"


def test_classify_folds_constant_terms():
    assert classify_primary(primary("P(3) & P(x)"), PR).verdict == INFINITE
    assert classify_primary(primary("P(4) & P(x)"), PR).verdict == INCONSISTENT
    assert classify_primary(primary("!P(4) & P(x)"), PR).verdict == INFINITE
    assert classify_primary(primary("!P(3) & P(x)"), PR).verdict == INCONSISTENT


def test_classify_finite_members_verified_by_membership():
    cls = classify_primary(primary("P(x) & P(x+1)"), PR)
    for x in cls.solutions:
        assert PR.membership(x) and PR.membership(x + 1)


def test_classify_conjunction_examples():
    x = Term(1, 0)
    incompatible = classify_conjunction(
        [PrimaryFormula((x,), ()), PrimaryFormula((), (x,))], PR
    )
    assert incompatible.verdict == INCONSISTENT
    assert incompatible.compatible is False

    merged = classify_conjunction(
        [PrimaryFormula((x,), ()), PrimaryFormula((Term(1, 2),), ())], PR
    )
    assert merged.verdict == INFINITE
    assert merged.compatible is True
    assert merged.conditionality == DICKSON_CONDITIONAL

    idempotent = classify_conjunction(
        [PrimaryFormula((x,), ()), PrimaryFormula((x,), ())], SF
    )
    assert idempotent.verdict == INFINITE
    assert idempotent.conditionality == UNCONDITIONAL


def test_decide_indexed_atom_squarefree():
    cls = decide_exists_basic(parse_formula("P_2(x)"), SF)
    assert cls.verdict == INFINITE
    assert cls.conditionality == UNCONDITIONAL
    assert cls.branch_count == 2
    assert cls.branch_chi == (True, True)


def test_decide_congruence_restriction_primes():
    cls = decide_exists_basic(parse_formula("P(x) & x = 0 mod 4"), PR)
    assert cls.verdict == FINITE
    assert cls.solutions == ()
    assert cls.witness_k == 2


def test_decide_plain_prime_atom():
    cls = decide_exists_basic(parse_formula("P(x)"), PR)
    assert cls.verdict == INFINITE
    assert cls.conditionality == DICKSON_CONDITIONAL


def test_decide_self_contradiction():
    assert decide_exists_basic(parse_formula("P(x) & !P(x)"), PR).verdict == INCONSISTENT


def test_decide_congruence_only_formula():
    cls = decide_exists_basic(parse_formula("x = 1 mod 2"), SF)
    assert cls.verdict == INFINITE


def test_decide_unsatisfiable_congruences():
    cls = decide_exists_basic(parse_formula("P(x) & x = 0 mod 2 & x = 1 mod 2"), SF)
    assert cls.verdict == INCONSISTENT
    assert cls.branch_count == 0


def test_decide_finite_transport():
    # P_2 of adjacent pair: solutions of P(x)&P(x+1) scaled by 2
    cls = decide_exists_basic(parse_formula("P_2(2x) & P_2(2x+2)"), PR)
    assert cls.verdict == FINITE
    assert cls.solutions == (-3, 2)


def test_resolve_equalities():
    f = parse_formula("P(x) & 2x = 6")
    assert resolve_equalities(f) == frozenset({3})
    assert resolve_equalities(parse_formula("P(x) & 2x = 5")) == frozenset()
    assert resolve_equalities(parse_formula("P(x) & x = 4 & x = 5")) == frozenset()
    stripped = resolve_equalities(parse_formula("P(x) & 0x = 0"))
    assert isinstance(stripped, BasicFormula)
    assert stripped == parse_formula("P(x)")
    assert resolve_equalities(parse_formula("P(x) & 3 = 4")) == frozenset()


def test_decide_with_equalities():
    assert decide_exists_basic(parse_formula("P(x) & 2x = 6"), PR).solutions == (3,)
    assert decide_exists_basic(parse_formula("P(x) & 2x = 5"), PR).verdict == INCONSISTENT
    cls = decide_exists_basic(parse_formula("P(x) & x = 4"), PR)
    assert cls.verdict == FINITE and cls.solutions == ()
    pinned = decide_exists_basic(parse_formula("P(x) & x = 3 & x = 1 mod 2"), PR)
    assert pinned.solutions == (3,)
    pinned_out = decide_exists_basic(parse_formula("P(x) & x = 3 & x = 0 mod 2"), PR)
    assert pinned_out.verdict == FINITE and pinned_out.solutions == ()


def test_decide_constant_atoms():
    assert decide_exists_basic(parse_formula("P(5)"), PR).verdict == INFINITE
    assert decide_exists_basic(parse_formula("P(4)"), PR).verdict == INCONSISTENT
    assert decide_exists_basic(parse_formula("P_2(6)"), PR).verdict == INFINITE
    assert decide_exists_basic(parse_formula("P_2(5)"), PR).verdict == INCONSISTENT


def test_prime_finite_verdicts_match_window_scans():
    # finite verdicts under primes are unconditional facts
    from finitude.sampling import random_instance
    from finitude.verify import count_solutions

    rng = random.Random(41)
    confirmed = 0
    for _ in range(200):
        inst = random_instance(rng)
        cls = classify_primary(inst, PR)
        if cls.verdict != FINITE:
            continue
        confirmed += 1
        cnt, sols = count_solutions(inst, PR, 10**6, workers=2)
        assert cnt == len(cls.solutions)
        assert sols == list(cls.solutions)
        if confirmed >= 8:
            break
    assert confirmed > 0


def test_adding_positive_atom_never_grows_solutions():
    from finitude.verify import count_solutions

    rng = random.Random(23)
    from finitude.sampling import random_instance

    for _ in range(20):
        inst = random_instance(rng, max_pos=2)
        extra = Term(rng.randint(1, 5), rng.randint(-30, 30))
        if extra in inst.negative:
            continue
        bigger = PrimaryFormula(inst.positive + (extra,), inst.negative)
        base_count, _ = count_solutions(inst, SF, 2000)
        bigger_count, _ = count_solutions(bigger, SF, 2000)
        assert bigger_count <= base_count
