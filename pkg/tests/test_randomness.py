import pytest
from hypothesis import given
from hypothesis import strategies as st

from finitude.formula import Term
from finitude.randomness import (
    DICKSON_CONDITIONAL,
    GENERIC_PROBABILISTIC,
    UNCONDITIONAL,
    GenericOracle,
    Instance,
    PrimesOracle,
    SquarefreeOracle,
    get_oracle,
    is_prime,
    is_squarefree,
    primes_upto,
)


def inst(pos, neg=()):
    return Instance(tuple(Term(*t) for t in pos), tuple(Term(*t) for t in neg))


def test_membership_examples():
    assert PrimesOracle().membership(-3)
    assert not SquarefreeOracle().membership(12)
    assert SquarefreeOracle().membership(10)
    assert not PrimesOracle().membership(0)
    assert not SquarefreeOracle().membership(0)
    assert SquarefreeOracle().membership(1)
    assert not GenericOracle(seed=1).membership(0)


def test_is_prime_matches_trial_division():
    def trial(n):
        if n < 2:
            return False
        return all(n % d for d in range(2, int(n**0.5) + 1))

    for n in range(2000):
        assert is_prime(n) == trial(n), n


def test_is_squarefree_matches_definition():
    def direct(n):
        n = abs(n)
        if n == 0:
            return False
        return all(n % (d * d) for d in range(2, int(n**0.5) + 1))

    for n in range(-500, 2000):
        assert is_squarefree(n) == direct(n), n


def test_primes_upto_grows():
    assert primes_upto(10) == [2, 3, 5, 7]
    assert primes_upto(50)[-1] == 47
    assert len(primes_upto(10**4)) == 1229


@given(st.integers(-10**6, 10**6))
def test_symmetry_all_oracles(n):
    for oracle in (PrimesOracle(), SquarefreeOracle(), GenericOracle(seed=3)):
        assert oracle.membership(n) == oracle.membership(-n)


def test_generic_is_seeded_and_dense():
    a, b = GenericOracle(seed=1), GenericOracle(seed=2)
    assert [a.membership(n) for n in range(100)] == [
        a.membership(n) for n in range(100)
    ]
    assert [a.membership(n) for n in range(1000)] != [
        b.membership(n) for n in range(1000)
    ]
    hits = sum(a.membership(n) for n in range(1, 10001))
    assert 4500 < hits < 5500  # density 0.5
    thin = GenericOracle(seed=1, density=0.1)
    assert sum(thin.membership(n) for n in range(1, 10001)) < 1500


def test_generic_density_validation():
    with pytest.raises(ValueError):
        GenericOracle(density=0.0)
    with pytest.raises(ValueError):
        GenericOracle(density=1.0)


def test_get_oracle():
    assert get_oracle("primes").conditionality == DICKSON_CONDITIONAL
    assert get_oracle("squarefree").conditionality == UNCONDITIONAL
    assert get_oracle("generic", seed=9).conditionality == GENERIC_PROBABILISTIC
    with pytest.raises(ValueError):
        get_oracle("fibonacci")


def test_build_chi_prime_example():
    chi = PrimesOracle().build_chi(inst([(1, 0), (1, 2)]))
    assert chi.boundary == (2,)
    assert [c.modulus for c in chi.clauses] == [2]
    assert chi.clauses[0].coeffs == (1, 1)


def test_build_chi_squarefree_example():
    chi = SquarefreeOracle().build_chi(inst([(4, 0)]))
    assert chi.boundary == (4, 9, 25)


def test_build_chi_generic_always_trivial():
    chi = GenericOracle(seed=5).build_chi(inst([(3, 1), (2, 0)]))
    assert chi.boundary == () and chi.trivially_true


def test_build_chi_empty_positive_part():
    for oracle in (PrimesOracle(), SquarefreeOracle()):
        chi = oracle.build_chi(inst([], [(1, 0)]))
        assert chi.boundary == () and chi.trivially_true


def test_build_chi_ignores_negative_terms():
    oracle = PrimesOracle()
    assert oracle.build_chi(inst([(1, 0)])) == oracle.build_chi(
        inst([(1, 0)], [(7, 3)])
    )


def test_chi_holds_examples():
    pr, sf = PrimesOracle(), SquarefreeOracle()
    assert pr.chi_holds(inst([(1, 0), (1, 2)]))
    assert not pr.chi_holds(inst([(1, 0), (1, 1)]))
    assert not sf.chi_holds(inst([(4, 0)]))


def test_chi_holds_rejects_bad_position():
    bad = Instance((Term(1, 0),), (Term(1, 0),))
    with pytest.raises(ValueError, match="good position"):
        PrimesOracle().chi_holds(bad)


def test_failing_boundary_witness_examples():
    pr, sf = PrimesOracle(), SquarefreeOracle()
    assert pr.failing_boundary_witness(inst([(1, 0), (1, 1)])) == 2
    assert sf.failing_boundary_witness(inst([(4, 0)])) == 4
    assert sf.failing_boundary_witness(inst([(2, 0), (2, 2)])) == 4
    # 9x+3 is never 0 mod 9, so the condition holds and the witness call errors
    assert sf.chi_holds(inst([(9, 3)]))
    with pytest.raises(ValueError, match="holds"):
        sf.failing_boundary_witness(inst([(9, 3)]))


def test_witness_property_brute_force():
    # whenever the positive-part condition fails, every residue s < k kills
    # some asserted term
    import random

    from finitude.sampling import random_instance

    rng = random.Random(5)
    for oracle in (PrimesOracle(), SquarefreeOracle()):
        checked = 0
        for _ in range(300):
            instance = random_instance(rng)
            constants = tuple(t.const for t in instance.positive)
            if oracle.build_chi(instance).evaluate(constants):
                continue
            checked += 1
            k = oracle.failing_boundary_witness(instance)
            assert k in oracle.build_chi(instance).boundary
            for s in range(k):
                assert any(
                    (t.coeff * s + t.const) % k == 0 for t in instance.positive
                )
        assert checked > 0


def test_chi_blocked_proportional_negation():
    # a negated multiple of an asserted term can leave the square-free set
    # only at a prime dividing its extra content; with none viable the
    # solution set is empty and chi must come out false
    sf = SquarefreeOracle()
    # P(2x+14) forces x even, so killing 2(x+1) at p=2 is impossible while
    # 5(x+1) stays square-free: empty solution set
    empty = inst([(5, 5), (2, 14), (1, 5)], [(2, 2)])
    assert sf.build_chi(empty).evaluate((5, 14, 5))  # positive part passes
    assert not sf.chi_holds(empty)
    with pytest.raises(ValueError):
        sf.failing_boundary_witness(empty)

    # !P(x+1) against P(2x+2): content 1, no kill prime at all
    assert not sf.chi_holds(inst([(2, 2)], [(1, 1)]))
    # !P(6x+6) against P(3x+3): 2 is viable (v_2 jumps from 0 to 1)
    assert sf.chi_holds(inst([(3, 3)], [(6, 6)]))
    # !P(2x+2) against P(x+1): x+1 = 2 mod 4 works
    assert sf.chi_holds(inst([(1, 1)], [(2, 2)]))
    # !P(2x+2) against P(6x+6): P(6x+6) forces x+1 odd, so 2(x+1) stays
    # square-free; empty
    assert not sf.chi_holds(inst([(6, 6)], [(2, 2)]))
    # primes are unaffected: P(x) & !P(2x) is plainly infinite
    assert PrimesOracle().chi_holds(inst([(1, 0)], [(2, 0)]))


def test_classify_blocked_proportional_negation():
    from finitude.decide import FINITE, classify_primary
    from finitude.formula import PrimaryFormula
    from finitude.verify import count_solutions

    sf = SquarefreeOracle()
    blocked = PrimaryFormula(
        (Term(5, 5), Term(2, 14), Term(1, 5)), (Term(2, 2),)
    )
    cls = classify_primary(blocked, sf)
    assert cls.verdict == FINITE and cls.solutions == ()
    assert count_solutions(blocked, sf, 10**5)[0] == 0

    killable = PrimaryFormula((Term(1, 1),), (Term(2, 2),))
    assert classify_primary(killable, sf).verdict == "Infinite"
    assert count_solutions(killable, sf, 10**4)[0] > 0


def test_boundary_trapped_set_examples():
    pr, sf = PrimesOracle(), SquarefreeOracle()
    assert pr.boundary_trapped_set(2) == {2, -2}
    assert pr.boundary_trapped_set(5) == {5, -5}
    assert sf.boundary_trapped_set(4) == frozenset()
    with pytest.raises(ValueError):
        pr.boundary_trapped_set(6)
    with pytest.raises(ValueError):
        sf.boundary_trapped_set(8)
    with pytest.raises(ValueError):
        GenericOracle().boundary_trapped_set(2)


def test_symbolic_and_concrete_chi_agree():
    import random

    from finitude.sampling import random_instance

    rng = random.Random(17)
    for oracle in (PrimesOracle(), SquarefreeOracle(), GenericOracle(seed=2)):
        for _ in range(200):
            instance = random_instance(rng)
            chi = oracle.build_chi(instance)
            constants = tuple(t.const for t in instance.positive)
            assert chi.evaluate(constants) == oracle.chi_holds(instance)


def test_instance_requires_positive_coefficients():
    with pytest.raises(ValueError):
        Instance((Term(0, 5),), ())
