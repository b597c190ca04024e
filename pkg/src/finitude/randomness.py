"""Predicate oracles and the finite congruential infinitude test.

Each oracle is a symmetric subset D of the integers (membership depends
only on |n|) together with a recipe that, for a system of constraints
"m_i x + z_i in D" / "m'_j x + z'_j not in D", produces a finite set of
boundary moduli and one residue clause per modulus.  The clauses decide
whether the system has infinitely many solutions; when some clause fails,
every solution is trapped in the finite set D intersect kZ for the failing
modulus k.

Three oracles are provided: the primes (infinitude answers conditional on
Dickson's conjecture), the square-free integers (unconditional), and a
seeded pseudo-random set with a trivially true clause set.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from bisect import bisect_right
from dataclasses import dataclass
from math import isqrt, prod

from .arith import CongruenceClass, crt, solve_linear_congruence
from .formula import PrimaryFormula, Term, _dedup

UNCONDITIONAL = "unconditional"
DICKSON_CONDITIONAL = "dickson-conditional"
GENERIC_PROBABILISTIC = "generic-probabilistic"


# --- exact number-theory helpers ------------------------------------------

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# Miller-Rabin with these fixed witnesses is deterministic below
# 3317044064679887385961981 (Sorenson & Webster), far beyond the sieve range.


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_prime_list: list[int] = []
_prime_limit = 0


def primes_upto(limit: int) -> list[int]:
    """All primes <= limit, from a growable cached sieve."""
    global _prime_list, _prime_limit
    if limit > _prime_limit:
        new_limit = max(limit, 2 * _prime_limit, 1 << 10)
        flags = bytearray([1]) * (new_limit + 1)
        flags[0:2] = b"\x00\x00"
        for p in range(2, isqrt(new_limit) + 1):
            if flags[p]:
                flags[p * p :: p] = b"\x00" * len(range(p * p, new_limit + 1, p))
        # swap both references together; refills are idempotent
        _prime_list = [i for i, f in enumerate(flags) if f]
        _prime_limit = new_limit
    return _prime_list[: bisect_right(_prime_list, limit)]


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    for p in primes_upto(isqrt(n)):
        if p * p > n:
            break
        if n % p == 0:
            n //= p
            if n % p == 0:
                return False
    return True


def prime_divisors(n: int) -> list[int]:
    """Distinct prime divisors of |n|, ascending."""
    n = abs(n)
    out = []
    for p in primes_upto(isqrt(n)):
        if p * p > n:
            break
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
    if n > 1:
        out.append(n)
    return out


_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


def avalanche64(v: int) -> int:
    """The splitmix64 finalizer: a 64-bit avalanche permutation."""
    v &= _MASK64
    v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    v = (v ^ (v >> 27)) * 0x94D049BB133111EB & _MASK64
    return v ^ (v >> 31)


# --- instances and the congruential condition ------------------------------


def _residue_witness_exists(
    q: int,
    nonzero: tuple[tuple[int, int], ...],
    zero: tuple[tuple[int, int], ...] = (),
) -> bool:
    """Is there s in [0, q) with m*s + z != 0 (mod q) for every (m, z) in
    `nonzero` and m*s + z == 0 (mod q) for every (m, z) in `zero`?

    q is a prime or a prime square.  Exact for any q: small q is scanned;
    for q = p^e with p exceeding the constraint count, each nonzero
    constraint forbids at most a 1/p fraction of the surviving class, so a
    counting argument decides without enumeration.
    """
    constraints = len(nonzero) + len(zero)
    root = isqrt(q)
    p = root if root * root == q else q
    if p <= constraints or q <= 64:
        return any(
            all((m * s + z) % q for m, z in nonzero)
            and all((m * s + z) % q == 0 for m, z in zero)
            for s in range(q)
        )
    base = CongruenceClass(1, 0)
    for m, z in zero:
        cls = solve_linear_congruence(m, z, q)
        if cls is None:
            return False
        base = crt([base, cls])
        if base is None:
            return False
    size = q // base.modulus
    for m, z in nonzero:
        cls = solve_linear_congruence(m, z, q)
        if cls is None:
            continue  # the term is never 0 mod q
        if cls.modulus == 1:
            return False  # the term is always 0 mod q
        # restrict the forbidden class to the surviving class (s = res + mod*t)
        overlap = solve_linear_congruence(
            base.modulus, base.residue - cls.residue, cls.modulus
        )
        if overlap is None:
            continue
        if overlap.modulus == 1:
            return False  # forbids the whole surviving class
        if size == 1 and overlap.residue == 0:
            return False  # the single surviving point is forbidden
    if size == 1:
        return True
    # each surviving nonzero constraint has t-modulus >= p > number of
    # constraints, so the forbidden fraction is below 1: a witness exists
    return True


@dataclass(frozen=True)
class Instance:
    """A constraint system with concrete integer parameters.

    Same shape as PrimaryFormula; positive terms must land inside the
    predicate, negative terms outside.  All coefficients must be >= 1
    (constant terms are folded away by the classifier before this point).
    """

    positive: tuple[Term, ...] = ()
    negative: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "positive", _dedup(tuple(self.positive)))
        object.__setattr__(self, "negative", _dedup(tuple(self.negative)))
        for t in self.positive + self.negative:
            if t.coeff < 1:
                raise ValueError(f"instance terms need coeff >= 1, got {t}")

    @classmethod
    def from_primary(cls, f: PrimaryFormula) -> "Instance":
        return cls(f.positive, f.negative)

    @property
    def good_position(self) -> bool:
        return not set(self.positive) & set(self.negative)

    def holds_at(self, x: int, member) -> bool:
        return all(member(t.value(x)) for t in self.positive) and not any(
            member(t.value(x)) for t in self.negative
        )


@dataclass(frozen=True)
class ChiClause:
    """One boundary modulus: some residue s must keep every term nonzero.

    The clause holds at constants (z_1, ..., z_r) iff there is an
    s in [0, modulus) with coeffs[i]*s + z_i != 0 (mod modulus) for all i.
    """

    modulus: int
    coeffs: tuple[int, ...]

    def holds_at(self, constants: tuple[int, ...]) -> bool:
        return _residue_witness_exists(
            self.modulus, tuple(zip(self.coeffs, constants))
        )

    def render_at(self, constants: tuple[int, ...]) -> str:
        parts = ", ".join(
            str(Term(m, z)).replace("x", "s") for m, z in zip(self.coeffs, constants)
        )
        return f"exists s<{self.modulus}: {parts} != 0 (mod {self.modulus})"


@dataclass(frozen=True)
class ChiCondition:
    """Finite boundary plus one clause per boundary modulus.

    An empty boundary carries no clauses and is trivially true.
    """

    boundary: tuple[int, ...] = ()
    clauses: tuple[ChiClause, ...] = ()

    def __post_init__(self) -> None:
        if bool(self.boundary) != bool(self.clauses):
            raise ValueError("boundary is empty iff the clause set is empty")

    @property
    def trivially_true(self) -> bool:
        return not self.clauses

    def evaluate(self, constants: tuple[int, ...]) -> bool:
        return all(c.holds_at(constants) for c in self.clauses)

    def failing_modulus(self, constants: tuple[int, ...]) -> int | None:
        for c in self.clauses:
            if not c.holds_at(constants):
                return c.modulus
        return None


# --- oracles ----------------------------------------------------------------


class RandomnessOracle(ABC):
    """A symmetric predicate with an exact membership test and a finite
    congruential criterion for infinitude of constraint systems."""

    name: str
    conditionality: str

    @property
    def cache_key(self) -> tuple:
        return (self.name,)

    @abstractmethod
    def membership(self, n: int) -> bool:
        """Exact, pure, and symmetric: membership(n) == membership(-n)."""

    @abstractmethod
    def _boundary_moduli(self, coeffs: tuple[int, ...], r: int) -> list[int]:
        """Boundary moduli for an instance with r >= 1 positive terms."""

    @abstractmethod
    def boundary_trapped_set(self, k: int) -> frozenset[int]:
        """The finite set D intersect kZ, for k a boundary modulus."""

    def build_chi(self, instance: Instance) -> ChiCondition:
        """The boundary and residue clauses for the instance's positive part.

        Negative terms never enter the condition.  With no positive terms
        the condition is trivially true with an empty boundary.
        """
        coeffs = tuple(t.coeff for t in instance.positive)
        r = len(coeffs)
        if r == 0:
            return ChiCondition()
        moduli = self._boundary_moduli(coeffs, r)
        return ChiCondition(
            tuple(moduli), tuple(ChiClause(q, coeffs) for q in moduli)
        )

    def _constants(self, instance: Instance) -> tuple[int, ...]:
        return tuple(t.const for t in instance.positive)

    def _clause_modulus(self, p: int) -> int:
        """Boundary modulus associated with the prime p (p itself here)."""
        return p

    def _boundary_contains_prime(self, p: int, coeffs: tuple[int, ...], r: int) -> bool:
        """Whether p's modulus lies in the boundary, without materializing it."""
        return p <= max(max(coeffs), r)

    def positive_failing_modulus(self, instance: Instance) -> int | None:
        """Smallest boundary modulus whose residue clause fails, or None.

        Equivalent to build_chi(...).failing_modulus(...) but only probes
        the primes that can fail: a clause with prime p coprime to every
        coefficient forbids at most one residue per term, so it holds
        automatically once the modulus exceeds the term count.  This keeps
        evaluation cheap even when the boundary cutoff is astronomically
        large (as for rewritten formulas with big coefficients).
        """
        if not instance.good_position:
            raise ValueError("instance is not in good position")
        coeffs = tuple(t.coeff for t in instance.positive)
        r = len(coeffs)
        if r == 0:
            return None
        candidates: set[int] = set(primes_upto(r))
        for m in coeffs:
            candidates.update(prime_divisors(m))
        pairs = tuple(zip(coeffs, self._constants(instance)))
        for p in sorted(candidates):
            if not self._boundary_contains_prime(p, coeffs, r):
                continue
            q = self._clause_modulus(p)
            if not _residue_witness_exists(q, pairs):
                return q
        return None

    def chi_holds(self, instance: Instance) -> bool:
        """Does the instance have infinitely many solutions (per the oracle)?"""
        return self.positive_failing_modulus(instance) is None

    def failing_boundary_witness(self, instance: Instance) -> int:
        """Smallest boundary k whose residue clause fails.

        Requires the positive-part condition (build_chi) to fail; every
        solution of the instance is then trapped by modulus k.
        """
        k = self.positive_failing_modulus(instance)
        if k is None:
            raise ValueError("no failing boundary: the positive-part condition holds")
        return k


class PrimesOracle(RandomnessOracle):
    """The prime integers, symmetrized.  Infinitude answers are conditional
    on Dickson's conjecture."""

    name = "primes"
    conditionality = DICKSON_CONDITIONAL

    def membership(self, n: int) -> bool:
        return is_prime(abs(n))

    def _boundary_moduli(self, coeffs: tuple[int, ...], r: int) -> list[int]:
        cutoff = max(max(coeffs), r) + 1
        return primes_upto(cutoff - 1)

    def boundary_trapped_set(self, k: int) -> frozenset[int]:
        if not is_prime(k):
            raise ValueError(f"{k} is not a prime boundary modulus")
        return frozenset({k, -k})


def _primitive_part(t: Term) -> tuple[int, Term]:
    """Split coeff*x + const into content times a primitive term."""
    from math import gcd

    content = gcd(t.coeff, t.const)
    return content, Term(t.coeff // content, t.const // content)


class SquarefreeOracle(RandomnessOracle):
    """The square-free integers (no repeated prime factor; 0 excluded).

    The residue clauses of build_chi involve only the asserted terms; they
    miss one obstruction: a negated term b*u(x) proportional to an asserted
    term a*u(x) can only leave the square-free set at a prime p dividing b
    (any other prime square dividing b*u divides a*u too).  chi_holds
    therefore additionally requires, for every such negated term, some
    prime p | b whose joint residue clause mod p^2 (asserted terms nonzero,
    the negated term zero) is satisfiable; otherwise the solution set is
    empty.
    """

    name = "squarefree"
    conditionality = UNCONDITIONAL

    def membership(self, n: int) -> bool:
        return is_squarefree(n)

    def _boundary_moduli(self, coeffs: tuple[int, ...], r: int) -> list[int]:
        cutoff = max(prod(coeffs), r) + 1
        return [p * p for p in primes_upto(cutoff)]

    def _clause_modulus(self, p: int) -> int:
        return p * p

    def _boundary_contains_prime(self, p: int, coeffs: tuple[int, ...], r: int) -> bool:
        return p <= max(prod(coeffs), r) + 1

    def boundary_trapped_set(self, k: int) -> frozenset[int]:
        root = isqrt(k)
        if root * root != k or not is_prime(root):
            raise ValueError(f"{k} is not a prime square boundary modulus")
        return frozenset()

    def _proportional_negatives(self, instance: Instance) -> list[tuple[Term, list[int]]]:
        """Negated terms sharing a primitive part with some asserted term,
        with their candidate kill primes (the primes of their content)."""
        primitives = {_primitive_part(t)[1] for t in instance.positive}
        out = []
        for t in instance.negative:
            content, primitive = _primitive_part(t)
            if primitive in primitives:
                out.append((t, prime_divisors(content)))
        return out

    def chi_holds(self, instance: Instance) -> bool:
        if self.positive_failing_modulus(instance) is not None:
            return False
        blocked = self._proportional_negatives(instance)
        if not blocked:
            return True
        if any(not primes for _, primes in blocked):
            return False
        positives = tuple((t.coeff, t.const) for t in instance.positive)

        from itertools import product

        for assignment in product(*(primes for _, primes in blocked)):
            if all(
                _residue_witness_exists(
                    p * p,
                    positives,
                    tuple(
                        (t.coeff, t.const)
                        for (t, _), ap in zip(blocked, assignment)
                        if ap == p
                    ),
                )
                for p in set(assignment)
            ):
                return True
        return False


class GenericOracle(RandomnessOracle):
    """A seeded pseudo-random symmetric set of a given density.

    Membership hashes |n| with a 64-bit avalanche mix and compares against
    the density threshold; 0 is fixed outside.  The boundary is empty and
    the congruential condition is trivially true.
    """

    name = "generic"
    conditionality = GENERIC_PROBABILISTIC

    def __init__(self, seed: int = 0, density: float = 0.5):
        if not 0.0 < density < 1.0:
            raise ValueError(f"density must lie strictly between 0 and 1, got {density}")
        self.seed = seed & _MASK64
        self.density = density
        self.threshold = int(density * 2**64)

    @property
    def cache_key(self) -> tuple:
        return (self.name, self.seed, self.threshold)

    def membership(self, n: int) -> bool:
        if n == 0:
            return False
        return avalanche64(abs(n) * _GOLDEN64 + self.seed) < self.threshold

    def _boundary_moduli(self, coeffs: tuple[int, ...], r: int) -> list[int]:
        return []

    def _boundary_contains_prime(self, p: int, coeffs: tuple[int, ...], r: int) -> bool:
        return False

    def boundary_trapped_set(self, k: int) -> frozenset[int]:
        raise ValueError("the generic oracle has an empty boundary")


def get_oracle(name: str, seed: int = 0, density: float = 0.5) -> RandomnessOracle:
    if name == "primes":
        return PrimesOracle()
    if name == "squarefree":
        return SquarefreeOracle()
    if name == "generic":
        return GenericOracle(seed=seed, density=density)
    raise ValueError(f"unknown predicate {name!r}")
