"""Formula ASTs, parser, renderer, and structural predicates.

The surface grammar (whitespace-insensitive)::

    formula := clause ("&" clause)*
    clause  := ["!"] pred | cong
    pred    := "P" ["_" nat] "(" term ")"
    cong    := term "=" int ["mod" nat]     # without "mod": an equality atom
    term    := [int "*"?] "x" [("+"|"-") nat] | int
    int     := ["-"] nat ; nat := digit+

An empty (or whitespace-only) source string parses to the empty
conjunction, so rendering round-trips for every constructible AST.
Predicate atoms with a negative leading coefficient are canonicalized at
construction time using the symmetry of the predicate, so ``P(-x+3)`` and
``P(x-3)`` denote the same atom.
"""

from __future__ import annotations

import re
from collections.abc import Callable, Sequence
from dataclasses import dataclass


class ParseError(ValueError):
    """Syntax error, carrying the offset into the source string."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Term:
    """A linear expression coeff*x + const over the integers."""

    coeff: int
    const: int

    def value(self, x: int) -> int:
        return self.coeff * x + self.const

    def negated(self) -> "Term":
        return Term(-self.coeff, -self.const)

    def __str__(self) -> str:
        if self.coeff == 0:
            return str(self.const)
        if self.coeff == 1:
            head = "x"
        elif self.coeff == -1:
            head = "-x"
        else:
            head = f"{self.coeff}x"
        if self.const > 0:
            return f"{head}+{self.const}"
        if self.const < 0:
            return f"{head}{self.const}"
        return head


@dataclass(frozen=True)
class CongruenceAtom:
    """coeff*x + const = residue (mod modulus); modulus 1 is trivially true."""

    coeff: int
    const: int
    modulus: int
    residue: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {self.modulus}")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def holds_at(self, x: int) -> bool:
        return (self.coeff * x + self.const - self.residue) % self.modulus == 0

    def __str__(self) -> str:
        return f"{Term(self.coeff, self.const)} = {self.residue} mod {self.modulus}"


@dataclass(frozen=True)
class EqualityAtom:
    """coeff*x + const = value, pinning x to at most one integer."""

    coeff: int
    const: int
    value: int

    def holds_at(self, x: int) -> bool:
        return self.coeff * x + self.const == self.value

    def __str__(self) -> str:
        return f"{Term(self.coeff, self.const)} = {self.value}"


@dataclass(frozen=True)
class PredicateAtom:
    """A signed P_index atom over a linear term.

    index 1 is the plain predicate; P_k(t) means k divides t and t/k lies in
    the predicate.  Terms with a negative leading coefficient (or a negative
    constant term when the coefficient is zero) are flipped on construction,
    which is sound because the predicate is symmetric.
    """

    term: Term
    index: int = 1
    negated: bool = False

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"predicate index must be >= 1, got {self.index}")
        object.__setattr__(self, "term", _canonical(self.term))

    def holds_at(self, x: int, member: Callable[[int], bool]) -> bool:
        v = self.term.value(x)
        if self.index == 1:
            inside = member(v)
        else:
            inside = v % self.index == 0 and member(v // self.index)
        return inside != self.negated

    def __str__(self) -> str:
        name = "P" if self.index == 1 else f"P_{self.index}"
        bang = "!" if self.negated else ""
        return f"{bang}{name}({self.term})"


def _dedup(items: tuple) -> tuple:
    return tuple(dict.fromkeys(items))


def _canonical(t: Term) -> Term:
    """Flip terms with a negative lead, sound under predicate symmetry."""
    if t.coeff < 0 or (t.coeff == 0 and t.const < 0):
        return t.negated()
    return t


@dataclass(frozen=True)
class BasicFormula:
    """A conjunction of congruences, signed P_n atoms, and equality atoms."""

    congruences: tuple[CongruenceAtom, ...] = ()
    atoms: tuple[PredicateAtom, ...] = ()
    equalities: tuple[EqualityAtom, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "congruences", _dedup(tuple(self.congruences)))
        object.__setattr__(self, "atoms", _dedup(tuple(self.atoms)))
        object.__setattr__(self, "equalities", _dedup(tuple(self.equalities)))

    def holds_at(self, x: int, member: Callable[[int], bool]) -> bool:
        return (
            all(c.holds_at(x) for c in self.congruences)
            and all(e.holds_at(x) for e in self.equalities)
            and all(a.holds_at(x, member) for a in self.atoms)
        )

    @property
    def is_primary_shape(self) -> bool:
        return (
            not self.congruences
            and not self.equalities
            and all(a.index == 1 for a in self.atoms)
        )

    def as_primary(self) -> "PrimaryFormula":
        if not self.is_primary_shape:
            raise ValueError("formula has congruences, equalities, or indexed atoms")
        pos = tuple(a.term for a in self.atoms if not a.negated)
        neg = tuple(a.term for a in self.atoms if a.negated)
        return PrimaryFormula(pos, neg)


@dataclass(frozen=True)
class PrimaryFormula:
    """Plain P atoms only: positive terms asserted inside, negative outside."""

    positive: tuple[Term, ...] = ()
    negative: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "positive", _dedup(tuple(_canonical(t) for t in self.positive))
        )
        object.__setattr__(
            self, "negative", _dedup(tuple(_canonical(t) for t in self.negative))
        )

    def holds_at(self, x: int, member: Callable[[int], bool]) -> bool:
        return all(member(t.value(x)) for t in self.positive) and not any(
            member(t.value(x)) for t in self.negative
        )


@dataclass(frozen=True)
class MixedFormula:
    """A conjunction mixing prime and square-free atoms (counting only)."""

    prime_positive: tuple[Term, ...] = ()
    prime_negative: tuple[Term, ...] = ()
    squarefree_positive: tuple[Term, ...] = ()
    squarefree_negative: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        for field in (
            "prime_positive",
            "prime_negative",
            "squarefree_positive",
            "squarefree_negative",
        ):
            terms = tuple(_canonical(t) for t in getattr(self, field))
            object.__setattr__(self, field, _dedup(terms))


_TOKEN_RE = re.compile(r"(\d+)|([A-Za-z]+)|([&!()=+\-*_])")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group(1) is not None:
            tokens.append(("nat", m.group(1), pos))
        elif m.group(2) is not None:
            tokens.append(("word", m.group(2), pos))
        else:
            tokens.append(("sym", m.group(3), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _pos(self) -> int:
        tok = self.peek()
        return tok[2] if tok else len(self.text)

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def try_sym(self, ch: str) -> bool:
        tok = self.peek()
        if tok and tok[0] == "sym" and tok[1] == ch:
            self.i += 1
            return True
        return False

    def expect_sym(self, ch: str) -> None:
        if not self.try_sym(ch):
            raise ParseError(f"expected {ch!r}", self._pos())

    def peek_word(self, word: str) -> bool:
        tok = self.peek()
        return bool(tok and tok[0] == "word" and tok[1] == word)

    def try_word(self, word: str) -> bool:
        if self.peek_word(word):
            self.i += 1
            return True
        return False

    def take_nat(self) -> int:
        tok = self.peek()
        if not tok or tok[0] != "nat":
            raise ParseError("expected a number", self._pos())
        self.i += 1
        return int(tok[1])

    def take_int(self) -> int:
        sign = -1 if self.try_sym("-") else 1
        return sign * self.take_nat()

    def parse_term(self) -> Term:
        sign = -1 if self.try_sym("-") else 1
        digits: int | None = None
        tok = self.peek()
        if tok and tok[0] == "nat":
            digits = self.take_nat()
        starred = self.try_sym("*")
        if self.peek_word("x"):
            self.take()
            coeff = sign * (digits if digits is not None else 1)
            const = 0
            if self.try_sym("+"):
                const = self.take_nat()
            elif self.try_sym("-"):
                const = -self.take_nat()
            return Term(coeff, const)
        if starred:
            raise ParseError("expected 'x' after '*'", self._pos())
        tok = self.peek()
        if tok and tok[0] == "word":
            raise ParseError(f"unknown variable {tok[1]!r}; only 'x' is allowed", tok[2])
        if digits is None:
            raise ParseError("expected a term", self._pos())
        return Term(0, sign * digits)

    def parse_predicate(self, negated: bool) -> PredicateAtom:
        start = self._pos()
        tok = self.take()
        if tok[0] != "word" or tok[1] != "P":
            raise ParseError(f"unknown predicate {tok[1]!r}", start)
        index = 1
        if self.try_sym("_"):
            index = self.take_nat()
            if index < 1:
                raise ParseError("predicate index must be >= 1", start)
        self.expect_sym("(")
        term = self.parse_term()
        self.expect_sym(")")
        return PredicateAtom(term, index, negated)

    def parse_clause(self) -> PredicateAtom | CongruenceAtom | EqualityAtom:
        if self.try_sym("!"):
            return self.parse_predicate(negated=True)
        tok = self.peek()
        if tok and tok[0] == "word" and tok[1] not in ("x", "mod"):
            return self.parse_predicate(negated=False)
        term = self.parse_term()
        eq_pos = self._pos()
        self.expect_sym("=")
        rhs = self.take_int()
        if self.try_word("mod"):
            mod_pos = self._pos()
            modulus = self.take_nat()
            if modulus == 0:
                raise ParseError("modulus 0 is not allowed", mod_pos)
            return CongruenceAtom(term.coeff, term.const, modulus, rhs % modulus)
        del eq_pos
        return EqualityAtom(term.coeff, term.const, rhs)


def parse_formula(text: str) -> BasicFormula:
    """Parse a conjunction of predicate atoms, congruences, and equalities."""
    parser = _Parser(text)
    if parser.peek() is None:
        return BasicFormula()
    congruences: list[CongruenceAtom] = []
    atoms: list[PredicateAtom] = []
    equalities: list[EqualityAtom] = []
    while True:
        clause = parser.parse_clause()
        if isinstance(clause, PredicateAtom):
            atoms.append(clause)
        elif isinstance(clause, CongruenceAtom):
            congruences.append(clause)
        else:
            equalities.append(clause)
        if parser.peek() is None:
            break
        parser.expect_sym("&")
    return BasicFormula(tuple(congruences), tuple(atoms), tuple(equalities))


def parse_mixed(text: str) -> MixedFormula:
    """Parse a conjunction of Pr(...) and SF(...) atoms, possibly negated."""
    parser = _Parser(text)
    buckets: dict[tuple[str, bool], list[Term]] = {
        ("Pr", False): [],
        ("Pr", True): [],
        ("SF", False): [],
        ("SF", True): [],
    }
    if parser.peek() is None:
        raise ParseError("empty mixed formula", 0)
    while True:
        negated = parser.try_sym("!")
        tok = parser.take()
        if tok[0] != "word" or tok[1] not in ("Pr", "SF"):
            raise ParseError("expected 'Pr' or 'SF'", tok[2])
        parser.expect_sym("(")
        buckets[(tok[1], negated)].append(parser.parse_term())
        parser.expect_sym(")")
        if parser.peek() is None:
            break
        parser.expect_sym("&")
    return MixedFormula(
        tuple(buckets[("Pr", False)]),
        tuple(buckets[("Pr", True)]),
        tuple(buckets[("SF", False)]),
        tuple(buckets[("SF", True)]),
    )


def render(f: BasicFormula | PrimaryFormula | MixedFormula) -> str:
    """Render a formula in the surface grammar; parse(render(f)) == f."""
    if isinstance(f, PrimaryFormula):
        parts = [f"P({t})" for t in f.positive] + [f"!P({t})" for t in f.negative]
    elif isinstance(f, MixedFormula):
        parts = (
            [f"Pr({t})" for t in f.prime_positive]
            + [f"!Pr({t})" for t in f.prime_negative]
            + [f"SF({t})" for t in f.squarefree_positive]
            + [f"!SF({t})" for t in f.squarefree_negative]
        )
    else:
        parts = (
            [str(a) for a in f.atoms]
            + [str(c) for c in f.congruences]
            + [str(e) for e in f.equalities]
        )
    return " & ".join(parts)


def unify_coefficients(f: BasicFormula) -> BasicFormula:
    """Rescale all predicate atoms to one shared leading coefficient.

    P_n(m x + c) with scale factor j = m'/m becomes P_{n*j}(m' x + j*c),
    where m' is the lcm of the atom coefficients; the solution set is
    unchanged.  Congruences and equalities are untouched.
    """
    from math import lcm

    if not f.atoms:
        return f
    coeffs = [a.term.coeff for a in f.atoms]
    if any(c < 1 for c in coeffs):
        raise ValueError("all atom coefficients must be >= 1 (fold constants first)")
    m = lcm(*coeffs)
    atoms = []
    for a in f.atoms:
        scale = m // a.term.coeff
        atoms.append(
            PredicateAtom(Term(m, scale * a.term.const), a.index * scale, a.negated)
        )
    return BasicFormula(f.congruences, tuple(atoms), f.equalities)


def is_good_position(f: PrimaryFormula) -> bool:
    """True iff no term is required both inside and outside the predicate."""
    return not set(f.positive) & set(f.negative)


def are_compatible(fs: Sequence[PrimaryFormula]) -> bool:
    """No term may occur positively in one formula and negatively in another."""
    for i, fi in enumerate(fs):
        pos = set(fi.positive)
        for j, fj in enumerate(fs):
            if i != j and pos & set(fj.negative):
                return False
    return True
