"""Empirical ground truth: segmented sieves, window scans, and audits.

Membership bitmaps are built segment by segment (bit-packed, so a 1e8
window costs ~12.5 MB) and cached per oracle.  Formula scans evaluate the
compiled constraint checks over x-segments with numpy; segments may be
processed by a thread pool, and the merge is in fixed segment order, so
results are identical for any worker count.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import isqrt

import numpy as np

from .decide import (
    FINITE,
    INFINITE,
    Classification,
    classify_primary,
    decide_exists_basic,
)
from .formula import BasicFormula, MixedFormula, PrimaryFormula, render
from .normalize import DEFAULT_BRANCH_CAP
from .randomness import (
    UNCONDITIONAL,
    GenericOracle,
    Instance,
    PrimesOracle,
    RandomnessOracle,
    SquarefreeOracle,
    primes_upto,
)

SEGMENT_SIZE = 1 << 20
DEFAULT_MAX_SIEVE = 10**8
SOLUTION_CAP = 1000

CONFIRMED = "confirmed"
REFUTED = "refuted"
ANOMALY = "conjecture-relevant-anomaly"


class MemoryCapExceeded(RuntimeError):
    """Raised when a sieve would exceed the configured maximum bound."""


# --- packed membership bitmaps ----------------------------------------------


@dataclass(frozen=True)
class MembershipBitmap:
    """Bit-packed membership over [0, limit]; symmetric lookups take |n|."""

    limit: int
    packed: np.ndarray

    def test_abs(self, values: np.ndarray) -> np.ndarray:
        idx = np.abs(np.asarray(values, dtype=np.int64))
        return ((self.packed[idx >> 3] >> (idx & 7)) & 1).astype(bool)

    def contains(self, n: int) -> bool:
        a = abs(n)
        if a > self.limit:
            raise ValueError(f"|{n}| exceeds the bitmap limit {self.limit}")
        return bool((self.packed[a >> 3] >> (a & 7)) & 1)


def _pack_segments(limit: int, fill) -> np.ndarray:
    chunks = []
    for lo in range(0, limit + 1, SEGMENT_SIZE):
        hi = min(lo + SEGMENT_SIZE, limit + 1)
        seg = fill(lo, hi)
        if seg.size % 8:
            seg = np.concatenate([seg, np.zeros(8 - seg.size % 8, dtype=bool)])
        chunks.append(np.packbits(seg, bitorder="little"))
    return np.concatenate(chunks)


def _primes_packed(limit: int) -> np.ndarray:
    base = primes_upto(isqrt(limit)) if limit >= 4 else []

    def fill(lo: int, hi: int) -> np.ndarray:
        seg = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            seg[: min(2, hi)] = False
        for p in base:
            start = max(p * p, (lo + p - 1) // p * p)
            if start < hi:
                seg[start - lo :: p] = False
        return seg

    return _pack_segments(limit, fill)


def _squarefree_packed(limit: int) -> np.ndarray:
    base = primes_upto(isqrt(limit)) if limit >= 4 else []

    def fill(lo: int, hi: int) -> np.ndarray:
        seg = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            seg[0] = False
        for p in base:
            q = p * p
            start = (lo + q - 1) // q * q
            if start < hi:
                seg[start - lo :: q] = False
        return seg

    return _pack_segments(limit, fill)


def _generic_packed(limit: int, seed: int, threshold: int) -> np.ndarray:
    gold = np.uint64(0x9E3779B97F4A7C15)
    seed64 = np.uint64(seed)
    thr = np.uint64(threshold)

    def fill(lo: int, hi: int) -> np.ndarray:
        z = np.arange(lo, hi, dtype=np.uint64) * gold + seed64
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
        seg = z < thr
        if lo == 0:
            seg[0] = False
        return seg

    return _pack_segments(limit, fill)


_BITMAP_CACHE: dict[tuple, MembershipBitmap] = {}


def membership_bitmap(
    oracle: RandomnessOracle, limit: int, *, max_limit: int = DEFAULT_MAX_SIEVE
) -> MembershipBitmap:
    """A cached membership bitmap covering at least [0, limit]."""
    if limit > max_limit:
        raise MemoryCapExceeded(
            f"sieve limit {limit} exceeds the configured maximum {max_limit}"
        )
    key = oracle.cache_key
    cached = _BITMAP_CACHE.get(key)
    if cached is not None and cached.limit >= limit:
        return cached
    build = min(max(limit, 2 * cached.limit if cached else 0), max_limit)
    if isinstance(oracle, GenericOracle):
        packed = _generic_packed(build, oracle.seed, oracle.threshold)
    elif oracle.name == "primes":
        packed = _primes_packed(build)
    elif oracle.name == "squarefree":
        packed = _squarefree_packed(build)
    else:
        raise ValueError(f"no sieve for oracle {oracle.name!r}")
    bitmap = MembershipBitmap(build, packed)
    _BITMAP_CACHE[key] = bitmap
    return bitmap


@dataclass(frozen=True)
class SieveWindow:
    """Symmetric membership window over [-bound, bound]."""

    oracle: str
    bound: int
    bitmap: MembershipBitmap

    def contains(self, n: int) -> bool:
        if abs(n) > self.bound:
            raise ValueError(f"{n} is outside the window [-{self.bound}, {self.bound}]")
        return self.bitmap.contains(n)

    def members(self) -> list[int]:
        """All window members, ascending."""
        flags = np.unpackbits(self.bitmap.packed, bitorder="little")[: self.bound + 1]
        nonneg = np.flatnonzero(flags)
        mirrored = -nonneg[nonneg > 0][::-1]
        return np.concatenate([mirrored, nonneg]).tolist()

    def count(self) -> int:
        return len(self.members())


def sieve_window(
    oracle: RandomnessOracle, bound: int, *, max_bound: int = DEFAULT_MAX_SIEVE
) -> SieveWindow:
    """Materialize membership over [-bound, bound] (symmetric bitmap)."""
    if bound < 0:
        raise ValueError("bound must be >= 0")
    bitmap = membership_bitmap(oracle, bound, max_limit=max_bound)
    return SieveWindow(oracle.name, bound, bitmap)


# --- compiled window scans ---------------------------------------------------


@dataclass(frozen=True)
class _PredCheck:
    coeff: int
    const: int
    index: int
    negated: bool
    oracle: RandomnessOracle
    bitmap: MembershipBitmap | None = None


@dataclass(frozen=True)
class _CongCheck:
    coeff: int
    const: int
    modulus: int
    residue: int


@dataclass(frozen=True)
class _EqCheck:
    coeff: int
    const: int
    value: int


def _gather(f, oracle: RandomnessOracle | None) -> list:
    checks: list = []
    if isinstance(f, BasicFormula):
        for c in f.congruences:
            checks.append(_CongCheck(c.coeff, c.const, c.modulus, c.residue))
        for e in f.equalities:
            checks.append(_EqCheck(e.coeff, e.const, e.value))
        for a in f.atoms:
            checks.append(
                _PredCheck(a.term.coeff, a.term.const, a.index, a.negated, oracle)
            )
    elif isinstance(f, (PrimaryFormula, Instance)):
        for t in f.positive:
            checks.append(_PredCheck(t.coeff, t.const, 1, False, oracle))
        for t in f.negative:
            checks.append(_PredCheck(t.coeff, t.const, 1, True, oracle))
    elif isinstance(f, MixedFormula):
        pr, sf = PrimesOracle(), SquarefreeOracle()
        for t in f.prime_positive:
            checks.append(_PredCheck(t.coeff, t.const, 1, False, pr))
        for t in f.prime_negative:
            checks.append(_PredCheck(t.coeff, t.const, 1, True, pr))
        for t in f.squarefree_positive:
            checks.append(_PredCheck(t.coeff, t.const, 1, False, sf))
        for t in f.squarefree_negative:
            checks.append(_PredCheck(t.coeff, t.const, 1, True, sf))
    else:
        raise TypeError(f"cannot scan {type(f).__name__}")
    return checks


def _attach_bitmaps(checks: list, bound: int, max_sieve: int) -> list:
    limits: dict[tuple, tuple[RandomnessOracle, int]] = {}
    for ch in checks:
        if isinstance(ch, _PredCheck):
            key = ch.oracle.cache_key
            need = abs(ch.coeff) * bound + abs(ch.const)
            prev = limits.get(key)
            limits[key] = (ch.oracle, max(need, prev[1] if prev else 1))
    bitmaps = {
        key: membership_bitmap(oracle, lim, max_limit=max_sieve)
        for key, (oracle, lim) in limits.items()
    }
    out = []
    for ch in checks:
        if isinstance(ch, _PredCheck):
            out.append(
                _PredCheck(
                    ch.coeff, ch.const, ch.index, ch.negated, ch.oracle,
                    bitmaps[ch.oracle.cache_key],
                )
            )
        else:
            out.append(ch)
    return out


def _mask(checks: list, xs: np.ndarray) -> np.ndarray:
    acc = np.ones(xs.shape, dtype=bool)
    for ch in checks:
        if isinstance(ch, _PredCheck):
            vals = ch.coeff * xs + ch.const
            if ch.index > 1:
                ok = (vals % ch.index == 0) & ch.bitmap.test_abs(vals // ch.index)
            else:
                ok = ch.bitmap.test_abs(vals)
            acc &= ~ok if ch.negated else ok
        elif isinstance(ch, _CongCheck):
            acc &= (ch.coeff * xs + ch.const - ch.residue) % ch.modulus == 0
        else:
            acc &= ch.coeff * xs + ch.const == ch.value
    return acc


def accept_mask(
    f, oracle: RandomnessOracle | None, lo: int, hi: int, *,
    max_sieve: int = DEFAULT_MAX_SIEVE,
) -> np.ndarray:
    """Boolean satisfaction mask for x in [lo, hi)."""
    checks = _attach_bitmaps(_gather(f, oracle), max(abs(lo), abs(hi - 1)), max_sieve)
    return _mask(checks, np.arange(lo, hi, dtype=np.int64))


def count_solutions(
    f,
    oracle: RandomnessOracle | None,
    bound: int,
    *,
    workers: int = 1,
    cap: int = SOLUTION_CAP,
    max_sieve: int = DEFAULT_MAX_SIEVE,
) -> tuple[int, list[int]]:
    """Exact count of satisfying x in [-bound, bound], plus the first `cap`
    solutions in ascending order."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    checks = _attach_bitmaps(_gather(f, oracle), bound, max_sieve)
    edges = list(range(-bound, bound + 1, SEGMENT_SIZE))

    def scan(lo: int) -> tuple[int, list[int]]:
        hi = min(lo + SEGMENT_SIZE, bound + 1)
        xs = np.arange(lo, hi, dtype=np.int64)
        msk = _mask(checks, xs)
        cnt = int(np.count_nonzero(msk))
        sols = xs[msk][:cap].tolist() if cnt else []
        return cnt, sols

    if workers <= 1:
        parts = [scan(lo) for lo in edges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(scan, edges))

    total = sum(cnt for cnt, _ in parts)
    solutions: list[int] = []
    for _, sols in parts:
        if len(solutions) >= cap:
            break
        solutions.extend(sols[: cap - len(solutions)])
    return total, solutions


# --- audits ------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    formula: str
    oracle: str
    verdict: Classification
    counts: tuple[tuple[int, int], ...]
    window_solutions: tuple[int, ...]
    status: str
    elapsed_ms: float


def _audit_status(
    verdict: Classification, counts: list[tuple[int, int]], window: list[int]
) -> str:
    if verdict.verdict == FINITE:
        expected = set(verdict.solutions or ())
        for bound, cnt in counts:
            if cnt != sum(1 for s in expected if abs(s) <= bound):
                return REFUTED
        top = counts[-1][0]
        if set(window) != {s for s in expected if abs(s) <= top}:
            return REFUTED
        return CONFIRMED
    if verdict.verdict == INFINITE:
        values = [cnt for _, cnt in counts]
        growing = all(v > 0 for v in values) and all(
            b > a for a, b in zip(values, values[1:])
        )
        if growing:
            return CONFIRMED
        return REFUTED if verdict.conditionality == UNCONDITIONAL else ANOMALY
    return CONFIRMED if all(cnt == 0 for _, cnt in counts) else REFUTED


def audit(
    f,
    oracle: RandomnessOracle,
    bounds: list[int],
    *,
    workers: int = 1,
    cap: int = SOLUTION_CAP,
    branch_cap: int = DEFAULT_BRANCH_CAP,
    max_sieve: int = DEFAULT_MAX_SIEVE,
) -> VerificationReport:
    """Classify, then scan each bound and compare the claims to the counts.

    Finite verdicts must match the scans exactly and unconditional infinite
    verdicts must show strictly growing counts; violations are refutations.
    Conditional infinite verdicts that fail to grow are flagged as
    anomalies, never as refutations.
    """
    if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])) or not bounds:
        raise ValueError("bounds must be nonempty and strictly increasing")
    start = time.perf_counter()
    if isinstance(f, Instance):
        f = PrimaryFormula(f.positive, f.negative)
    if isinstance(f, PrimaryFormula):
        verdict = classify_primary(f, oracle)
    else:
        verdict = decide_exists_basic(f, oracle, branch_cap=branch_cap)
    counts = []
    window: list[int] = []
    for b in bounds:
        cnt, sols = count_solutions(
            f, oracle, b, workers=workers, cap=cap, max_sieve=max_sieve
        )
        counts.append((b, cnt))
        window = sols
    status = _audit_status(verdict, counts, window)
    elapsed = (time.perf_counter() - start) * 1000.0
    return VerificationReport(
        formula=render(f),
        oracle=oracle.name,
        verdict=verdict,
        counts=tuple(counts),
        window_solutions=tuple(window),
        status=status,
        elapsed_ms=elapsed,
    )


# --- axiom spot checks -------------------------------------------------------


@dataclass(frozen=True)
class AxiomReport:
    """Aggregate of the three oracle-contract spot checks.

    window-hit: clauses hold, so a solution should appear in the window;
    residue-sweep: clauses fail, so every residue must kill an asserted
    term (or, with a blocked negation, the window must be empty);
    trapped-set: sieve members divisible by a boundary modulus must equal
    the oracle's trapped set.
    """

    oracle: str
    samples: int
    bound: int
    seed: int
    hit_checked: int
    hit_passed: int
    hit_anomalies: tuple[str, ...]
    sweep_checked: int
    sweep_passed: int
    trap_checked: int
    trap_passed: int
    failures: tuple[str, ...]
    status: str
    elapsed_ms: float


def _window_has_solution(inst, oracle, bound, workers, max_sieve) -> bool:
    """Existence check with a cheap small-window first pass."""
    probe = min(10**4, bound)
    cnt, _ = count_solutions(
        inst, oracle, probe, workers=workers, cap=1, max_sieve=max_sieve
    )
    if cnt or probe == bound:
        return cnt >= 1
    cnt, _ = count_solutions(
        inst, oracle, bound, workers=workers, cap=1, max_sieve=max_sieve
    )
    return cnt >= 1


def check_axioms(
    oracle: RandomnessOracle,
    samples: int,
    bound: int,
    seed: int = 0,
    *,
    workers: int = 1,
    max_sieve: int = DEFAULT_MAX_SIEVE,
) -> AxiomReport:
    """Spot-check the oracle contract on random constraint systems.

    For each sampled good-position instance: if the residue clauses hold,
    at least one window solution is expected (a hard failure only for
    unconditional oracles, an anomaly otherwise); if they fail, the witness
    modulus is confirmed by brute force over its residues, and the trapped
    set is compared against a sieve scan of the window.
    """
    from .sampling import random_instance

    start = time.perf_counter()
    rng = random.Random(seed)
    instances = [random_instance(rng) for _ in range(samples)]
    hit_checked = hit_passed = sweep_checked = sweep_passed = 0
    trap_checked = trap_passed = 0
    failures: list[str] = []
    anomalies: list[str] = []
    seen_boundary: set[int] = set()

    for inst in instances:
        desc = render(PrimaryFormula(inst.positive, inst.negative))
        if oracle.chi_holds(inst):
            hit_checked += 1
            if _window_has_solution(inst, oracle, bound, workers, max_sieve):
                hit_passed += 1
            elif oracle.conditionality == UNCONDITIONAL:
                failures.append(f"clauses hold but no solution <= {bound}: {desc}")
            else:
                anomalies.append(f"clauses hold but no solution <= {bound}: {desc}")
        else:
            sweep_checked += 1
            k = oracle.positive_failing_modulus(inst)
            if k is None:
                # blocked negation: the solution set must be empty
                cnt, _ = count_solutions(
                    inst, oracle, bound, workers=workers, cap=1, max_sieve=max_sieve
                )
                if cnt == 0:
                    sweep_passed += 1
                else:
                    failures.append(f"blocked negation but {cnt} window hits: {desc}")
            elif all(
                any((t.coeff * s + t.const) % k == 0 for t in inst.positive)
                for s in range(k)
            ):
                sweep_passed += 1
            else:
                failures.append(f"witness {k} fails the residue sweep: {desc}")
        for k in oracle.build_chi(inst).boundary:
            if k in seen_boundary:
                continue
            seen_boundary.add(k)
            trap_checked += 1
            trapped = oracle.boundary_trapped_set(k)
            bitmap = membership_bitmap(oracle, bound, max_limit=max_sieve)
            multiples = np.arange(0, bound + 1, k, dtype=np.int64)
            hits = multiples[bitmap.test_abs(multiples)]
            actual = {int(v) for v in hits if v > 0}
            actual |= {-v for v in actual}
            if 0 in hits:
                actual.add(0)
            if actual == {v for v in trapped if abs(v) <= bound}:
                trap_passed += 1
            else:
                failures.append(
                    f"trapped set mismatch at modulus {k}: sieve {sorted(actual)}"
                )

    if failures:
        status = "fail"
    elif anomalies:
        status = "pass-with-anomalies"
    else:
        status = "pass"
    elapsed = (time.perf_counter() - start) * 1000.0
    return AxiomReport(
        oracle=oracle.name,
        samples=samples,
        bound=bound,
        seed=seed,
        hit_checked=hit_checked,
        hit_passed=hit_passed,
        hit_anomalies=tuple(anomalies),
        sweep_checked=sweep_checked,
        sweep_passed=sweep_passed,
        trap_checked=trap_checked,
        trap_passed=trap_passed,
        failures=tuple(failures),
        status=status,
        elapsed_ms=elapsed,
    )


def count_mixed(
    pos_pr: list,
    neg_pr: list,
    pos_sf: list,
    neg_sf: list,
    bound: int,
    *,
    workers: int = 1,
    cap: int = SOLUTION_CAP,
    max_sieve: int = DEFAULT_MAX_SIEVE,
) -> tuple[int, list[int]]:
    """Exact window count for a mixed prime/square-free conjunction.

    No classification is attempted; this is raw counting only.
    """
    mixed = MixedFormula(tuple(pos_pr), tuple(neg_pr), tuple(pos_sf), tuple(neg_sf))
    return count_solutions(
        mixed, None, bound, workers=workers, cap=cap, max_sieve=max_sieve
    )
