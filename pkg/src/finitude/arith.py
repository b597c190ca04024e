"""Exact integer kernel: extended gcd, linear congruence solving, CRT.

Everything here runs on Python's unbounded integers, so intermediate
products of moduli and coefficients can never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm


@dataclass(frozen=True)
class CongruenceClass:
    """The set {x : x = residue (mod modulus)}; modulus 1 means all integers."""

    modulus: int
    residue: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {self.modulus}")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def __contains__(self, x: int) -> bool:
        return x % self.modulus == self.residue

    def __str__(self) -> str:
        return f"x = {self.residue} mod {self.modulus}"


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, u, v) with g = gcd(|a|, |b|) >= 0 and u*a + v*b = g."""
    if a == 0 and b == 0:
        return 0, 0, 0
    old_r, r = abs(a), abs(b)
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if a < 0:
        old_u = -old_u
    if b < 0:
        old_v = -old_v
    return old_r, old_u, old_v


def solve_linear_congruence(coeff: int, const: int, modulus: int) -> CongruenceClass | None:
    """Solve coeff*x + const = 0 (mod modulus).

    Returns the full solution set as a single congruence class, or None when
    gcd(coeff, modulus) does not divide const.
    """
    if modulus < 1:
        raise ValueError(f"modulus must be >= 1, got {modulus}")
    a = coeff % modulus
    rhs = (-const) % modulus
    g = gcd(a, modulus)  # gcd(0, m) = m covers the constant case
    if rhs % g:
        return None
    reduced_mod = modulus // g
    if reduced_mod == 1:
        return CongruenceClass(1, 0)
    a_red = (a // g) % reduced_mod
    rhs_red = (rhs // g) % reduced_mod
    x0 = rhs_red * pow(a_red, -1, reduced_mod) % reduced_mod
    return CongruenceClass(reduced_mod, x0)


def crt(classes: list[CongruenceClass]) -> CongruenceClass | None:
    """Intersect congruence classes into one class mod the lcm, or None if empty.

    The empty intersection is all of Z, i.e. x = 0 (mod 1).
    """
    modulus, residue = 1, 0
    for cls in classes:
        g = gcd(modulus, cls.modulus)
        if (cls.residue - residue) % g:
            return None
        combined = lcm(modulus, cls.modulus)
        step_mod = cls.modulus // g
        t = (cls.residue - residue) // g * pow((modulus // g) % step_mod, -1, step_mod) % step_mod
        residue = (residue + modulus * t) % combined
        modulus = combined
    return CongruenceClass(modulus, residue)
