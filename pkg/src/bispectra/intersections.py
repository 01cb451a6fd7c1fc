"""Intersection numbers on moduli of curves from the DVV (Virasoro) recursion.

Independent of the Grassmannian code; used as an oracle for the Airy tau.
``<tau_a1 ... tau_an>_g`` is nonzero only when ``sum a_i = 3g - 3 + n``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations


def _dfact(n: int) -> int:
    """n!! for odd n >= -1."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _genus(indices: tuple[int, ...]) -> Fraction:
    return Fraction(sum(indices) + 3 - len(indices), 3)


@lru_cache(maxsize=None)
def correlator(indices: tuple[int, ...]) -> Fraction:
    """``<prod tau_a>`` with the genus fixed by the dimension constraint."""
    idx = tuple(sorted(indices, reverse=True))
    g = _genus(idx)
    n = len(idx)
    if g.denominator != 1 or g < 0 or any(a < 0 for a in idx):
        return Fraction(0)
    g = int(g)
    if 2 * g - 2 + n <= 0:
        return Fraction(0)
    if idx == (0, 0, 0):
        return Fraction(1)
    if idx == (1,):
        return Fraction(1, 24)
    if idx[-1] == 0:
        # string equation
        rest = idx[:-1]
        total = Fraction(0)
        for j, a in enumerate(rest):
            if a:
                total += correlator(rest[:j] + (a - 1,) + rest[j + 1 :])
        return total
    # DVV on the largest insertion tau_(k+1)
    k = idx[0] - 1
    S = idx[1:]
    total = Fraction(0)
    for j, a in enumerate(S):
        coef = Fraction(_dfact(2 * k + 2 * a + 1), _dfact(2 * a - 1))
        total += coef * correlator(S[:j] + (a + k,) + S[j + 1 :])
    for r in range(k):
        s = k - 1 - r
        w = Fraction(_dfact(2 * r + 1) * _dfact(2 * s + 1), 2)
        total += w * correlator((r, s) + S)
        positions = range(len(S))
        for size in range(len(S) + 1):
            for I in combinations(positions, size):
                left = (r,) + tuple(S[i] for i in I)
                right = (s,) + tuple(S[i] for i in positions if i not in I)
                total += w * correlator(left) * correlator(right)
    return total / _dfact(2 * k + 3)


def free_energy_coefficient(powers: dict[int, int]) -> Fraction:
    """Coefficient of ``prod t_j**n_j`` in ``F = sum <prod tau> prod t / aut``."""
    indices = tuple(j for j, n in powers.items() for _ in range(n))
    if not indices:
        return Fraction(0)
    aut = 1
    for n in powers.values():
        for i in range(2, n + 1):
            aut *= i
    return correlator(indices) / aut
