"""Partitions and Schur polynomials in the times ``t`` (power sums ``p_k = k t_k``)."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .series import TauSeries


class Partition(tuple):
    """Weakly decreasing tuple of positive parts."""

    def __new__(cls, parts=()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError("parts must be positive")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError("parts must be weakly decreasing")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    def conjugate(self) -> "Partition":
        if not self:
            return Partition()
        return Partition(sum(1 for p in self if p > i) for i in range(self[0]))

    def __repr__(self):
        return f"Partition{tuple(self)}"


def partitions(n: int, max_part: int | None = None):
    """All partitions of ``n``, largest first part first."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield Partition()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield Partition((first,) + tuple(rest))


def partitions_up_to(D: int):
    for n in range(D + 1):
        yield from partitions(n)


@lru_cache(maxsize=None)
def complete_homogeneous(n: int, K: int, D: int) -> TauSeries:
    """``h_n(t)``: coefficient of ``z**n`` in ``exp(sum_k t_k z**k)``."""
    if n < 0:
        return TauSeries(K, D)
    if n == 0:
        return TauSeries.one(K, D)
    # n h_n = sum_k k t_k h_(n-k)
    out = TauSeries(K, D)
    for k in range(1, min(n, K) + 1):
        out = out + complete_homogeneous(n - k, K, D).times_variable(k, k)
    return out * Fraction(1, n)


def schur(lam: Partition, K: int | None = None, D: int | None = None) -> TauSeries:
    """Jacobi-Trudi ``det(h_(lam_i - i + j))`` by memoized Laplace expansion."""
    lam = Partition(lam)
    n = lam.size
    K = n if K is None else K
    D = n if D is None else D
    if K < n and n:
        # times beyond the cap would be dropped silently otherwise
        raise ValueError(f"variable cap {K} below |lambda| = {n}")
    return _jt_minor(tuple(lam), tuple(range(len(lam))), K, D)


@lru_cache(maxsize=None)
def _jt_minor(tail: tuple[int, ...], cols: tuple[int, ...], K: int, D: int) -> TauSeries:
    """``det(h_(tail_k - k + c))`` over rows ``k`` and columns ``c`` in ``cols``.

    Expanding along the first row and shifting the remaining columns by -1
    keeps the key independent of the absolute row, so partitions sharing a
    tail share their minors.
    """
    if not tail:
        return TauSeries.one(K, D)
    out = TauSeries(K, D)
    for pos, c in enumerate(cols):
        entry = complete_homogeneous(tail[0] + c, K, D)
        if entry.is_zero():
            continue
        rest = tuple(b - 1 for b in cols if b != c)
        term = entry * _jt_minor(tail[1:], rest, K, D)
        out = out + (term if pos % 2 == 0 else -term)
    return out


def semistandard_tableaux(lam: Partition, n_letters: int):
    """Yield SSYT of shape ``lam`` with entries in ``0..n_letters-1`` as row tuples."""
    lam = Partition(lam)
    cells = [(i, j) for i, r in enumerate(lam) for j in range(r)]
    filling: dict[tuple[int, int], int] = {}

    def rec(idx):
        if idx == len(cells):
            yield tuple(tuple(filling[(i, j)] for j in range(r)) for i, r in enumerate(lam))
            return
        i, j = cells[idx]
        lo = 0
        if j > 0:
            lo = max(lo, filling[(i, j - 1)])
        if i > 0:
            lo = max(lo, filling[(i - 1, j)] + 1)
        for v in range(lo, n_letters):
            filling[(i, j)] = v
            yield from rec(idx + 1)
        filling.pop((i, j), None)

    yield from rec(0)


def schur_from_tableaux(lam: Partition, xs) -> Fraction:
    """Combinatorial ``s_lam(x_1..x_N) = sum over SSYT of x**T``."""
    total = Fraction(0)
    for tab in semistandard_tableaux(lam, len(xs)):
        term = Fraction(1)
        for row in tab:
            for v in row:
                term *= xs[v]
        total += term
    return total


def times_from_variables(xs, K: int) -> dict[int, Fraction]:
    """Times with ``k t_k = p_k(x) = sum_i x_i**k``."""
    return {k: sum((Fraction(x) ** k for x in xs), Fraction(0)) / k for k in range(1, K + 1)}


__all__ = [
    "Partition",
    "partitions",
    "partitions_up_to",
    "complete_homogeneous",
    "schur",
    "semistandard_tableaux",
    "schur_from_tableaux",
    "times_from_variables",
]

