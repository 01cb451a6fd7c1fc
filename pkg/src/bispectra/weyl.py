"""Exact arithmetic in the first Weyl algebra.

Operators are stored in normal order, every ``x`` to the left of every
``d`` (the derivative), as a mapping ``(a, b) -> c`` for the term
``c * x**a * d**b``.  Coefficients are :class:`fractions.Fraction`.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Mapping


def _falling(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1); zero once k exceeds a non-negative n."""
    out = 1
    for i in range(k):
        out *= n - i
    return out


class XPolynomial:
    """Univariate polynomial with exact rational coefficients.

    Used both for polynomials in ``x`` and for symbols ``q(d)`` in the
    derivative; the indeterminate is only a matter of interpretation.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, object] | Iterable[object] = ()):
        if isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        data = {}
        for k, c in items:
            if k < 0:
                raise ValueError("negative degree in polynomial")
            c = Fraction(c)
            if c:
                data[int(k)] = data.get(int(k), 0) + c
        self.coeffs = {k: v for k, v in data.items() if v}

    @classmethod
    def monomial(cls, n: int, c=1) -> "XPolynomial":
        return cls({n: c})

    @property
    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs.get(k, Fraction(0))

    def dense(self) -> list[Fraction]:
        """Coefficients in ascending degree order."""
        return [self[k] for k in range(self.degree + 1)]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = XPolynomial({0: other})
        return isinstance(other, XPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = XPolynomial({0: other})
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return XPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return XPolynomial({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, XPolynomial) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return XPolynomial({k: c * other for k, c in self.coeffs.items()})
        out: dict[int, Fraction] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                out[i + j] = out.get(i + j, 0) + a * b
        return XPolynomial(out)

    __rmul__ = __mul__

    def derivative(self, k: int = 1) -> "XPolynomial":
        return XPolynomial({n - k: c * _falling(n, k) for n, c in self.coeffs.items() if n >= k})

    def __call__(self, value):
        acc = 0
        for c in reversed(self.dense()):
            acc = acc * value + c
        return acc

    def __repr__(self):
        if not self.coeffs:
            return "XPolynomial(0)"
        terms = " + ".join(f"{c}*x^{k}" for k, c in sorted(self.coeffs.items()))
        return f"XPolynomial({terms})"


class DiffOperator:
    """Element of the Weyl algebra, ``sum c * x**a * d**b`` in normal order."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        data: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in (terms or {}).items():
            if a < 0 or b < 0:
                raise ValueError("negative power in Weyl algebra term")
            c = Fraction(c)
            if c:
                data[(a, b)] = data.get((a, b), 0) + c
        self.terms = {k: v for k, v in data.items() if v}

    @classmethod
    def x(cls) -> "DiffOperator":
        return cls({(1, 0): 1})

    @classmethod
    def d(cls) -> "DiffOperator":
        return cls({(0, 1): 1})

    @classmethod
    def scalar(cls, c) -> "DiffOperator":
        return cls({(0, 0): c})

    @classmethod
    def from_symbol(cls, q: XPolynomial) -> "DiffOperator":
        """The constant-coefficient operator ``q(d)``."""
        return cls({(0, b): c for b, c in q.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def x_degree(self) -> int:
        return max((a for a, _ in self.terms), default=-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, DiffOperator) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __add__(self, other):
        if not isinstance(other, DiffOperator):
            other = DiffOperator.scalar(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return DiffOperator(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffOperator({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, DiffOperator):
            other = DiffOperator.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, DiffOperator):
            return compose(self, other)
        return DiffOperator({k: c * other for k, c in self.terms.items()})

    def __rmul__(self, other):
        return DiffOperator({k: c * other for k, c in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return "DiffOperator(0)"
        parts = []
        for (a, b), c in sorted(self.terms.items()):
            parts.append(f"{c}*x^{a}*d^{b}")
        return "DiffOperator(" + " + ".join(parts) + ")"


def compose(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    """Normal-ordered product ``A o B``.

    Uses ``d**b x**c = sum_k C(b,k) c!/(c-k)! x**(c-k) d**(b-k)``.
    """
    out: dict[tuple[int, int], Fraction] = {}
    for (a, b), u in A.terms.items():
        for (c, e), v in B.terms.items():
            for k in range(min(b, c) + 1):
                key = (a + c - k, b - k + e)
                out[key] = out.get(key, 0) + u * v * comb(b, k) * _falling(c, k)
    return DiffOperator(out)


def commutator(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    return compose(A, B) - compose(B, A)


def apply(A: DiffOperator, p: XPolynomial) -> XPolynomial:
    """Action of ``A`` on a polynomial in ``x``."""
    out: dict[int, Fraction] = {}
    for (a, b), u in A.terms.items():
        for n, c in p.coeffs.items():
            if n >= b:
                k = n - b + a
                out[k] = out.get(k, 0) + u * c * _falling(n, b)
    return XPolynomial(out)


def ad_exp_conjugate(q: XPolynomial, A: DiffOperator) -> DiffOperator:
    """``exp(ad q(d)) A`` for a symbol ``q`` without constant term.

    Each commutator with ``q(d)`` lowers the x-degree, so the series is
    summed until its first zero term.
    """
    if q[0]:
        raise ValueError("q(d) must have zero constant term")
    Q = DiffOperator.from_symbol(q)
    total = A
    term = A
    j = 0
    while True:
        j += 1
        term = commutator(Q, term) * Fraction(1, j)
        if term.is_zero():
            return total
        total = total + term


def formal_adjoint(A: DiffOperator) -> DiffOperator:
    """Formal adjoint with ``x* = x``, ``d* = -d``, ``(AB)* = B* A*``."""
    out = DiffOperator()
    for (a, b), c in A.terms.items():
        piece = compose(DiffOperator({(0, b): (-1) ** b}), DiffOperator({(a, 0): 1}))
        out = out + piece * c
    return out


def exp_symbol_apply(q: XPolynomial, p: XPolynomial) -> XPolynomial:
    """``exp(q(d)) p``; finite because ``q(d)`` strictly lowers degree."""
    if q[0]:
        raise ValueError("q(d) must have zero constant term")
    Q = DiffOperator.from_symbol(q)
    total = p
    term = p
    j = 0
    while not term.is_zero():
        j += 1
        term = apply(Q, term) * Fraction(1, j)
        total = total + term
    return total


__all__ = [
    "XPolynomial",
    "DiffOperator",
    "compose",
    "commutator",
    "apply",
    "ad_exp_conjugate",
    "formal_adjoint",
    "exp_symbol_apply",
]
