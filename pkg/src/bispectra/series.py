"""Truncated polynomials in the times ``t_1..t_K`` with weight ``deg t_k = k``."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

Monomial = tuple[int, ...]


def weight(mono: Monomial) -> int:
    return sum((k + 1) * e for k, e in enumerate(mono))


class TauSeries:
    """Exact polynomial in ``t_1..t_K``, truncated above weight ``D``.

    Terms are stored as ``{exponent tuple of length K: Fraction}``.
    """

    __slots__ = ("K", "D", "terms")

    def __init__(self, K: int, D: int, terms: Mapping[Monomial, object] | None = None):
        if K < 0 or D < 0:
            raise ValueError("caps must be non-negative")
        self.K = K
        self.D = D
        data: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != K:
                raise ValueError(f"monomial {mono} does not have {K} exponents")
            if weight(mono) > D:
                continue
            c = Fraction(c)
            if c:
                data[mono] = data.get(mono, 0) + c
        self.terms = {m: c for m, c in data.items() if c}

    # construction -------------------------------------------------------
    @classmethod
    def one(cls, K: int, D: int) -> "TauSeries":
        return cls(K, D, {(0,) * K: 1})

    @classmethod
    def variable(cls, k: int, K: int, D: int, c=1) -> "TauSeries":
        if not 1 <= k <= K:
            raise ValueError(f"t_{k} outside variable cap {K}")
        mono = [0] * K
        mono[k - 1] = 1
        return cls(K, D, {tuple(mono): c})

    @classmethod
    def from_exponents(cls, K: int, D: int, items: Iterable[tuple[Mapping[int, int], object]]) -> "TauSeries":
        """Build from ``({k: power}, coeff)`` pairs."""
        terms = {}
        for powers, c in items:
            mono = [0] * K
            for k, e in powers.items():
                mono[k - 1] += e
            terms[tuple(mono)] = terms.get(tuple(mono), 0) + Fraction(c)
        return cls(K, D, terms)

    def _like(self, terms) -> "TauSeries":
        return TauSeries(self.K, self.D, terms)

    # inspection ---------------------------------------------------------
    def coefficient(self, powers: Mapping[int, int] | Monomial) -> Fraction:
        if isinstance(powers, Mapping):
            mono = [0] * self.K
            for k, e in powers.items():
                mono[k - 1] = e
            powers = tuple(mono)
        return self.terms.get(tuple(powers), Fraction(0))

    @property
    def constant(self) -> Fraction:
        return self.terms.get((0,) * self.K, Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def max_weight(self) -> int:
        return max((weight(m) for m in self.terms), default=-1)

    def homogeneous(self, w: int) -> "TauSeries":
        return self._like({m: c for m, c in self.terms.items() if weight(m) == w})

    def truncate(self, D: int) -> "TauSeries":
        return TauSeries(self.K, min(D, self.D), self.terms)

    def depends_on(self, k: int) -> bool:
        return any(m[k - 1] for m in self.terms)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda mc: (weight(mc[0]), mc[0]))

    def __eq__(self, other) -> bool:
        return isinstance(other, TauSeries) and self.terms == other.terms

    def __repr__(self):
        parts = []
        for mono, c in self.sorted_terms():
            factors = "*".join(f"t{k + 1}^{e}" if e > 1 else f"t{k + 1}" for k, e in enumerate(mono) if e)
            parts.append(f"{c}" + (f"*{factors}" if factors else ""))
        return "TauSeries(" + (" + ".join(parts) or "0") + ")"

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "TauSeries"):
        if self.K != other.K:
            raise ValueError("variable caps differ")

    def __add__(self, other):
        if not isinstance(other, TauSeries):
            other = TauSeries.one(self.K, self.D) * Fraction(other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return TauSeries(self.K, min(self.D, other.D), out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TauSeries):
            other = Fraction(other)
            return self._like({m: c * other for m, c in self.terms.items()})
        self._check(other)
        D = min(self.D, other.D)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            w1 = weight(m1)
            for m2, c2 in other.terms.items():
                if w1 + weight(m2) > D:
                    continue
                key = tuple(a + b for a, b in zip(m1, m2))
                out[key] = out.get(key, 0) + c1 * c2
        return TauSeries(self.K, D, out)

    __rmul__ = __mul__

    def times_variable(self, k: int, c=1) -> "TauSeries":
        """``c * t_k * self``."""
        c = Fraction(c)
        out = {}
        for m, v in self.terms.items():
            mono = list(m)
            mono[k - 1] += 1
            out[tuple(mono)] = v * c
        return self._like(out)

    def derivative(self, k: int) -> "TauSeries":
        out = {}
        for m, c in self.terms.items():
            e = m[k - 1]
            if e:
                mono = list(m)
                mono[k - 1] -= 1
                out[tuple(mono)] = c * e
        return self._like(out)

    def evaluate(self, values: Mapping[int, object]):
        total = 0
        for m, c in self.terms.items():
            term = c
            for k, e in enumerate(m):
                if e:
                    term = term * values[k + 1] ** e
            total = total + term
        return total

    def log(self) -> "TauSeries":
        """Truncated logarithm; needs constant term 1."""
        if self.constant != 1:
            raise ValueError("log needs constant term 1")
        u = self - 1
        out = TauSeries(self.K, self.D)
        power = TauSeries.one(self.K, self.D)
        for n in range(1, self.D + 1):
            power = power * u
            if power.is_zero():
                break
            out = out + power * Fraction((-1) ** (n + 1), n)
        return out

    def exp(self) -> "TauSeries":
        """Truncated exponential; needs zero constant term."""
        if self.constant:
            raise ValueError("exp needs zero constant term")
        out = TauSeries.one(self.K, self.D)
        power = TauSeries.one(self.K, self.D)
        for n in range(1, self.D + 1):
            power = power * self * Fraction(1, n)
            if power.is_zero():
                break
            out = out + power
        return out

    def to_dict(self) -> dict:
        """Canonical JSON form: terms keyed by sorted exponent lists ``[[k, power], ...]``."""
        from .reports import rat

        return {
            "K": self.K,
            "D": self.D,
            "terms": [
                {"monomial": [[k + 1, e] for k, e in enumerate(m) if e], "coeff": rat(c)}
                for m, c in self.sorted_terms()
            ],
        }
