"""Pseudo-difference operators in the shift ``Lam f(s) = f(s+1) Lam``.

Coefficients are polynomials in the site variable ``s`` (``XPolynomial``
read in ``s``), so every operator is exact and global in ``s``.

An operator is ``finite``, ``upper`` (a series in increasing powers of
``Lam``, exact up to degree ``ceil``) or ``lower`` (decreasing powers,
exact down to ``floor``).  Composition propagates these reliability
bounds; nothing beyond them is ever compared.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .family import FamilyConfig
from .reports import CheckReport
from .weyl import XPolynomial

IndexFunction = XPolynomial


class BandOverflow(ValueError):
    pass


class TruncationInsufficient(ArithmeticError):
    pass


def shift(f: IndexFunction, k: int) -> IndexFunction:
    """``f(s + k)``."""
    if k == 0 or f.is_zero():
        return f
    out: dict[int, Fraction] = {}
    for n, c in f.coeffs.items():
        for j in range(n + 1):
            out[j] = out.get(j, 0) + c * comb(n, j) * Fraction(k) ** (n - j)
    return XPolynomial(out)


def _s(a=0, b=1) -> IndexFunction:
    """``b * s + a``."""
    return XPolynomial({0: a, 1: b})


@dataclass(frozen=True)
class PseudoDiffOperator:
    terms: dict[int, IndexFunction] = field(hash=False)
    kind: str = "finite"
    ceil: int | None = None
    floor: int | None = None

    def __post_init__(self):
        if self.kind not in ("finite", "upper", "lower"):
            raise ValueError(f"unknown type tag {self.kind!r}")
        clean = {}
        for k, f in self.terms.items():
            if not isinstance(f, XPolynomial):
                f = XPolynomial({0: f})
            if f.is_zero():
                continue
            if self.kind == "upper" and k > self.ceil:
                continue
            if self.kind == "lower" and k < self.floor:
                continue
            clean[int(k)] = f
        object.__setattr__(self, "terms", clean)

    # construction ------------------------------------------------------
    @classmethod
    def shift_power(cls, k: int, coeff: IndexFunction | int = 1) -> "PseudoDiffOperator":
        return cls({k: coeff if isinstance(coeff, XPolynomial) else XPolynomial({0: coeff})})

    @classmethod
    def identity(cls) -> "PseudoDiffOperator":
        return cls.shift_power(0)

    def __getitem__(self, k: int) -> IndexFunction:
        if self.kind == "upper" and k > self.ceil:
            raise BandOverflow(f"degree {k} lies above the reliable band (ceil {self.ceil})")
        if self.kind == "lower" and k < self.floor:
            raise BandOverflow(f"degree {k} lies below the reliable band (floor {self.floor})")
        return self.terms.get(k, XPolynomial())

    @property
    def degrees(self) -> list[int]:
        return sorted(self.terms)

    def reliable(self, k: int) -> bool:
        if self.kind == "upper":
            return k <= self.ceil
        if self.kind == "lower":
            return k >= self.floor
        return True

    # arithmetic --------------------------------------------------------
    def _combine_kind(self, other, ceil, floor):
        kinds = {self.kind, other.kind} - {"finite"}
        if len(kinds) > 1:
            raise ValueError("cannot combine upper- and lower-type operators")
        kind = kinds.pop() if kinds else "finite"
        return kind, (ceil if kind == "upper" else None), (floor if kind == "lower" else None)

    def __add__(self, other: "PseudoDiffOperator") -> "PseudoDiffOperator":
        ceils = [p.ceil for p in (self, other) if p.kind == "upper"]
        floors = [p.floor for p in (self, other) if p.kind == "lower"]
        kind, ceil, floor = self._combine_kind(other, min(ceils, default=None), max(floors, default=None))
        out = dict(self.terms)
        for k, f in other.terms.items():
            out[k] = out.get(k, XPolynomial()) + f
        return PseudoDiffOperator(out, kind, ceil, floor)

    def __neg__(self):
        return PseudoDiffOperator({k: -f for k, f in self.terms.items()}, self.kind, self.ceil, self.floor)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "PseudoDiffOperator":
        return PseudoDiffOperator({k: f * Fraction(c) for k, f in self.terms.items()}, self.kind, self.ceil, self.floor)

    def __mul__(self, other):
        if isinstance(other, PseudoDiffOperator):
            return pdo_compose(self, other)
        return self.scale(other)

    def power(self, n: int) -> "PseudoDiffOperator":
        if n < 0:
            raise ValueError("negative powers need a dressing")
        out = PseudoDiffOperator.identity()
        for _ in range(n):
            out = out * self
        return out

    def min_degree(self) -> int:
        return min(self.terms, default=0)

    def max_degree(self) -> int:
        return max(self.terms, default=0)

    def to_dict(self) -> dict:
        from .reports import rat

        return {
            "type": self.kind,
            "ceil": self.ceil,
            "floor": self.floor,
            "terms": [{"degree": k, "coeffs": [rat(c) for c in f.dense()]} for k, f in sorted(self.terms.items())],
        }


def pdo_compose(P: PseudoDiffOperator, Q: PseudoDiffOperator) -> PseudoDiffOperator:
    """``(f Lam**a)(g Lam**b) = f(s) g(s+a) Lam**(a+b)`` with band bookkeeping."""
    kind, _, _ = P._combine_kind(Q, None, None)
    ceil = floor = None
    if kind == "upper":
        bounds = []
        if P.kind == "upper":
            bounds.append(P.ceil + (Q.min_degree() if Q.terms else 0))
        if Q.kind == "upper":
            bounds.append(Q.ceil + (P.min_degree() if P.terms else 0))
        ceil = min(bounds)
    elif kind == "lower":
        bounds = []
        if P.kind == "lower":
            bounds.append(P.floor + (Q.max_degree() if Q.terms else 0))
        if Q.kind == "lower":
            bounds.append(Q.floor + (P.max_degree() if P.terms else 0))
        floor = max(bounds)
    out: dict[int, IndexFunction] = {}
    for a, f in P.terms.items():
        for b, g in Q.terms.items():
            k = a + b
            if kind == "upper" and k > ceil:
                continue
            if kind == "lower" and k < floor:
                continue
            out[k] = out.get(k, XPolynomial()) + f * shift(g, a)
    return PseudoDiffOperator(out, kind, ceil, floor)


def project_plus(P: PseudoDiffOperator) -> PseudoDiffOperator:
    """Degrees ``>= 0``."""
    terms = {k: f for k, f in P.terms.items() if k >= 0}
    if P.kind == "upper":
        return PseudoDiffOperator(terms, "upper", P.ceil)
    return PseudoDiffOperator(terms)


def project_minus(P: PseudoDiffOperator) -> PseudoDiffOperator:
    """Degrees ``< 0``."""
    terms = {k: f for k, f in P.terms.items() if k < 0}
    if P.kind == "lower":
        return PseudoDiffOperator(terms, "lower", floor=P.floor)
    return PseudoDiffOperator(terms)


def bracket(P: PseudoDiffOperator, Q: PseudoDiffOperator) -> PseudoDiffOperator:
    return P * Q - Q * P


def lax_operator(cfg: FamilyConfig | int) -> PseudoDiffOperator:
    """``D = (s+1) Lam + Lam**(-d)``, from ``x nu(s) = (s+1) nu(s+1) + nu(s-d)``."""
    if isinstance(cfg, FamilyConfig):
        if not cfg.is_gould_hopper():
            raise ValueError("the Lax operator is written for the Gould-Hopper recurrence")
        d = cfg.d
    else:
        d = int(cfg)
    return PseudoDiffOperator({1: _s(1), -d: XPolynomial({0: 1})})


# ---------------------------------------------------------------------------
# dressing


def solve_difference(r: IndexFunction, step: int) -> IndexFunction:
    """Polynomial ``u`` with ``u(s) - u(s - step) = r(s)`` and ``u(0) = 0``."""
    if step == 0:
        raise ValueError("step must be nonzero")
    n = r.degree
    if n < 0:
        return XPolynomial()
    # columns: images of s**k, k = 1..n+1; triangular in degree
    images = {k: XPolynomial.monomial(k) - shift(XPolynomial.monomial(k), -step) for k in range(1, n + 2)}
    u: dict[int, Fraction] = {}
    rest = r
    for k in range(n + 1, 0, -1):
        lead = images[k][k - 1]
        c = rest[k - 1] / lead
        if c:
            u[k] = c
            rest = rest - images[k] * c
    if not rest.is_zero():
        raise ArithmeticError("difference equation left a remainder")
    return XPolynomial(u)


def _lower_data(D: PseudoDiffOperator) -> tuple[int, IndexFunction, IndexFunction]:
    """``(d, a, b)`` for ``D = a(s) Lam + b Lam**(-d)``; ``a`` may vanish."""
    negative = [k for k in D.terms if k < 0]
    if len(negative) != 1 or any(k not in (1, negative[0]) for k in D.terms):
        raise ValueError("expected D = a(s) Lam + b Lam**(-d)")
    d = -negative[0]
    b = D.terms[-d]
    if b.degree != 0:
        raise ValueError("the Lam**(-d) coefficient must be an invertible constant for the lower dressing")
    return d, D.terms.get(1, XPolynomial()), b


def lower_dressing(D: PseudoDiffOperator, order: int) -> PseudoDiffOperator:
    """``W = sum_j delta_j Lam**j`` with ``D W = W Lam**(-d)`` up to degree ``order``.

    Degree by degree: ``b (delta_J(s) - delta_J(s-d)) = a(s) delta_(J-d-1)(s+1)``.
    """
    d, a, b = _lower_data(D)
    if b[0] != 1:
        raise ValueError("normalize D so that the Lam**(-d) coefficient is 1")
    delta: dict[int, IndexFunction] = {0: XPolynomial({0: 1})}
    for J in range(1, order + 1):
        src = delta.get(J - d - 1)
        if src is None or src.is_zero():
            delta[J] = XPolynomial()
            continue
        delta[J] = solve_difference(a * shift(src, 1), d)
    return PseudoDiffOperator(delta, "upper", ceil=order)


def invert_upper(W: PseudoDiffOperator) -> PseudoDiffOperator:
    """Inverse of ``1 + (positive degrees)`` to the same ceil."""
    if W.min_degree() != 0 or W.terms[0] != XPolynomial({0: 1}):
        raise ValueError("non-invertible dressing coefficient: need leading term 1 at degree 0")
    N = W.ceil
    V: dict[int, IndexFunction] = {0: XPolynomial({0: 1})}
    for n in range(1, N + 1):
        acc = XPolynomial()
        for j in range(1, n + 1):
            dj = W.terms.get(j)
            if dj is not None and not V[n - j].is_zero():
                acc = acc + dj * shift(V[n - j], j)
        V[n] = -acc
    return PseudoDiffOperator(V, "upper", ceil=N)


def dth_root(D: PseudoDiffOperator, d: int | None = None, order: int = 12) -> PseudoDiffOperator:
    """``R = W Lam**(-1) W**(-1)`` with ``R**d = D`` on the reliable band.

    ``order`` counts reliable degrees of ``R**d`` above its leading ``Lam**(-d)``.
    """
    if order < 1:
        raise ValueError("order must be positive")
    dd, _, _ = _lower_data(D)
    if d is not None and d != dd:
        raise ValueError(f"D has Lam**(-{dd}) but d = {d} was requested")
    W = lower_dressing(D, order + dd)
    V = invert_upper(W)
    R = W * PseudoDiffOperator.shift_power(-1) * V
    # R's reliable ceil is order + d - 1; R**d then reaches -d + order
    return R


def fractional_power(D: PseudoDiffOperator, k: int, order: int = 12) -> PseudoDiffOperator:
    """``D**(k/d)`` as ``R**k``."""
    if k < 1:
        raise ValueError("k must be positive")
    R = dth_root(D, order=order)
    out = R
    for _ in range(k - 1):
        out = out * R
    return out


@dataclass(frozen=True)
class FlowResult:
    k: int
    plus_form: PseudoDiffOperator
    minus_form: PseudoDiffOperator
    band: tuple[int, int]
    wave_flow: PseudoDiffOperator

    def rhs(self) -> PseudoDiffOperator:
        """The flow on the reliable band (exact; taken from the finite minus form)."""
        return self.minus_form


def flow_rhs(D: PseudoDiffOperator, k: int, d: int | None = None, order: int = 12) -> FlowResult:
    """``[(D**(k/d))_+, D]`` computed directly and as ``-[(D**(k/d))_-, D]``."""
    if k < 1:
        raise ValueError("k must be positive")
    Rk = fractional_power(D, k, order)
    plus = bracket(project_plus(Rk), D)
    minus = -bracket(project_minus(Rk), D)
    lo = min(minus.degrees + plus.degrees, default=0)
    hi = plus.ceil if plus.kind == "upper" else max(plus.degrees, default=0)
    for deg in range(lo, hi + 1):
        if plus[deg] != minus[deg]:
            raise TruncationInsufficient(f"plus and minus forms disagree at degree {deg} inside the reliable band")
    W = lower_dressing(D, order + _lower_data(D)[0])
    wave = -(project_minus(Rk) * W)
    return FlowResult(k, plus, minus, (lo, hi), wave)


def integer_power_flow(D: PseudoDiffOperator, j: int) -> PseudoDiffOperator:
    """``[(D**j)_+, D]`` with an honest integer power; exact."""
    return bracket(project_plus(D.power(j)), D)


# ---------------------------------------------------------------------------
# checks


def verify_root(D: PseudoDiffOperator, order: int = 12) -> CheckReport:
    d = _lower_data(D)[0]
    report = CheckReport("d-th root", details={"d": d, "order": order})
    R = dth_root(D, order=order)
    Rd = R.power(d)
    report.details["ceil"] = Rd.ceil
    if Rd.ceil < -d + order:
        report.fail(kind="insufficient band", ceil=Rd.ceil)
    for deg in range(-d, Rd.ceil + 1):
        report.tick()
        res = Rd[deg] - D.terms.get(deg, XPolynomial())
        if not res.is_zero():
            report.fail(degree=deg, residual=res.dense())
    return report


def verify_flows(D: PseudoDiffOperator, ks=(1, 2, 3), order: int = 12) -> CheckReport:
    d = _lower_data(D)[0]
    report = CheckReport("toda flows", details={"d": d, "order": order, "bands": {}})
    for k in ks:
        try:
            res = flow_rhs(D, k, order=order)
        except TruncationInsufficient as exc:
            report.fail(k=k, error=str(exc))
            continue
        report.tick()
        report.details["bands"][k] = list(res.band)
        if k % d == 0:
            direct = integer_power_flow(D, k // d)
            report.tick()
            for deg in range(res.band[0], res.band[1] + 1):
                if res.plus_form[deg] != direct.terms.get(deg, XPolynomial()):
                    report.fail(k=k, degree=deg, kind="integer power mismatch")
    return report


def monic_lax(d: int) -> PseudoDiffOperator:
    """``g(s)**-1 D g(s)`` with ``g = 1/s!``: ``Lam + s(s-1)...(s-d+1) Lam**(-d)``."""
    c = XPolynomial({0: 1})
    for i in range(d):
        c = c * _s(-i)
    return PseudoDiffOperator({1: XPolynomial({0: 1}), -d: c})


def lambda_dressing(d: int, order: int = 12) -> PseudoDiffOperator:
    """``Wbar = sum_n gamma_n Lam**(-n)`` with ``D' Wbar = Wbar Lam`` for the monic ``D'``.

    ``gamma_n(s+1) - gamma_n(s) = -c(s) gamma_(n-d-1)(s-d)``.
    """
    c = monic_lax(d).terms[-d]
    gamma: dict[int, IndexFunction] = {0: XPolynomial({0: 1})}
    for n in range(1, order + 1):
        src = gamma.get(n - d - 1)
        if src is None or src.is_zero():
            gamma[n] = XPolynomial()
            continue
        # u(s+1) - u(s) = r(s)  <=>  v(s) - v(s-1) = r(s) with v(s) = u(s+1)
        r = -(c * shift(src, -d))
        v = solve_difference(r, 1)
        gamma[n] = shift(v, -1)
    return PseudoDiffOperator({-n: g for n, g in gamma.items()}, "lower", floor=-order)


def verify_lambda_dressing(d: int, order: int = 12) -> CheckReport:
    report = CheckReport("Lam-side dressing", details={"d": d, "order": order})
    Dm = monic_lax(d)
    Wb = lambda_dressing(d, order)
    lhs = Dm * Wb
    rhs = Wb * PseudoDiffOperator.shift_power(1)
    lo = max(lhs.floor, rhs.floor)
    for deg in range(lo, 2):
        report.tick()
        res = lhs[deg] - rhs[deg]
        if not res.is_zero():
            report.fail(degree=deg, residual=res.dense())
    return report
