"""Bochner-type polynomial families ``P_n = exp(q(d)) x**n``."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .reports import CheckReport
from .weyl import (
    DiffOperator,
    XPolynomial,
    ad_exp_conjugate,
    apply,
    exp_symbol_apply,
)


@dataclass(frozen=True)
class FamilyConfig:
    """Symbol ``q(d) = a_1 d + ... + a_{d+1} d**(d+1)`` of the family.

    ``q_coeffs[j-1]`` is ``a_j``.
    """

    d: int
    q_coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be a positive integer")
        coeffs = tuple(Fraction(c) for c in self.q_coeffs)
        if len(coeffs) != self.d + 1:
            raise ValueError(f"expected {self.d + 1} coefficients a_1..a_(d+1), got {len(coeffs)}")
        if coeffs[-1] == 0:
            raise ValueError("leading coefficient a_(d+1) must be nonzero")
        object.__setattr__(self, "q_coeffs", coeffs)

    @classmethod
    def gould_hopper(cls, d: int) -> "FamilyConfig":
        """``q(d) = -d**(d+1)/(d+1)``; Hermite polynomials at d=1."""
        return cls(d, (0,) * d + (Fraction(-1, d + 1),))

    @property
    def symbol(self) -> XPolynomial:
        return XPolynomial({j + 1: a for j, a in enumerate(self.q_coeffs)})

    @property
    def symbol_derivative(self) -> XPolynomial:
        return self.symbol.derivative()

    def is_gould_hopper(self) -> bool:
        return self == FamilyConfig.gould_hopper(self.d)


@dataclass(frozen=True)
class RecurrenceRow:
    """``x P_n = P_{n+1} + sum_j gamma[j] P_{n-j}``, j in 0..d."""

    n: int
    gamma: dict[int, Fraction]


@lru_cache(maxsize=None)
def generate_polynomial(cfg: FamilyConfig, n: int) -> XPolynomial:
    if n < 0:
        raise ValueError("n must be non-negative")
    return exp_symbol_apply(cfg.symbol, XPolynomial.monomial(n))


def bochner_operator(cfg: FamilyConfig) -> DiffOperator:
    """``L = q'(d) d + x d``, the conjugate of the Euler operator ``x d``."""
    return ad_exp_conjugate(cfg.symbol, DiffOperator({(1, 1): 1}))


def expand_in_family(cfg: FamilyConfig, p: XPolynomial) -> dict[int, Fraction]:
    """Coordinates of ``p`` in the monic basis ``{P_k}``.

    Repeated leading-term elimination; exact.
    """
    out: dict[int, Fraction] = {}
    rest = p
    while not rest.is_zero():
        k = rest.degree
        c = rest[k]
        out[k] = c
        rest = rest - generate_polynomial(cfg, k) * c
    return out


@lru_cache(maxsize=None)
def recurrence_coefficients(cfg: FamilyConfig, n: int) -> RecurrenceRow:
    if n < 0:
        raise ValueError("n must be non-negative")
    rest = XPolynomial.monomial(1) * generate_polynomial(cfg, n) - generate_polynomial(cfg, n + 1)
    coords = expand_in_family(cfg, rest)
    gamma = {n - k: c for k, c in coords.items()}
    return RecurrenceRow(n, gamma)


def verify_bispectrality(cfg: FamilyConfig, n_max: int = 40) -> CheckReport:
    """Exact eigen, lowering and (d+2)-term recurrence identities for n <= n_max."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    report = CheckReport("bispectrality", details={"d": cfg.d, "n_max": n_max})
    L = bochner_operator(cfg)
    dx = DiffOperator.d()
    x = XPolynomial.monomial(1)
    for n in range(n_max + 1):
        P = generate_polynomial(cfg, n)
        if P.degree != n or P[n] != 1:
            report.fail(n=n, identity="monic", leading=P[P.degree] if P.coeffs else 0)
        res = apply(L, P) - P * n
        report.tick()
        if not res.is_zero():
            report.fail(n=n, identity="L P_n = n P_n", residual=res.dense())
        lowered = apply(dx, P)
        expected = generate_polynomial(cfg, n - 1) * n if n else XPolynomial()
        res = lowered - expected
        report.tick()
        if not res.is_zero():
            report.fail(n=n, identity="d P_n = n P_(n-1)", residual=res.dense())
        row = recurrence_coefficients(cfg, n)
        report.tick()
        bad = [j for j in row.gamma if not 0 <= j <= cfg.d or n - j < 0]
        if bad:
            report.fail(n=n, identity="recurrence band", offsets=bad, gamma=row.gamma)
        if n >= cfg.d and not row.gamma.get(cfg.d):
            report.fail(n=n, identity="gamma_d(n) != 0", gamma=row.gamma)
        rebuilt = generate_polynomial(cfg, n + 1)
        for j, g in row.gamma.items():
            rebuilt = rebuilt + generate_polynomial(cfg, n - j) * g
        res = x * P - rebuilt
        report.tick()
        if not res.is_zero():
            report.fail(n=n, identity="x P_n recurrence", residual=res.dense())
    return report
