"""Dual functionals of a Bochner family, realized through exact moments.

A functional is never evaluated pointwise here: every pairing with a
polynomial reduces to a finite combination of the moments
``mu_k = <v_0, x**k>``, which are fixed by the Pearson equation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .family import FamilyConfig, generate_polynomial, recurrence_coefficients
from .reports import CheckReport
from .weyl import DiffOperator, XPolynomial, apply, formal_adjoint


class InsufficientMoments(ValueError):
    pass


def pearson_operator(cfg: FamilyConfig) -> DiffOperator:
    """``q'(-d) + x``; the first weight is annihilated by it."""
    reflected = {b: c * (-1) ** b for b, c in cfg.symbol_derivative.coeffs.items()}
    return DiffOperator.from_symbol(XPolynomial(reflected)) + DiffOperator.x()


@dataclass(frozen=True)
class MomentSequence:
    d: int
    moments: tuple[Fraction, ...]

    @property
    def K(self) -> int:
        return len(self.moments) - 1

    def pair(self, p: XPolynomial) -> Fraction:
        if p.degree > self.K:
            raise InsufficientMoments(f"need moments up to {p.degree}, have {self.K}")
        return sum((c * self.moments[k] for k, c in p.coeffs.items()), Fraction(0))


def moment_sequence(cfg: FamilyConfig, K: int) -> MomentSequence:
    """Moments ``mu_0..mu_K`` with ``mu_0 = 1``.

    Pairing the Pearson equation with ``x**k`` moves the operator onto the
    polynomial side as its formal adjoint ``x + q'(d)``, and
    ``(x + q'(d)) x**k = x**(k+1) + lower`` gives ``mu_(k+1)``.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    adj = formal_adjoint(pearson_operator(cfg))
    mu = [Fraction(1)]
    for k in range(K):
        image = apply(adj, XPolynomial.monomial(k))
        lead = image[k + 1]
        assert image.degree == k + 1 and lead, "adjoint Pearson operator must raise degree by one"
        lower = sum((c * mu[j] for j, c in image.coeffs.items() if j <= k), Fraction(0))
        mu.append(-lower / lead)
    return MomentSequence(cfg.d, tuple(mu))


@dataclass(frozen=True)
class LinearFunctional:
    """``v_j``, acting by ``<v_j, p> = <v_0, d**j p> / j!``."""

    j: int
    base: MomentSequence


def pair_functional(f: LinearFunctional, p: XPolynomial) -> Fraction:
    return f.base.pair(p.derivative(f.j)) / factorial(f.j)


def dual_functionals(cfg: FamilyConfig, count: int, degree: int) -> list[LinearFunctional]:
    base = moment_sequence(cfg, degree)
    return [LinearFunctional(j, base) for j in range(count)]


def verify_duality(cfg: FamilyConfig, N: int = 20) -> CheckReport:
    """``<v_j, P_n> = delta_jn`` for 0 <= j, n <= N."""
    report = CheckReport("duality", details={"d": cfg.d, "N": N})
    base = moment_sequence(cfg, N)
    for j in range(N + 1):
        v = LinearFunctional(j, base)
        for n in range(N + 1):
            value = pair_functional(v, generate_polynomial(cfg, n))
            report.tick()
            if value != (1 if j == n else 0):
                report.fail(j=j, n=n, value=value)
    return report


def verify_d_orthogonality(cfg: FamilyConfig, N: int = 20) -> CheckReport:
    """Vanishing and non-degeneracy conditions for the d functionals v_0..v_{d-1}."""
    d = cfg.d
    report = CheckReport("d-orthogonality", details={"d": d, "N": N})
    base = moment_sequence(cfg, 2 * N)
    for j in range(d):
        v = LinearFunctional(j, base)
        for n in range(N + 1):
            Pn = generate_polynomial(cfg, n)
            for m in range(N + 1):
                if m < n * d + j:
                    continue
                value = pair_functional(v, Pn * generate_polynomial(cfg, m))
                report.tick()
                if m > n * d + j and value != 0:
                    report.fail(j=j, n=n, m=m, kind="vanishing", value=value)
                elif m == n * d + j and value == 0:
                    report.fail(j=j, n=n, m=m, kind="non-degenerate", value=value)
    return report


def weight_recurrence_matrix(cfg: FamilyConfig, N: int) -> dict[tuple[int, int], Fraction]:
    """Nonzero entries of ``M[j][n] = <x v_j, P_n> = <v_j, x P_n>`` for j, n <= N."""
    base = moment_sequence(cfg, N + 1)
    x = XPolynomial.monomial(1)
    out = {}
    for j in range(N + 1):
        v = LinearFunctional(j, base)
        for n in range(N + 1):
            value = pair_functional(v, x * generate_polynomial(cfg, n))
            if value:
                out[(j, n)] = value
    return out


def verify_weight_recurrence(cfg: FamilyConfig, N: int = 15) -> CheckReport:
    """Band structure of ``x v_m``: only ``v_(m-1)`` and ``v_m .. v_(m+d)`` occur.

    ``x v_m = sum_n M[m][n] v_n``; the entries are also compared with the
    polynomial recurrence, ``M[m][m-1] = 1`` and ``M[m][m+k] = gamma_k(m+k)``.
    """
    d = cfg.d
    report = CheckReport("weight recurrence band", details={"d": d, "N": N})
    M = weight_recurrence_matrix(cfg, N)
    for (m, n), value in M.items():
        report.tick()
        if not m - 1 <= n <= m + d:
            report.fail(m=m, n=n, value=value, kind="outside band")
    for m in range(N + 1):
        for n in range(max(m - 1, 0), min(m + d, N) + 1):
            if n == m - 1:
                expected = Fraction(1)
            else:
                expected = recurrence_coefficients(cfg, n).gamma.get(n - m, Fraction(0))
            report.tick()
            if M.get((m, n), Fraction(0)) != expected:
                report.fail(m=m, n=n, value=M.get((m, n), Fraction(0)), expected=expected)
    return report
