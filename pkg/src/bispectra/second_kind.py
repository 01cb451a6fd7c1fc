"""Functions of the second kind for the Gould-Hopper family.

    nu(s, x) = int_C z**(-s-1) exp(-z**(d+1)/(d+1) + x z) dz

Numerically, ``C`` is two rays leaving the point ``offset > 0`` at angles
``+-2 pi/(d+1)``, traversed inward along the lower ray and outward along
the upper one; with this orientation ``nu(-1, x) = 2 pi i Ai(x)`` at d=2.

Formally, for ``x = y**d`` the saddle at ``z = y`` gives

    nu(s, y**d) ~ const * exp(d/(d+1) y**(d+1)) * y**(-s-(d+1)/2) * T_s(y)

with ``T_s = 1 + sum_k c_k y**(-(d+1)k)`` computed exactly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .family import FamilyConfig, generate_polynomial
from .reports import CheckReport
from .weyl import XPolynomial


class ContourError(ValueError):
    pass


class NonConvergence(RuntimeError):
    pass


def _require_gould_hopper(cfg: FamilyConfig) -> None:
    if not cfg.is_gould_hopper():
        raise ValueError("second-kind functions are defined for q(d) = -d**(d+1)/(d+1) only")
    if cfg.d < 2:
        raise ValueError("the two rays coincide for d = 1; need d >= 2")


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class ContourSpec:
    """Two-ray contour joined at ``offset`` on the positive real axis."""

    d: int
    offset: float = 0.5
    radius_cap: float | None = None
    node_count: int = 4
    tol: float = 1e-10

    @property
    def ray_angles(self) -> tuple[float, float]:
        a = 2 * math.pi / (self.d + 1)
        return (a, -a)


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error: float
    radius: float
    panels: int

    def __complex__(self):
        return self.value


def _is_polynomial_exponent(e: complex) -> bool:
    """True when z**e is a polynomial, so z = 0 is harmless."""
    return e.imag == 0 and float(e.real).is_integer() and e.real >= 0


def _log_abs(z: complex, e: complex, x: complex, d: int) -> float:
    """log |z**e exp(-z**(d+1)/(d+1) + x z)|."""
    expo = -(z ** (d + 1)) / (d + 1) + x * z
    return expo.real + (e * cmath.log(z)).real


def _log_size(z: complex, s: complex, x: complex, d: int) -> float:
    return _log_abs(z, -(s + 1), x, d)


def _radius(spec: ContourSpec, s: complex, x: complex) -> float:
    if spec.radius_cap is not None:
        return spec.radius_cap
    target = math.log(spec.tol) - 25.0
    R = 1.0
    while True:
        worst = max(
            _log_size(spec.offset + R * cmath.exp(1j * a), s, x, spec.d) for a in spec.ray_angles
        )
        if worst < target and R ** (spec.d + 1) / (spec.d + 1) > abs(x) * R + 1:
            return R
        R += 0.25


_GAUSS = {n: np.polynomial.legendre.leggauss(n) for n in (40, 80)}


def contour_integrals(
    cfg: FamilyConfig,
    s: complex,
    x: complex,
    powers,
    quad: ContourSpec | None = None,
) -> list[QuadratureResult]:
    """``int_C z**p z**(-s-1) exp(-z**(d+1)/(d+1) + x z) dz`` for each ``p`` in ``powers``.

    All integrals share the nodes, so the exponential is evaluated once.
    Each panel uses 40- and 80-point Gauss-Legendre rules; their difference
    plus a rounding allowance is the reported error.
    """
    _require_gould_hopper(cfg)
    d = cfg.d
    quad = quad or ContourSpec(d)
    if quad.d != d:
        raise ValueError("contour built for a different d")
    if quad.offset < 0:
        raise ContourError("offset must lie on the non-negative real axis")
    s, x = complex(s), complex(x)
    powers = list(powers)
    exps = [p - s - 1 for p in powers]
    if quad.offset == 0 and not all(_is_polynomial_exponent(e) for e in exps):
        raise ContourError("contour passes through z = 0 while the integrand is singular there")
    R = _radius(quad, s, x)
    # beyond R the integrand decays monotonically; its size at the ray ends
    # times a decay-length factor bounds each tail
    tail = np.array([
        sum(math.exp(min(_log_abs(quad.offset + R * cmath.exp(1j * a), e, x, d), 700.0)) for a in quad.ray_angles)
        for e in exps
    ]) * (d + 1)
    panels = quad.node_count
    while True:
        totals, errors = _panel_sums(d, x, exps, quad, R, panels)
        errors = errors + tail
        scale = np.maximum(1.0, np.abs(totals))
        if np.all(np.isfinite(errors)) and np.all(errors <= quad.tol * scale):
            break
        if panels >= 64 * quad.node_count:
            worst = float(np.max(errors / scale))
            raise NonConvergence(f"quadrature error estimate {worst:.3e} misses tolerance {quad.tol:.1e}")
        panels *= 2
    return [QuadratureResult(complex(v), float(e), R, panels) for v, e in zip(totals, errors)]


def _panel_sums(d: int, x: complex, exps, quad: ContourSpec, R: float, panels: int):
    edges = np.linspace(0.0, R, panels + 1)
    mid = (edges[1:] + edges[:-1]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    eps = np.finfo(float).eps
    totals = np.zeros(len(exps), dtype=complex)
    errors = np.zeros(len(exps))
    for angle, sign in ((quad.ray_angles[0], 1), (quad.ray_angles[1], -1)):
        direction = cmath.exp(1j * angle)
        estimates = []
        for nodes, weights in _GAUSS.values():
            t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
            w = (half[:, None] * weights[None, :]).ravel()
            z = quad.offset + t * direction
            base = np.exp(-(z ** (d + 1)) / (d + 1) + x * z) * w * direction
            # integer exponents use exact powers; others the principal branch
            rows = np.array([base * (z ** int(e.real) if _is_polynomial_exponent(e) else z**e) for e in exps])
            estimates.append((rows.sum(axis=1), np.abs(rows).sum(axis=1)))
        (coarse, _), (fine, mass) = estimates
        totals += sign * fine
        errors += np.abs(fine - coarse) + 4 * eps * mass
    return totals, errors


def eval_nu(
    cfg: FamilyConfig,
    s: complex,
    x: complex,
    quad: ContourSpec | None = None,
    z_power: int = 0,
) -> QuadratureResult:
    """Quadrature of ``int_C z**z_power z**(-s-1) exp(-z**(d+1)/(d+1) + x z) dz``.

    ``z_power = k`` gives ``d**k/dx**k nu(s, x)`` by differentiating under
    the integral sign.
    """
    return contour_integrals(cfg, s, x, [z_power], quad)[0]


def residual_checks(
    cfg: FamilyConfig,
    s: complex,
    x: complex,
    quad: ContourSpec | None = None,
    rel_tol: float = 1e-8,
) -> CheckReport:
    """Numeric residuals of the ODE, the recurrence and the lowering identity.

    Each residual is compared with ``rel_tol`` times the sum of the absolute
    values of its terms.
    """
    d = cfg.d
    report = CheckReport("second-kind residuals", details={"d": d, "s": complex(s), "x": complex(x)})
    # x-derivatives share one set of nodes; shifted s values are separate quadratures
    nu_s, dnu, dnu_top = contour_integrals(cfg, s, x, [0, 1, d + 1], quad)
    nu_up = eval_nu(cfg, s + 1, x, quad)
    nu_down = eval_nu(cfg, s - d, x, quad)
    nu_minus = eval_nu(cfg, s - 1, x, quad)
    terms = {
        "ode": [(-1, dnu_top), (x, dnu), (-s, nu_s)],
        "recurrence": [(x, nu_s), (-(s + 1), nu_up), (-1, nu_down)],
        "lowering": [(1, dnu), (-1, nu_minus)],
    }
    for name, parts in terms.items():
        residual = abs(sum(c * r.value for c, r in parts))
        scale = sum(abs(c * r.value) for c, r in parts)
        # a residual cannot be resolved below the quadrature error of its terms
        noise = sum(abs(c) * r.error for c, r in parts)
        report.details[name] = {"residual": residual, "scale": scale, "quadrature_error": noise}
        report.tick()
        if residual > rel_tol * scale + noise:
            report.fail(identity=name, residual=residual, scale=scale, quadrature_error=noise)
    return report


# ---------------------------------------------------------------------------
# exact residues


def residue_polynomial(cfg: FamilyConfig, n: int) -> XPolynomial:
    """``n!`` times the coefficient of ``z**n`` in ``exp(q(z) + x z)``.

    Exact truncated power-series product in ``z`` with coefficients in Q[x].
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    # exp(x z): coefficient of z**a is x**a / a!
    exz = [XPolynomial({a: Fraction(1, factorial(a))}) for a in range(n + 1)]
    # exp(q(z)) up to z**n, by the series of exp applied to q
    q = cfg.symbol
    eq = [Fraction(0)] * (n + 1)
    eq[0] = Fraction(1)
    power = [Fraction(1)] + [Fraction(0)] * n
    j = 0
    while True:
        j += 1
        new = [Fraction(0)] * (n + 1)
        for i, c in enumerate(power):
            if not c:
                continue
            for k, a in q.coeffs.items():
                if i + k <= n:
                    new[i + k] += c * a
        power = new
        if not any(power):
            break
        for i in range(n + 1):
            eq[i] += power[i] / factorial(j)
    total = XPolynomial()
    for b in range(n + 1):
        if eq[b]:
            total = total + exz[n - b] * eq[b]
    return total * factorial(n)


def polynomial_residue_check(cfg: FamilyConfig, n: int) -> CheckReport:
    report = CheckReport("residue representation", details={"d": cfg.d, "n": n})
    res = residue_polynomial(cfg, n)
    P = generate_polynomial(cfg, n)
    report.tick()
    report.details["polynomial"] = res.dense()
    if res != P:
        report.fail(n=n, residue=res.dense(), expected=P.dense())
    return report


# ---------------------------------------------------------------------------
# formal expansions


@dataclass(frozen=True)
class AsymptoticExpansion:
    """``exp(exponent_coeff y**(d+1)) y**power_shift (1 + sum tail[e] y**e)``.

    ``tail`` maps non-positive exponents of ``y`` to exact coefficients and is
    reliable for exponents ``>= -(d+1) * order``.
    """

    d: int
    s: Fraction
    order: int
    tail: dict[int, Fraction] = field(hash=False)

    @property
    def exponent_coeff(self) -> Fraction:
        return Fraction(self.d, self.d + 1)

    @property
    def power_shift(self) -> Fraction:
        return -self.s - Fraction(self.d + 1, 2)

    def coefficient(self, k: int) -> Fraction:
        """Coefficient of ``y**(-(d+1)k)``."""
        return self.tail.get(-(self.d + 1) * k, Fraction(0))

    def lattice_violations(self) -> list[int]:
        N = self.d + 1
        return [e for e, c in self.tail.items() if c and (e > 0 or e % N)]


def _binomial_series(alpha: Fraction, n: int) -> list[Fraction]:
    """Coefficients of (1 + w)**alpha up to w**n."""
    out = [Fraction(1)]
    for k in range(1, n + 1):
        out.append(out[-1] * (alpha - k + 1) / k)
    return out


def _mul_trunc(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * (n + 1)
    for i, u in enumerate(a):
        if not u:
            continue
        for j, v in enumerate(b[: n + 1 - i]):
            if v:
                out[i + j] += u * v
    return out


def _double_factorial_odd(m: int) -> int:
    """(2m - 1)!! with (-1)!! = 1."""
    out = 1
    for k in range(1, 2 * m, 2):
        out *= k
    return out


def saddle_tail(d: int, s, order: int) -> dict[int, Fraction]:
    """Tail coefficients from the formal Laplace expansion at ``z = y``.

    With ``z = y (1 + w)`` and ``Lam = y**(d+1)`` the integrand becomes
    ``y**(-s) (1+w)**(-s-1) exp(d/(d+1) Lam - Lam g(w))`` where
    ``g(w) = d w**2/2 + r(w)``.  Expanding ``exp(-Lam r(w))`` and integrating
    against the Gaussian term by term gives the coefficient of ``Lam**-k``.
    """
    s = Fraction(s)
    W = 6 * order
    N = d + 1
    r = [Fraction(0)] * (W + 1)
    for k in range(3, N + 1):
        if k <= W:
            r[k] = Fraction(comb(N, k), N)
    h = _binomial_series(-s - 1, W)
    tail: dict[int, Fraction] = {}
    # term_a = h * (-r)**a / a!
    term = h
    terms = [term]
    neg_r = [-c for c in r]
    for a in range(1, 2 * order + 1):
        term = [c / a for c in _mul_trunc(term, neg_r, W)]
        terms.append(term)
    for k in range(order + 1):
        total = Fraction(0)
        for a in range(0, 2 * k + 1):
            m = a + k
            if 2 * m <= W:
                total += terms[a][2 * m] * Fraction(_double_factorial_odd(m), d**m)
        if total:
            tail[-N * k] = total
    return tail


def _lower_tail(d: int, power: Fraction, tail: dict[int, Fraction]) -> dict[int, Fraction]:
    """Tail of ``d/dx`` applied to ``exp(.) y**power * tail``; the new power is ``power + 1``.

    ``d/dx = y**(1-d)/d * d/dy`` and the exponential contributes ``y``:
    ``T -> T + y**(-(d+1)) (power T + y T') / d``.
    """
    N = d + 1
    out = dict(tail)
    for e, c in tail.items():
        key = e - N
        out[key] = out.get(key, 0) + c * (power + e) / d
    return {e: c for e, c in out.items() if c}


def ode_tail(d: int, s, order: int) -> dict[int, Fraction]:
    """Tail coefficients from the ODE ``-nu^(d+1) + x nu' - s nu = 0`` alone.

    The unknown coefficients enter triangularly: the equation at level
    ``k+1`` fixes ``c_k`` with pivot ``(d+1) k``.
    """
    s = Fraction(s)
    N = d + 1
    p = -s - Fraction(N, 2)

    def residual(tail):
        # -D^(d+1) T + D T - s y^-N T, all aligned at power p + d + 1
        cur = tail
        first = None
        for j in range(N):
            cur = _lower_tail(d, p + j, cur)
            if j == 0:
                first = cur
        res = {e: -c for e, c in cur.items()}
        for e, c in first.items():
            res[e] = res.get(e, 0) + c
        for e, c in tail.items():
            res[e - N] = res.get(e - N, 0) - s * c
        return res

    tail = {0: Fraction(1)}
    for k in range(1, order + 1):
        res = residual(tail)
        value = res.get(-N * (k + 1), Fraction(0))
        tail[-N * k] = -value / (N * k)
    return {e: c for e, c in tail.items() if c}


def asymptotic_expansion(cfg: FamilyConfig, s, order: int, method: str = "saddle") -> AsymptoticExpansion:
    _require_gould_hopper(cfg)
    if order < 0:
        raise ValueError("order must be non-negative")
    if method == "saddle":
        tail = saddle_tail(cfg.d, s, order)
    elif method == "ode":
        tail = ode_tail(cfg.d, s, order)
    else:
        raise ValueError(f"unknown method {method!r}")
    return AsymptoticExpansion(cfg.d, Fraction(s), order, tail)


def _truncate(tail: dict[int, Fraction], d: int, order: int) -> dict[int, Fraction]:
    floor = -(d + 1) * order
    return {e: c for e, c in tail.items() if e >= floor and c}


def propagate_expansion(e: AsymptoticExpansion, relation: str) -> AsymptoticExpansion:
    """Expansion for ``s - 1`` (``"lowering"``) or ``s + 1`` (``"raising"``)."""
    d, N = e.d, e.d + 1
    if relation == "lowering":
        tail = _lower_tail(d, e.power_shift, e.tail)
        return AsymptoticExpansion(d, e.s - 1, e.order, _truncate(tail, d, e.order))
    if relation == "raising":
        if e.s + 1 == 0:
            raise ZeroDivisionError("raising from s = -1 divides by s + 1 = 0")
        if e.order < 1:
            raise ValueError("raising consumes one order of the tail")
        low = e.tail
        power = e.power_shift
        for _ in range(d):
            low = _lower_tail(d, power, low)
            power += 1
        diff = dict(e.tail)
        for k, c in low.items():
            diff[k] = diff.get(k, 0) - c
        diff = _truncate(diff, d, e.order)
        if diff.get(0):
            raise ArithmeticError("leading terms failed to cancel in the raising step")
        tail = {k + N: c / (e.s + 1) for k, c in diff.items() if c}
        return AsymptoticExpansion(d, e.s + 1, e.order - 1, tail)
    raise ValueError(f"unknown relation {relation!r}")
