"""Bosonic Virasoro operators for the d-reduced hierarchy.

Operators are normal-ordered polynomials in ``t_k`` (creation, written to
the left) and ``d_k = d/dt_k`` (annihilation) with exact coefficients,
stored as ``{(creation exponents, annihilation exponents): coeff}``; the
exponent tuples are sparse ``((k, power), ...)`` sorted by ``k``.

With currents ``J_-n = n t_n``, ``J_n = d_n`` (n > 0) and ``J_0 = c``,
``c = m + 1``, the resolved modes are

    L_k = (1/d) [ 1/2 sum_(i+j=dk) :J_i J_j: ]
          + (k+1)/2 * c * J_(dk)
          + [k = 0] ((d**2 - 1)/(24 d) + m(m+1)/2)

followed by the dilaton shift ``t_(d+1) -> t_(d+1) - d/(d+1)``.  The
choices are recorded in ``VirasoroFamily.convention_log``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .family import FamilyConfig
from .reports import CheckReport
from .series import TauSeries, weight

Sparse = tuple[tuple[int, int], ...]
Key = tuple[Sparse, Sparse]


class CapTooSmall(ValueError):
    pass


def _sparse(powers: dict[int, int]) -> Sparse:
    return tuple(sorted((k, e) for k, e in powers.items() if e))


def _dense(s: Sparse) -> dict[int, int]:
    return dict(s)


def _order(s: Sparse) -> int:
    return sum(e for _, e in s)


class BosonicOperator:
    """Normal-ordered differential operator in the times."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Key, object] | None = None):
        data: dict[Key, Fraction] = defaultdict(Fraction)
        for key, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                data[key] += c
        self.terms = {k: v for k, v in data.items() if v}

    # building blocks ---------------------------------------------------
    @classmethod
    def scalar(cls, c) -> "BosonicOperator":
        return cls({((), ()): c})

    @classmethod
    def t(cls, k: int, c=1) -> "BosonicOperator":
        return cls({(((k, 1),), ()): c})

    @classmethod
    def dt(cls, k: int, c=1) -> "BosonicOperator":
        return cls({((), ((k, 1),)): c})

    @classmethod
    def current(cls, n: int, charge=0) -> "BosonicOperator":
        """``J_n``: ``d_n`` for n > 0, ``|n| t_|n|`` for n < 0, ``charge`` for n = 0."""
        if n > 0:
            return cls.dt(n)
        if n < 0:
            return cls.t(-n, -n)
        return cls.scalar(charge)

    # spec-style views ----------------------------------------------------
    def _view(self, n_create: int, n_annihilate: int) -> dict:
        out = {}
        for (cr, an), c in self.terms.items():
            if _order(cr) == n_create and _order(an) == n_annihilate:
                idx = tuple(k for k, e in cr for _ in range(e)) + tuple(k for k, e in an for _ in range(e))
                out[idx if len(idx) > 1 else idx[0] if idx else ()] = c
        return out

    @property
    def quadratic_creation(self) -> dict:
        return self._view(2, 0)

    @property
    def mixed(self) -> dict:
        return self._view(1, 1)

    @property
    def quadratic_annihilation(self) -> dict:
        return self._view(0, 2)

    @property
    def linear(self) -> dict:
        return self._view(0, 1)

    @property
    def linear_creation(self) -> dict:
        return self._view(1, 0)

    @property
    def constant(self) -> Fraction:
        return self.terms.get(((), ()), Fraction(0))

    def max_order(self) -> int:
        return max((_order(a) + _order(b) for a, b in self.terms), default=0)

    def max_index(self) -> int:
        return max((k for a, b in self.terms for k, _ in a + b), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(key == ((), ()) for key in self.terms)

    # arithmetic --------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, BosonicOperator):
            other = BosonicOperator.scalar(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BosonicOperator(out)

    __radd__ = __add__

    def __neg__(self):
        return BosonicOperator({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, BosonicOperator):
            return _compose(self, other)
        return BosonicOperator({k: c * other for k, c in self.terms.items()})

    def __rmul__(self, other):
        return BosonicOperator({k: c * other for k, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, BosonicOperator) and self.terms == other.terms

    def __repr__(self):
        parts = []
        for (cr, an), c in sorted(self.terms.items()):
            s = "".join(f"t{k}" + (f"^{e}" if e > 1 else "") for k, e in cr)
            s += "".join(f"d{k}" + (f"^{e}" if e > 1 else "") for k, e in an)
            parts.append(f"{c}{'*' + s if s else ''}")
        return "BosonicOperator(" + (" + ".join(parts) or "0") + ")"

    def to_dict(self) -> dict:
        from .reports import rat

        return {
            "terms": [
                {"t": [list(p) for p in cr], "d": [list(p) for p in an], "coeff": rat(c)}
                for (cr, an), c in sorted(self.terms.items())
            ]
        }


def _compose(A: BosonicOperator, B: BosonicOperator) -> BosonicOperator:
    """Normal-ordered product: ``d**b t**g = sum_k k! C(b,k) C(g,k) t**(g-k) d**(b-k)`` per index."""
    out: dict[Key, Fraction] = defaultdict(Fraction)
    for (a_cr, a_an), u in A.terms.items():
        for (b_cr, b_an), v in B.terms.items():
            ann = _dense(a_an)
            cre = _dense(b_cr)
            shared = sorted(set(ann) & set(cre))
            # distribute contractions index by index
            partial = [({}, {}, Fraction(1))]
            for k in shared:
                nxt = []
                for cr_left, an_left, w in partial:
                    for j in range(min(ann[k], cre[k]) + 1):
                        c2 = dict(cr_left)
                        a2 = dict(an_left)
                        c2[k] = cre[k] - j
                        a2[k] = ann[k] - j
                        nxt.append((c2, a2, w * factorial(j) * comb(ann[k], j) * comb(cre[k], j)))
                partial = nxt
            for cr_left, an_left, w in partial:
                creation = defaultdict(int, _dense(a_cr))
                for k, e in cre.items():
                    creation[k] += cr_left.get(k, e) if k in shared else e
                annihilation = defaultdict(int, _dense(b_an))
                for k, e in ann.items():
                    annihilation[k] += an_left.get(k, e) if k in shared else e
                out[(_sparse(creation), _sparse(annihilation))] += u * v * w
    return BosonicOperator(out)


def commutator(A: BosonicOperator, B: BosonicOperator) -> BosonicOperator:
    return A * B - B * A


def apply_operator(L: BosonicOperator, f: TauSeries) -> TauSeries:
    """Exact action on a truncated series.

    Raises :class:`CapTooSmall` if a term would need a variable beyond the
    series' cap.  Weights above ``f.D`` are dropped, as in ``TauSeries``.
    """
    if L.max_index() > f.K:
        needed = [k for (a, b) in L.terms for k, _ in a if k > f.K]
        if needed:
            raise CapTooSmall(f"operator creates t_{max(needed)} beyond variable cap {f.K}")
    out = TauSeries(f.K, f.D)
    for (cr, an), c in L.terms.items():
        g = f
        for k, e in an:
            for _ in range(e):
                g = g.derivative(k) if k <= f.K else TauSeries(f.K, f.D)
        if g.is_zero():
            continue
        for k, e in cr:
            for _ in range(e):
                g = g.times_variable(k)
        out = out + g * c
    return out


# ---------------------------------------------------------------------------
# the family


LOG_RESOLVED = (
    "times: J_-n = n t_n, J_n = d/dt_n, J_0 = c = m+1 (charge of W_m; W_-1 has c = 0)",
    "Schur expansion uses power sums p_k = k t_k",
    "L_k = (1/d)*(1/2)*sum_{i+j=dk} :J_i J_j: + (k+1)/2*c*J_{dk}; the last term is the "
    "half-symmetrized charge term and closes under commutators",
    "L_-1 sum starts at j = d+1 (no d/dt_0); its quadratic part is +(1/2d) sum_{j=1}^{d-1} j(d-j) t_j t_{d-j}",
    "L_0 is the Euler operator (1/d) sum_j j t_j d/dt_j, not the weight-raising printed form",
    "L_1 quadratic part is +(1/2d) sum_{j=1}^{d-1} d_j d_{d-j} (plus sign needed for closure)",
    "L_2 carries no separate d_{t_d}^2; its charge part is (3/2)c J_{2d} on top of the Sugawara c/d J_{2d}",
    "dilaton shift t_{d+1} -> t_{d+1} - d/(d+1), i.e. -d/dt_{(k+1)d+1} in mode k",
    "L_0 constant = (d^2-1)/(24d) [twisted vacuum] + (d+1)c^2/(2d) [charge] + m(m+1)/2 [regularization]",
    "Kontsevich dictionary (d=2): multiply the weight-w coefficient of log tau by 2^(w/3), "
    "then T_{2k+1} = t^KdV_k/(2k+1)!!",
)

LOG_LITERAL = (
    "literal transcription of the printed operators, without charge terms or dilaton shift",
    "L_0 = (1/d) sum_j j t_{j+d} d/dt_j (weight raising)",
    "L_1 quadratic part is -(1/2d) sum d_j d_{d-j}",
    "L_2 includes an extra (1/d) d_{t_d}^2",
)


def kdv_free_energy(tau: TauSeries) -> dict[tuple[tuple[int, int], ...], Fraction]:
    """``log tau`` of the d = 2, m = -1 plane rewritten in KdV times.

    Applies the dictionary recorded last in ``LOG_RESOLVED``.  Keys are
    sorted ``((k, power), ...)`` over ``t^KdV_k``.
    """
    out = {}
    for mono, c in tau.log().sorted_terms():
        w = weight(mono)
        if w % 3:
            raise ValueError(f"weight {w} term in log tau; expected weights divisible by 3")
        key = []
        scale = Fraction(2) ** (w // 3)
        for i, e in enumerate(mono):
            if not e:
                continue
            if i % 2:
                raise ValueError(f"log tau depends on the even time t_{i + 1}")
            k = i // 2
            dfact = 1
            for j in range(1, 2 * k + 2, 2):
                dfact *= j
            scale /= Fraction(dfact) ** e
            key.append((k, e))
        out[tuple(key)] = c * scale
    return out


@dataclass
class VirasoroFamily:
    d: int
    m_charge: int
    K: int
    operators: dict[int, BosonicOperator]
    convention: str = "resolved"
    convention_log: tuple[str, ...] = field(default=())

    @property
    def charge(self) -> int:
        return self.m_charge + 1

    def mode(self, k: int) -> BosonicOperator:
        """``L_k``; modes beyond 2 come from ``[L_(k-1), L_1] = (k-2) L_k``."""
        if k not in self.operators:
            if k < -1:
                raise ValueError("only modes k >= -1 are available")
            prev = self.mode(k - 1)
            self.operators[k] = commutator(prev, self.mode(1)) * Fraction(1, k - 2)
        return self.operators[k]

    def eigenvalue(self) -> Fraction:
        return Fraction(self.m_charge * (self.m_charge + 1), 2)


def _sugawara(d: int, k: int, K: int, charge) -> BosonicOperator:
    """``(1/d) * (1/2) sum_(i+j=dk) :J_i J_j:`` restricted to indices <= K."""
    op = BosonicOperator()
    n = d * k
    for i in range(-K, K + 1):
        j = n - i
        if abs(j) > K or i > j:
            continue
        Ji = BosonicOperator.current(i, charge)
        Jj = BosonicOperator.current(j, charge)
        # normal order: creation (negative index) first
        a, b = (Ji, Jj) if i <= j else (Jj, Ji)
        term = a * b
        op = op + (term if i == j else term * 2)
    return op * Fraction(1, 2 * d)


def _dilaton(op: BosonicOperator, d: int) -> BosonicOperator:
    """Substitute ``t_(d+1) -> t_(d+1) + delta`` with ``delta = -d/(d+1)``."""
    delta = Fraction(-d, d + 1)
    out: dict[Key, Fraction] = defaultdict(Fraction)
    for (cr, an), c in op.terms.items():
        cre = _dense(cr)
        e = cre.pop(d + 1, 0)
        for j in range(e + 1):
            new = dict(cre)
            if e - j:
                new[d + 1] = e - j
            out[(_sparse(new), an)] += c * comb(e, j) * delta**j
    return BosonicOperator(out)


def _resolved_mode(d: int, m: int, k: int, K: int) -> BosonicOperator:
    c = m + 1
    op = _sugawara(d, k, K, c)
    if abs(d * k) <= K:
        op = op + BosonicOperator.current(d * k, c) * (Fraction(k + 1, 2) * c)
    if k == 0:
        op = op + Fraction(d * d - 1, 24 * d) + Fraction(m * (m + 1), 2)
    return _dilaton(op, d)


def _literal_mode(d: int, k: int, K: int) -> BosonicOperator:
    op = BosonicOperator()
    if k == -1:
        for j in range(d + 1, K + 1):
            op = op + BosonicOperator.t(j, j) * BosonicOperator.dt(j - d)
        for j in range(1, d):
            op = op + BosonicOperator.t(j) * BosonicOperator.t(d - j) * Fraction(j * (d - j), 2)
    elif k == 0:
        for j in range(1, K - d + 1):
            op = op + BosonicOperator.t(j + d, j) * BosonicOperator.dt(j)
    elif k == 1:
        for j in range(1, K - d + 1):
            op = op + BosonicOperator.t(j, j) * BosonicOperator.dt(j + d)
        for j in range(1, d):
            op = op - BosonicOperator.dt(j) * BosonicOperator.dt(d - j) * Fraction(1, 2)
    elif k == 2:
        for j in range(1, K - 2 * d + 1):
            op = op + BosonicOperator.t(j, j) * BosonicOperator.dt(j + 2 * d)
        for j in range(1, 2 * d):
            op = op + BosonicOperator.dt(j) * BosonicOperator.dt(2 * d - j) * Fraction(1, 2)
        op = op + BosonicOperator.dt(d) * BosonicOperator.dt(d)
    return op * Fraction(1, d)


def build_virasoro(cfg: FamilyConfig | int, m_charge: int, K: int, convention: str = "resolved") -> VirasoroFamily:
    d = cfg.d if isinstance(cfg, FamilyConfig) else int(cfg)
    if d < 1:
        raise ValueError("d must be positive")
    if K < 3 * d:
        raise CapTooSmall(f"variable cap K = {K} must be at least 3d = {3 * d}")
    if convention == "resolved":
        ops = {k: _resolved_mode(d, m_charge, k, K) for k in (-1, 0, 1, 2)}
        log = LOG_RESOLVED
    elif convention == "literal":
        ops = {k: _literal_mode(d, k, K) for k in (-1, 0, 1, 2)}
        log = LOG_LITERAL
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return VirasoroFamily(d, m_charge, K, ops, convention, log)


# ---------------------------------------------------------------------------
# checks


def _monomials(K: int, D: int):
    """All monomials in t_1..t_K of weight <= D, as sparse power dicts."""

    def rec(k, budget):
        if k > K:
            yield {}
            return
        for e in range(budget // k + 1):
            for rest in rec(k + 1, budget - e * k):
                out = dict(rest)
                if e:
                    out[k] = e
                yield out

    yield from rec(1, D)


def _restrict(op: BosonicOperator, K: int) -> BosonicOperator:
    return BosonicOperator({key: c for key, c in op.terms.items() if all(i <= K for i, _ in key[0] + key[1])})


def check_commutation(fam: VirasoroFamily, k_max: int = 2, D: int = 6) -> CheckReport:
    """``[L_a, L_b] = (a - b) L_(a+b) + central`` for ``-1 <= a < b``, ``a + b <= k_max``.

    Computed in the operator algebra, then confirmed on every monomial of
    weight ``<= D``; the scalar remainders are logged as central terms.
    """
    report = CheckReport(
        "virasoro commutators",
        details={"d": fam.d, "m": fam.m_charge, "convention": fam.convention, "D": D, "central": {}},
    )
    # modes are truncated at the variable cap; commute wider copies and
    # compare only terms whose indices stay within the cap
    wide = build_virasoro(fam.d, fam.m_charge, fam.K + fam.d * (k_max + 3), fam.convention)
    K_eval = D + fam.d * (k_max + 2) + 2
    D_eval = K_eval
    basis = [TauSeries.from_exponents(K_eval, D_eval, [(mono, 1)]) for mono in _monomials(K_eval, D)]
    # no intermediate weight exceeds D + d <= K_eval, so this cap is exact on the basis
    local = build_virasoro(fam.d, fam.m_charge, K_eval, fam.convention)
    for a in range(-1, k_max + 1):
        for b in range(a + 1, k_max + 2):
            if a + b > k_max or b > max(k_max, 2):
                continue
            La, Lb = local.mode(a), local.mode(b)
            target = local.mode(a + b) * (a - b)
            diff = _restrict(commutator(wide.mode(a), wide.mode(b)) - wide.mode(a + b) * (a - b), fam.K)
            central = diff.constant
            name = f"[L{a},L{b}]"
            report.details["central"][name] = central
            rest = diff - central
            report.tick()
            if not rest.is_zero():
                report.fail(relation=name, kind="operator", residual=rest.to_dict())
            for f in basis:
                lhs = apply_operator(La, apply_operator(Lb, f)) - apply_operator(Lb, apply_operator(La, f))
                rhs = apply_operator(target, f) + f * central
                report.tick()
                res = lhs - rhs
                if not res.is_zero():
                    report.fail(relation=name, kind="monomial", monomial=f.to_dict()["terms"][0]["monomial"],
                                residual=res.to_dict()["terms"])
                    break
    return report


def _mode_loss(fam: VirasoroFamily, k: int) -> int:
    """Largest weight decrease of ``L_k``; residual weights above ``D - loss`` are unreliable."""
    loss = 0
    for (cr, an), _ in fam.mode(k).terms.items():
        drop = sum(i * e for i, e in an) - sum(i * e for i, e in cr)
        loss = max(loss, drop)
    return loss


def check_constraints(tau: TauSeries, fam: VirasoroFamily, k_max: int = 2) -> CheckReport:
    """``L_-1 tau = 0``, ``L_0 tau = m(m+1)/2 tau``, ``L_j tau = 0`` for ``1 <= j <= k_max``.

    Each residual is compared on the weights not affected by truncation of
    ``tau`` and reported coefficient by coefficient.
    """
    report = CheckReport(
        "virasoro constraints",
        details={"d": fam.d, "m": fam.m_charge, "convention": fam.convention, "D": tau.D, "checked_up_to": {}},
    )
    # modes of fam may be cut at its cap; the weight loss needs the full modes
    full = build_virasoro(fam.d, fam.m_charge, max(fam.K, tau.K) + fam.d * (k_max + 2) + 2, fam.convention)
    for k in range(-1, k_max + 1):
        L = full.mode(k)
        if L.max_index() > tau.K:
            # terms that create beyond the cap cannot be evaluated; truncate them away
            L = BosonicOperator({key: c for key, c in L.terms.items() if all(i <= tau.K for i, _ in key[0])})
        top = tau.D - _mode_loss(full, k)
        report.details["checked_up_to"][f"L{k}"] = top
        if top < 0:
            continue
        res = apply_operator(L, tau)
        if k == 0:
            res = res - tau * fam.eigenvalue()
        res = res.truncate(top) if top <= res.D else res
        report.tick()
        if not res.is_zero():
            for mono, c in res.sorted_terms():
                report.fail(mode=k, monomial=[[i + 1, e] for i, e in enumerate(mono) if e], residual=c,
                            weight=weight(mono))
    return report
