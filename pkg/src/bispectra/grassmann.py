"""Planes in the Sato Grassmannian built from the second-kind expansions.

Conventions.  A vector is a Laurent series in ``y`` with finitely many
positive powers, ``w = y**e + (lower powers)``, known down to a floor
exponent.  A plane of charge ``m`` has basis vectors with leading
exponents ``e_i = -m - 1 + i`` (``i = 0, 1, ...``), so charge -1 is the
plane projecting onto ``C[y]``.  For the family planes the ``i``-th vector
is the stripped expansion of ``nu(m - i)``:

    nu(s, y**d) = Phi(y) * y**(-s-1) * T_s(y),
    Phi(y) = exp(d/(d+1) y**(d+1)) * y**((1-d)/2)   (common to all s)

and ``W_m`` contains ``W_(m-1)``.  The tau function is
``sum_lam pi_lam s_lam(t)`` where ``pi_lam`` is the minor taken on the
rows ``e_i - lam_(i+1)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .family import FamilyConfig
from .reports import CheckReport
from .schur import Partition, partitions_up_to, schur
from .second_kind import saddle_tail
from .series import TauSeries


class DepthExceeded(ValueError):
    pass


class DegenerateBasis(ValueError):
    pass


@dataclass(frozen=True)
class FormalLaurentVector:
    leading_exponent: int
    coeffs: dict[int, Fraction] = field(hash=False)
    floor: int

    def __post_init__(self):
        clean = {}
        for e, c in self.coeffs.items():
            c = Fraction(c)
            if e > self.leading_exponent and c:
                raise ValueError("coefficient above the leading exponent")
            if c and e >= self.floor:
                clean[int(e)] = c
        object.__setattr__(self, "coeffs", clean)

    def __getitem__(self, e: int) -> Fraction:
        if e < self.floor:
            raise DepthExceeded(f"coefficient at y^{e} lies below truncation floor {self.floor}")
        return self.coeffs.get(e, Fraction(0))

    @property
    def lead(self) -> Fraction:
        return self.coeffs.get(self.leading_exponent, Fraction(0))

    def axpy(self, c, other: "FormalLaurentVector") -> "FormalLaurentVector":
        """``self + c * other`` on the common reliable range."""
        floor = max(self.floor, other.floor)
        out = dict(self.coeffs)
        for e, v in other.coeffs.items():
            out[e] = out.get(e, 0) + c * v
        lead = max([self.leading_exponent] + [e for e, v in out.items() if v])
        return FormalLaurentVector(lead, out, floor)

    def scale(self, c) -> "FormalLaurentVector":
        return FormalLaurentVector(
            self.leading_exponent, {e: v * c for e, v in self.coeffs.items()}, self.floor
        )

    def shift(self, k: int) -> "FormalLaurentVector":
        """Multiplication by ``y**k``."""
        return FormalLaurentVector(
            self.leading_exponent + k, {e + k: v for e, v in self.coeffs.items()}, self.floor + k
        )

    def dense(self) -> list[tuple[int, Fraction]]:
        return [(e, self.coeffs.get(e, Fraction(0))) for e in range(self.leading_exponent, self.floor - 1, -1)]


@dataclass(frozen=True)
class GrassmannPlane:
    m: int
    basis: tuple[FormalLaurentVector, ...]
    depth: int
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        for i, v in enumerate(self.basis):
            if v.leading_exponent != self.vacuum_exponent(i):
                raise DegenerateBasis(
                    f"basis vector {i} leads at y^{v.leading_exponent}, expected y^{self.vacuum_exponent(i)}"
                )
            if v.lead == 0:
                raise DegenerateBasis(f"basis vector {i} has zero leading coefficient")

    def vacuum_exponent(self, i: int) -> int:
        return -self.m - 1 + i

    @property
    def rank(self) -> int:
        """Number of stored basis vectors."""
        return len(self.basis)


# ---------------------------------------------------------------------------
# construction


def _family_vector(d: int, s: int, depth: int) -> FormalLaurentVector:
    order = -(-depth // (d + 1))
    tail = saddle_tail(d, s, order)
    lead = -s - 1
    return FormalLaurentVector(lead, {lead + e: c for e, c in tail.items()}, lead - depth)


def plane_from_family(cfg: FamilyConfig, m: int, depth: int, rank: int | None = None) -> GrassmannPlane:
    """``W_m = span(nu(m), nu(m-1), ...)`` in stripped form.

    ``rank`` vectors are stored (default ``depth + d``, enough for Plücker
    minors of weight ``<= depth`` and for the reduction check).
    """
    if not cfg.is_gould_hopper() or cfg.d < 2:
        raise ValueError("planes are built for the Gould-Hopper family with d >= 2")
    if depth < 0:
        raise DepthExceeded("depth must be non-negative")
    rank = depth + cfg.d if rank is None else rank
    basis = tuple(_family_vector(cfg.d, m - i, depth) for i in range(rank))
    return GrassmannPlane(m, basis, depth)


def trivial_plane(m: int, depth: int, rank: int | None = None) -> GrassmannPlane:
    rank = depth + 1 if rank is None else rank
    basis = tuple(
        FormalLaurentVector(-m - 1 + i, {-m - 1 + i: 1}, -m - 1 + i - depth) for i in range(rank)
    )
    return GrassmannPlane(m, basis, depth, normalized=True)


def plane_from_vectors(m: int, vectors, depth: int, rank: int | None = None) -> GrassmannPlane:
    """Plane from explicit ``{exponent: coeff}`` vectors, padded with pure powers."""
    rank = max(len(vectors), depth + 1) if rank is None else rank
    basis = []
    for i in range(rank):
        e = -m - 1 + i
        coeffs = vectors[i] if i < len(vectors) else {e: 1}
        basis.append(FormalLaurentVector(e, coeffs, e - depth))
    return GrassmannPlane(m, tuple(basis), depth)


def normalize_plane(p: GrassmannPlane) -> GrassmannPlane:
    """Leading coefficients 1 and zeros at every other leading exponent."""
    exps = [p.vacuum_exponent(i) for i in range(p.rank)]
    if len(set(exps)) != len(exps):
        raise DegenerateBasis("leading exponents collide")
    out: list[FormalLaurentVector] = []
    for j, v in enumerate(p.basis):
        v = v.scale(1 / v.lead)
        for i in range(j):
            e = exps[i]
            if e < v.floor:
                continue
            c = v[e]
            if c:
                v = v.axpy(-c, out[i])
        out.append(v)
    return GrassmannPlane(p.m, tuple(out), p.depth, normalized=True)


# ---------------------------------------------------------------------------
# Plücker data


def _det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    a = [list(r) for r in rows]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] * inv
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


def _minor_matrix(p: GrassmannPlane, rows) -> list[list[Fraction]]:
    """Coefficient matrix on ``rows`` and the first ``len(rows)`` columns.

    Every term of the determinant has total depth ``sum(e_j - r)`` equal
    to the weight of the row set, and no factor has negative depth, so an
    entry deeper than that weight only meets zero factors; it is read as 0.
    """
    n = len(rows)
    budget = sum(p.vacuum_exponent(i) for i in range(n)) - sum(rows)
    out = []
    for r in rows:
        line = []
        for j in range(n):
            w = p.basis[j]
            if r > w.leading_exponent or w.leading_exponent - r > budget:
                line.append(Fraction(0))
            else:
                line.append(w[r])
        out.append(line)
    return out


def _require_normalized(p: GrassmannPlane) -> GrassmannPlane:
    return p if p.normalized else normalize_plane(p)


def plucker_coordinate(p: GrassmannPlane, lam) -> Fraction:
    """Minor on rows ``e_i - lam_(i+1)`` and the first ``len(lam)`` columns."""
    lam = Partition(lam)
    p = _require_normalized(p)
    ell = len(lam)
    if ell == 0:
        return Fraction(1)
    if ell > p.rank or lam.size > p.depth:
        raise DepthExceeded(f"|lambda| = {lam.size} exceeds the truncation of the plane")
    rows = [p.vacuum_exponent(i) - lam[i] for i in range(ell)]
    return _det(_minor_matrix(p, rows))


def tau_series(p: GrassmannPlane, D: int) -> TauSeries:
    """``sum_(|lam| <= D) pi_lam s_lam(t)`` with ``p_k = k t_k``."""
    p = _require_normalized(p)
    if D > p.depth or D > p.rank:
        raise DepthExceeded(f"degree {D} needs depth and rank >= {D}")
    K = max(D, 1)
    tau = TauSeries(K, D)
    for lam in partitions_up_to(D):
        pi = plucker_coordinate(p, lam)
        if pi:
            tau = tau + schur(lam, K, D) * pi
    return tau


def _ordered_minor(p: GrassmannPlane, rows: tuple[int, ...]) -> Fraction:
    return _det(_minor_matrix(p, rows))


def plucker_relations_check(p: GrassmannPlane, D: int, columns: int | None = None) -> CheckReport:
    """Three-term Grassmann-Plücker relations among minors of weight ``<= D``.

    For row sets ``T + {a, b, c, e}`` with ``a < b < c < e``:
    ``M(T,a,c) M(T,b,e) = M(T,a,b) M(T,c,e) + M(T,a,e) M(T,b,c)``,
    where ``M(T,x,y)`` is the ordered minor with rows ``T`` then ``x, y``.
    """
    p = _require_normalized(p)
    L = min(p.rank, D + 2) if columns is None else columns
    if L < 2:
        raise DepthExceeded("need at least two columns")
    report = CheckReport("plucker relations", details={"m": p.m, "D": D, "columns": L})
    vac = [p.vacuum_exponent(i) for i in range(L)]
    low = vac[0] - D
    top = vac[-1]
    vac_sum = sum(vac)
    cache: dict[tuple[int, ...], Fraction] = {}

    def minor(rows):
        key = tuple(rows)
        if key not in cache:
            cache[key] = _ordered_minor(p, key)
        return cache[key]

    # T ranges over (L-2)-subsets obtained from weight <= D row sets.
    Ts = set()
    for lam in partitions_up_to(D):
        if len(lam) > L:
            continue
        padded = tuple(lam) + (0,) * (L - len(lam))
        rows = [vac[i] - padded[i] for i in range(L)]
        for drop in itertools.combinations(range(L), 2):
            Ts.add(tuple(r for k, r in enumerate(rows) if k not in drop))
    for T in sorted(Ts):
        rest = [e for e in range(low, top + 1) if e not in T]
        base = vac_sum - sum(T)
        for a, b in itertools.combinations(rest, 2):
            if base - a - b > D:
                continue
            for c, e in itertools.combinations([r for r in rest if r > b], 2):
                lhs = minor(T + (a, c)) * minor(T + (b, e))
                rhs = minor(T + (a, b)) * minor(T + (c, e)) + minor(T + (a, e)) * minor(T + (b, c))
                report.tick()
                if lhs != rhs:
                    report.fail(T=list(T), rows=[a, b, c, e], residual=lhs - rhs)
    return report


# ---------------------------------------------------------------------------
# membership, reduction and flag checks


def reduce_in_plane(p: GrassmannPlane, v: FormalLaurentVector) -> FormalLaurentVector:
    """Remainder of ``v`` after subtracting basis vectors at their leading exponents.

    Zero on the reliable range iff ``v`` lies in the span (to truncation).
    """
    p = _require_normalized(p)
    top = p.vacuum_exponent(p.rank - 1)
    if v.leading_exponent > top:
        raise DepthExceeded("vector leads above the stored basis")
    rest = v
    for i in range(p.rank - 1, -1, -1):
        e = p.vacuum_exponent(i)
        if e > rest.leading_exponent or e < rest.floor:
            continue
        c = rest[e]
        if c:
            rest = rest.axpy(-c, p.basis[i])
    return rest


def _residual_terms(v: FormalLaurentVector) -> dict[int, Fraction]:
    return {e: c for e, c in v.coeffs.items() if c and e >= v.floor}


def reduction_check(p: GrassmannPlane, d: int) -> CheckReport:
    """``y**d w`` stays in the plane for every basis vector ``w`` that fits."""
    p = _require_normalized(p)
    report = CheckReport("reduction y^d W in W", details={"m": p.m, "d": d})
    for j in range(p.rank - d):
        v = p.basis[j].shift(d)
        rest = reduce_in_plane(p, v)
        report.tick()
        residual = _residual_terms(rest)
        if residual:
            report.fail(vector=j, residual=residual)
    return report


def flag_check(smaller: GrassmannPlane, larger: GrassmannPlane) -> CheckReport:
    """``W_m`` contained in ``W_(m+1)`` to truncation."""
    report = CheckReport("flag inclusion", details={"m": smaller.m, "into": larger.m})
    larger = _require_normalized(larger)
    top = larger.vacuum_exponent(larger.rank - 1)
    for j, w in enumerate(_require_normalized(smaller).basis):
        if w.leading_exponent > top:
            break
        rest = reduce_in_plane(larger, w)
        report.tick()
        residual = _residual_terms(rest)
        if residual:
            report.fail(vector=j, residual=residual)
    return report


@lru_cache(maxsize=None)
def family_tau(d: int, m: int, D: int) -> TauSeries:
    """Cached ``tau(m, t)`` of the Gould-Hopper plane at degree ``D``."""
    plane = normalize_plane(plane_from_family(FamilyConfig.gould_hopper(d), m, D + 4))
    return tau_series(plane, D)
