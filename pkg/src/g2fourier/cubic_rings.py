"""Monogenic cubic rings ``R = Z[theta]/(p)``, their ideals, and balanced pairs.

Elements of ``E = R (x) Q`` are coordinate triples in the basis ``1, theta,
theta^2``.  Ideals are full-rank lattices stored in row Hermite normal form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import product
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import sympy

from .algebra_core import (
    MonicCubic,
    RationalInterval,
    discriminant,
    is_totally_real,
    isolate_real_roots,
    poly_divmod,
    poly_eval,
    poly_gcd,
    poly_mul,
    poly_sub,
    normalize,
    degree,
)
from .jordan import SymMat3, charpoly_coeffs
from .qp_kernel import enumerate_qp, orbit_decompose

SQRT_START_BITS = 256
SQRT_CAP_BITS = 4096


class ZeroDivisorError(ArithmeticError):
    """Raised when inverting a zero divisor of the etale algebra."""


class NotTotallyRealError(ValueError):
    pass


class NotBalancedError(ValueError):
    pass


class UndecidedAtCap(RuntimeError):
    """Numeric square-root reconstruction ran out of precision without an answer."""


# ---------------------------------------------------------------------------
# small exact linear algebra


def _solve(a: Sequence[Sequence], b: Sequence) -> List[Fraction]:
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def _inverse(a: Sequence[Sequence]) -> List[List[Fraction]]:
    n = len(a)
    cols = [_solve(a, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _det(a: Sequence[Sequence]) -> Fraction:
    from .algebra_core import det_exact

    return det_exact(a)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def hnf_rows(gens: Sequence[Sequence[int]], ncols: int = 3) -> List[List[int]]:
    """Row-style Hermite normal form of the integer row lattice spanned by ``gens``.

    Output rows are upper triangular with positive pivots and entries above each
    pivot reduced into ``[0, pivot)``.  The lattice must have full rank.
    """
    rows = [list(r) for r in gens if any(r)]
    out: List[List[int]] = []
    for col in range(ncols):
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not live:
            raise ValueError("lattice is not of full rank")
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = []
            for r in live[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = [piv] + nxt
        piv = live[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        rows = rest
    for i in range(ncols):
        for j in range(i):
            q = out[j][i] // out[i][i]
            if q:
                out[j] = [x - q * y for x, y in zip(out[j], out[i])]
    return out


# ---------------------------------------------------------------------------
# rings and elements


class CubicRing:
    """``Z[theta]/(p)`` for a monic integer cubic ``p``."""

    def __init__(self, p: MonicCubic):
        self.p = p
        self.disc = discriminant(p)

    def __repr__(self):
        return f"CubicRing({self.p})"

    def __eq__(self, other):
        return isinstance(other, CubicRing) and other.p == self.p

    def __hash__(self):
        return hash(self.p)

    def require_etale(self):
        if self.disc == 0:
            raise ValueError(f"{self.p} has a repeated root; E is not etale")

    def elem(self, *coords) -> "FieldElem":
        c = [Fraction(x) for x in coords] + [Fraction(0)] * (3 - len(coords))
        return FieldElem(self, tuple(c[:3]))

    @property
    def one(self) -> "FieldElem":
        return self.elem(1)

    @property
    def theta(self) -> "FieldElem":
        return self.elem(0, 1)

    def basis(self) -> List["FieldElem"]:
        return [self.elem(1), self.elem(0, 1), self.elem(0, 0, 1)]

    @cached_property
    def trace_gram(self) -> List[List[Fraction]]:
        """``tr(theta^(i+j))`` for ``0 <= i, j < 3``."""
        b = self.basis()
        return [[(x * y).trace() for y in b] for x in b]

    @cached_property
    def roots(self) -> List[RationalInterval]:
        """Isolating intervals of the real roots (distinct; p assumed squarefree)."""
        return isolate_real_roots(self.p, Fraction(1, 1 << 20))

    @cached_property
    def is_totally_real(self) -> bool:
        return is_totally_real(self.p)

    def reduce(self, poly: Sequence) -> Tuple[Fraction, Fraction, Fraction]:
        r = poly_divmod(poly, self.p.coeffs)[1]
        out = list(r) + [Fraction(0)] * (3 - len(r))
        return tuple(out[:3])


@dataclass(frozen=True)
class FieldElem:
    ring: CubicRing = field(compare=False, repr=False)
    coords: Tuple[Fraction, Fraction, Fraction]

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.ring.p == other.ring.p and self.coords == other.coords
        if isinstance(other, (int, Fraction)):
            return self.coords == (Fraction(other), Fraction(0), Fraction(0))
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.p, self.coords))

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.ring.p != self.ring.p:
                raise ValueError("elements of different rings")
            return other
        return self.ring.elem(other)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElem(self.ring, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.ring, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElem(self.ring, self.ring.reduce(poly_mul(self.coords, o.coords)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ring.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return not any(self.coords)

    def regular_matrix(self) -> List[List[Fraction]]:
        """Matrix of multiplication by ``self``; column ``j`` is ``self * theta^j``."""
        cols = [(self * b).coords for b in self.ring.basis()]
        return [[cols[j][i] for j in range(3)] for i in range(3)]

    def norm(self) -> Fraction:
        return _det(self.regular_matrix())

    def trace(self) -> Fraction:
        m = self.regular_matrix()
        return m[0][0] + m[1][1] + m[2][2]

    def charpoly(self) -> Tuple[Fraction, Fraction, Fraction]:
        """``(tr, sigma2, norm)`` of the regular representation."""
        m = self.regular_matrix()
        s2 = sum(m[i][i] * m[j][j] - m[i][j] * m[j][i] for i in range(3) for j in range(i + 1, 3))
        return (self.trace(), s2, self.norm())

    def inverse(self) -> "FieldElem":
        m = self.regular_matrix()
        if _det(m) == 0:
            raise ZeroDivisorError("zero divisor in etale algebra")
        return FieldElem(self.ring, tuple(_solve(m, [1, 0, 0])))

    def embed_poly(self):
        return normalize(self.coords)

    def to_json(self):
        return [_frac_str(c) for c in self.coords]

    def __repr__(self):
        return f"FieldElem({', '.join(str(c) for c in self.coords)})"


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def elem_mul(x: FieldElem, y: FieldElem) -> FieldElem:
    return x * y


def elem_add(x: FieldElem, y: FieldElem) -> FieldElem:
    return x + y


def elem_inv(x: FieldElem) -> FieldElem:
    return x.inverse()


def elem_norm(x: FieldElem) -> Fraction:
    return x.norm()


def elem_trace(x: FieldElem) -> Fraction:
    return x.trace()


# ---------------------------------------------------------------------------
# signs of real embeddings


def _interval_eval(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Tuple[Fraction, Fraction]:
    """Enclosure of a polynomial over ``[lo, hi]`` by Horner interval arithmetic."""
    acc = (Fraction(0), Fraction(0))
    for c in reversed(coeffs):
        prods = [acc[0] * lo, acc[0] * hi, acc[1] * lo, acc[1] * hi]
        acc = (min(prods) + c, max(prods) + c)
    return acc


def embedding_signs(x: FieldElem) -> List[int]:
    """Sign of ``x`` at each real root of ``p`` (ascending), decided exactly."""
    ring = x.ring
    ring.require_etale()
    xp = normalize(x.coords)
    if not xp:
        return [0] * len(ring.roots)
    sqf = ring.p.coeffs
    common = poly_gcd(sqf, xp)
    signs = []
    for iv in ring.roots:
        if degree(common) >= 1 and _has_root_in(common, iv):
            signs.append(0)
            continue
        cur = iv
        while True:
            lo, hi = _interval_eval(xp, cur.lo, cur.hi)
            if lo > 0:
                signs.append(1)
                break
            if hi < 0:
                signs.append(-1)
                break
            cur = cur.refine(sqf)
    return signs


def _has_root_in(f, iv: RationalInterval) -> bool:
    from .algebra_core import count_roots, squarefree_part

    g = squarefree_part(f)
    if iv.lo == iv.hi:
        return poly_eval(g, iv.lo) == 0
    return count_roots(g, iv.lo, iv.hi) > 0 or poly_eval(g, iv.lo) == 0


def is_totally_positive(x: FieldElem) -> bool:
    ring = x.ring
    ring.require_etale()
    if not ring.is_totally_real:
        raise NotTotallyRealError("total positivity is only defined here for totally real p")
    return all(s > 0 for s in embedding_signs(x))


# ---------------------------------------------------------------------------
# fractional ideals


class FracIdeal:
    """Full-rank lattice in ``E`` that is stable under multiplication by ``theta``."""

    def __init__(self, ring: CubicRing, gens: Sequence[Sequence], check_module: bool = True):
        self.ring = ring
        gens = [[Fraction(v) for v in g] for g in gens]
        den = reduce(_lcm, (v.denominator for g in gens for v in g), 1)
        ints = [[int(v * den) for v in g] for g in gens]
        h = hnf_rows(ints)
        self.basis = tuple(tuple(Fraction(v, den) for v in row) for row in h)
        if check_module and not self.is_module():
            raise ValueError("lattice is not closed under multiplication by theta")

    @classmethod
    def from_elems(cls, ring: CubicRing, elems: Sequence[FieldElem], module_closure: bool = False) -> "FracIdeal":
        """Z-span of ``elems``, or the R-module they generate when ``module_closure``."""
        gens = [e.coords for e in elems]
        if module_closure:
            gens = [(e * b).coords for e in elems for b in ring.basis()]
        return cls(ring, gens)

    @classmethod
    def unit(cls, ring: CubicRing) -> "FracIdeal":
        return cls(ring, [b.coords for b in ring.basis()])

    @classmethod
    def principal(cls, x: FieldElem) -> "FracIdeal":
        return cls.from_elems(x.ring, [x * b for b in x.ring.basis()])

    def elems(self) -> List[FieldElem]:
        return [FieldElem(self.ring, row) for row in self.basis]

    def is_module(self) -> bool:
        th = self.ring.theta
        return all(self.contains(th * e) for e in self.elems())

    def __eq__(self, other):
        return isinstance(other, FracIdeal) and self.ring == other.ring and self.basis == other.basis

    def __hash__(self):
        return hash((self.ring.p, self.basis))

    def __repr__(self):
        return f"FracIdeal({[[str(v) for v in r] for r in self.basis]})"

    def coordinates(self, x: FieldElem) -> List[Fraction]:
        """Coordinates of ``x`` in the HNF basis."""
        bt = [[self.basis[j][i] for j in range(3)] for i in range(3)]
        return _solve(bt, x.coords)

    def contains(self, x: FieldElem) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(x))

    def issubset(self, other: "FracIdeal") -> bool:
        return all(other.contains(e) for e in self.elems())

    def __mul__(self, other):
        if isinstance(other, FracIdeal):
            return FracIdeal.from_elems(self.ring, [x * y for x in self.elems() for y in other.elems()])
        return FracIdeal.from_elems(self.ring, [x * other for x in self.elems()])

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return abs(_det(self.basis))

    def to_json(self):
        return [[_frac_str(v) for v in row] for row in self.basis]

    @classmethod
    def from_json(cls, ring: CubicRing, data) -> "FracIdeal":
        return cls(ring, [[Fraction(v) for v in row] for row in data])


def ideal_norm(ideal: FracIdeal) -> Fraction:
    """Index relative to ``R``, as a positive rational."""
    return ideal.norm()


def inverse_different(ring: CubicRing) -> FracIdeal:
    """Trace dual of ``R``; checked against ``(1/p'(theta)) R``."""
    ring.require_etale()
    dual_rows = _inverse(ring.trace_gram)
    dinv = FracIdeal(ring, dual_rows)
    th = ring.theta
    pprime = 3 * th * th + 2 * ring.p.a2 * th + ring.p.a1
    if dinv != FracIdeal.principal(pprime.inverse()):
        raise AssertionError("trace dual differs from (1/p'(theta)) R")
    return dinv


# ---------------------------------------------------------------------------
# balanced pairs


@dataclass(frozen=True)
class BalancedPair:
    ideal: FracIdeal
    mu: FieldElem

    @property
    def ring(self) -> CubicRing:
        return self.ideal.ring

    def to_json(self):
        return {"ideal": self.ideal.to_json(), "mu": self.mu.to_json()}

    @classmethod
    def from_json(cls, ring: CubicRing, data) -> "BalancedPair":
        return cls(FracIdeal.from_json(ring, data["ideal"]), ring.elem(*(Fraction(v) for v in data["mu"])))


def is_balanced(ideal: FracIdeal, mu: FieldElem) -> bool:
    """``mu I^2`` inside the inverse different and ``N(mu) N(I)^2 disc = 1``.

    The norm condition is tested with signs: ``N(mu) > 0`` for totally positive
    ``mu`` and ``disc > 0`` for totally real ``p``.  Rings that are not totally
    real carry no totally positive elements in this sense, so nothing is
    balanced there.
    """
    ring = ideal.ring
    ring.require_etale()
    if mu.norm() == 0:
        raise ZeroDivisorError("mu must be invertible")
    if not ring.is_totally_real:
        return False
    if not is_totally_positive(mu):
        return False
    if mu.norm() * ideal.norm() ** 2 * ring.disc != 1:
        return False
    return (ideal * ideal * mu).issubset(inverse_different(ring))


def _cyclic_vector(t: SymMat3, box: int = 2):
    a = [[-x for x in row] for row in t.rows()]
    while box <= 64:
        cands = sorted(
            product(range(-box, box + 1), repeat=3),
            key=lambda v: (sum(x * x for x in v), [-x for x in v]),
        )
        for e in cands:
            if not any(e):
                continue
            ae = [sum(a[i][k] * e[k] for k in range(3)) for i in range(3)]
            aae = [sum(a[i][k] * ae[k] for k in range(3)) for i in range(3)]
            k = [[e[i], ae[i], aae[i]] for i in range(3)]
            if _det(k) != 0:
                return list(e), k
        box *= 2
    raise ValueError("no cyclic vector found; characteristic polynomial is not squarefree")


def matrix_to_pair(t: SymMat3, ring: CubicRing) -> BalancedPair:
    """Balanced pair attached to ``T``: ``theta`` acts on ``Z^3`` as ``-T``."""
    ring.require_etale()
    if charpoly_coeffs(t) != (ring.p.a2, ring.p.a1, ring.p.a0):
        raise ValueError("characteristic polynomial of T does not match the ring")
    e, kmat = _cyclic_vector(t)
    kinv = _inverse(kmat)
    # standard basis vector e_i corresponds to column i of K^-1
    images = [ring.elem(*(kinv[r][i] for r in range(3))) for i in range(3)]
    ideal = FracIdeal.from_elems(ring, images)
    # (e, (-T)^k e) = tr(mu theta^k)
    moments = [Fraction(sum(e[i] * kmat[i][k] for i in range(3))) for k in range(3)]
    mu = ring.elem(*_solve(ring.trace_gram, moments))
    for i in range(3):
        for j in range(3):
            if (mu * images[i] * images[j]).trace() != (1 if i == j else 0):
                raise AssertionError("trace form does not reproduce the standard inner product")
    return BalancedPair(ideal, mu)


def _cholesky_float(g):
    import math

    n = len(g)
    l = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = float(g[i][j]) - sum(l[i][k] * l[j][k] for k in range(j))
            if i == j:
                l[i][i] = math.sqrt(max(s, 0.0))
            else:
                l[i][j] = s / l[j][j]
    return l


def _short_vectors(g: Sequence[Sequence[int]], norm: int = 1) -> List[Tuple[int, int, int]]:
    """All integer ``v`` with ``v^t G v == norm`` (Fincke-Pohst, exact final check)."""
    import math

    n = 3
    # q-form: Q(v) = sum_i q_ii (v_i + sum_{j>i} q_ij v_j)^2
    q = [[Fraction(x) for x in row] for row in g]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    qf = [[float(x) for x in row] for row in q]
    out = []
    slack = 1e-9 * max(1.0, norm)

    def rec(i, partial, remaining):
        if i < 0:
            v = tuple(partial)
            if sum(g[a][b] * v[a] * v[b] for a in range(n) for b in range(n)) == norm:
                out.append(v)
            return
        center = -sum(qf[i][j] * partial[j] for j in range(i + 1, n))
        radius = math.sqrt(max(remaining, 0.0) / qf[i][i]) + 1e-9
        lo = math.ceil(center - radius - slack)
        hi = math.floor(center + radius + slack)
        for x in range(lo, hi + 1):
            rem = remaining - qf[i][i] * (x - center) ** 2
            if rem < -1e-6:
                continue
            partial[i] = x
            rec(i - 1, partial, rem)
        partial[i] = 0

    rec(n - 1, [0] * n, float(norm) + 1e-6)
    return sorted(set(out))


def gram_orthonormalize(g: Sequence[Sequence[int]]) -> List[List[int]]:
    """Unimodular ``U`` with ``U G U^t = I`` for a positive definite unimodular ternary ``G``."""
    vecs = _short_vectors(g, 1)
    reps = sorted({v if next(x for x in v if x) > 0 else tuple(-x for x in v) for v in vecs}, reverse=True)
    if len(reps) != 3:
        raise NotBalancedError(f"expected 3 norm-one vectors up to sign, found {len(reps)}")
    u = [list(v) for v in reps]
    if _det(u) < 0:
        u[2] = [-x for x in u[2]]
    ugu = [[sum(u[i][a] * g[a][b] * u[j][b] for a in range(3) for b in range(3)) for j in range(3)] for i in range(3)]
    if ugu != [[1 if i == j else 0 for j in range(3)] for i in range(3)]:
        raise NotBalancedError("norm-one vectors are not orthonormal")
    return u


def pair_gram(pair: BalancedPair) -> List[List[Fraction]]:
    b = pair.ideal.elems()
    return [[(pair.mu * x * y).trace() for y in b] for x in b]


def pair_to_matrix(pair: BalancedPair) -> SymMat3:
    ring = pair.ring
    if not ring.is_totally_real:
        raise NotTotallyRealError("pair_to_matrix needs a totally real ring")
    g = pair_gram(pair)
    if any(x.denominator != 1 for row in g for x in row):
        raise NotBalancedError("pair not balanced: trace form is not integral")
    gi = [[int(x) for x in row] for row in g]
    minors = [gi[0][0], gi[0][0] * gi[1][1] - gi[0][1] ** 2, _det(gi)]
    if minors[2] != 1 or any(m <= 0 for m in minors):
        raise NotBalancedError("pair not balanced: Gram matrix is not positive definite of determinant one")
    u = gram_orthonormalize(gi)
    b = pair.ideal.elems()
    frame = [reduce(lambda a, c: a + c, (b[j] * u[i][j] for j in range(3))) for i in range(3)]
    th = ring.theta
    rows = [[-(pair.mu * frame[i] * th * frame[j]).trace() for j in range(3)] for i in range(3)]
    t = SymMat3.from_rows([[int(x) for x in r] for r in rows])
    if charpoly_coeffs(t) != (ring.p.a2, ring.p.a1, ring.p.a0):
        raise AssertionError("reconstructed matrix has the wrong characteristic polynomial")
    return t


# ---------------------------------------------------------------------------
# square roots and equivalence


def _is_rational_square(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    n, d = isqrt(x.numerator), isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


def _numeric_sqrt(lam: FieldElem, bits: int) -> Optional[FieldElem]:
    ring = lam.ring
    with mpmath.workprec(bits + 32):
        roots = mpmath.polyroots([1, ring.p.a2, ring.p.a1, ring.p.a0], maxsteps=200, extraprec=bits)
        vals = [lam.coords[0] + lam.coords[1] * r + lam.coords[2] * r * r for r in roots]
        sq = [mpmath.sqrt(v) for v in vals]
        vand = mpmath.matrix([[1, r, r * r] for r in roots])
        max_den = 1 << max(16, bits // 4)
        for signs in product((1, -1), repeat=2):
            target = mpmath.matrix([sq[0], signs[0] * sq[1], signs[1] * sq[2]])
            try:
                sol = mpmath.lu_solve(vand, target)
            except ZeroDivisionError:
                return None
            coords = []
            for k in range(3):
                re = mpmath.re(sol[k])
                coords.append(Fraction(mpmath.nstr(re, int(bits * 0.3), strip_zeros=False)).limit_denominator(max_den))
            beta = ring.elem(*coords)
            if beta * beta == lam:
                return beta
    return None


def _trace_quartic_candidates(lam: FieldElem) -> Tuple[bool, List[FieldElem]]:
    """Exact search through the trace of a putative square root.

    If ``beta^2 = lam`` with ``tr(beta) = s1``, ``sigma2(beta) = s2`` and
    ``N(beta) = s3``, then ``s3^2 = N(lam)``, ``s2 = (s1^2 - tr(lam))/2`` and
    ``(s1^2 - tr lam)^2 - 8 s3 s1 - 4 sigma2(lam) = 0``; moreover
    ``beta (lam + s2) = s1 lam + s3``.  Returns ``(has_rational_trace, candidates)``.
    """
    tr, s2lam, n = lam.charpoly()
    root_n = _is_rational_square(n)
    if root_n is None:
        return False, []
    x = sympy.Symbol("x")
    found_any = False
    cands = []
    for s3 in {root_n, -root_n}:
        quartic = sympy.Poly((x ** 2 - sympy.Rational(tr.numerator, tr.denominator)) ** 2
                             - 8 * sympy.Rational(s3.numerator, s3.denominator) * x
                             - 4 * sympy.Rational(s2lam.numerator, s2lam.denominator), x, domain="QQ")
        for fac, _ in quartic.factor_list()[1]:
            if fac.degree() != 1:
                continue
            c1, c0 = fac.all_coeffs()
            s1 = Fraction(int(sympy.fraction(-c0 / c1)[0]), int(sympy.fraction(-c0 / c1)[1]))
            found_any = True
            s2 = (s1 * s1 - tr) / 2
            denom = lam + s2
            if denom.norm() == 0:
                continue
            cands.append((lam * s1 + s3) / denom)
    return found_any, cands


def sqrt_in_E(lam: FieldElem, start_bits: int = SQRT_START_BITS, cap_bits: int = SQRT_CAP_BITS) -> Optional[FieldElem]:
    """``beta`` with ``beta^2 = lam`` exactly, or ``None`` when no square root exists.

    Raises :class:`UndecidedAtCap` when neither the numeric reconstruction nor
    the exact trace certificate settles the question.
    """
    ring = lam.ring
    ring.require_etale()
    n = lam.norm()
    if n == 0:
        raise ZeroDivisorError("zero divisor in etale algebra")
    if _is_rational_square(n) is None:
        return None
    if ring.is_totally_real and any(s < 0 for s in embedding_signs(lam)):
        return None
    bits = start_bits
    beta = _numeric_sqrt(lam, bits)
    if beta is not None:
        return _canonical_sign(beta)
    has_trace, cands = _trace_quartic_candidates(lam)
    if not has_trace:
        return None
    for c in cands:
        if c * c == lam:
            return _canonical_sign(c)
    while bits < cap_bits:
        bits *= 2
        beta = _numeric_sqrt(lam, bits)
        if beta is not None:
            return _canonical_sign(beta)
    raise UndecidedAtCap(f"no square root reconstructed at {cap_bits} bits")


def _canonical_sign(beta: FieldElem) -> FieldElem:
    first = next(c for c in beta.coords if c != 0)
    return beta if first > 0 else -beta


def pairs_equivalent(p1: BalancedPair, p2: BalancedPair) -> bool:
    """``(I, mu) ~ (beta I, beta^-2 mu)``."""
    if p1.ring != p2.ring:
        raise ValueError("pairs over different rings")
    lam = p1.mu / p2.mu
    beta = sqrt_in_E(lam)
    if beta is None:
        return False
    return p1.ideal * beta == p2.ideal


# ---------------------------------------------------------------------------
# class counts, maximality, monogenic quadratic rings


@dataclass(frozen=True)
class QRClasses:
    ring: CubicRing
    count: int
    orbit_reps: Tuple[SymMat3, ...]
    pairs: Tuple[BalancedPair, ...]
    delta: int


def classes_QR(ring: CubicRing, validate: bool = True) -> QRClasses:
    """``|Q_R|`` as the number of ``SO3(Z)``-orbits on ``Q_p``.

    With ``validate`` the orbit representatives are mapped to balanced pairs and
    checked to be pairwise inequivalent.
    """
    ring.require_etale()
    if not ring.is_totally_real:
        return QRClasses(ring, 0, (), (), 0)
    res = orbit_decompose(enumerate_qp(ring.p))
    reps = tuple(o.rep for o in res.orbits)
    pairs = tuple(matrix_to_pair(t, ring) for t in reps)
    if validate:
        for pair in pairs:
            if not is_balanced(pair.ideal, pair.mu):
                raise AssertionError("orbit representative produced an unbalanced pair")
        for i in range(len(pairs)):
            for j in range(i + 1, len(pairs)):
                if pairs_equivalent(pairs[i], pairs[j]):
                    raise AssertionError("distinct orbits map to equivalent pairs")
    return QRClasses(ring, len(reps), reps, pairs, 1 if reps else 0)


def delta_R(ring: CubicRing) -> int:
    return classes_QR(ring, validate=False).delta


def _sympy_poly(p: MonicCubic, modulus: Optional[int] = None):
    t = sympy.Symbol("t")
    kw = {"modulus": modulus} if modulus else {}
    return sympy.Poly(t ** 3 + p.a2 * t ** 2 + p.a1 * t + p.a0, t, **kw), t


def is_maximal(ring: CubicRing) -> bool:
    """Dedekind's criterion at every prime whose square divides the discriminant."""
    ring.require_etale()
    for q, e in sympy.factorint(abs(ring.disc)).items():
        if e < 2:
            continue
        if not _dedekind_ok(ring.p, q):
            return False
    return True


def _dedekind_ok(p: MonicCubic, q: int) -> bool:
    pz, t = _sympy_poly(p)
    pq, _ = _sympy_poly(p, q)
    factors = pq.factor_list()[1]
    g = sympy.Poly(1, t)
    h = sympy.Poly(1, t)
    for fac, mult in factors:
        lifted = sympy.Poly(fac.as_expr(), t)
        g = g * lifted
        h = h * lifted ** (mult - 1)
    f = (pz - g * h)
    f = sympy.Poly(f.as_expr() / q, t)
    fbar = sympy.Poly(f.as_expr(), t, modulus=q)
    gbar = sympy.Poly(g.as_expr(), t, modulus=q)
    hbar = sympy.Poly(h.as_expr(), t, modulus=q)
    common = sympy.gcd(sympy.gcd(fbar, gbar), hbar)
    return common.degree() == 0


def quadratic_monogenic_witness(ell: int, wcase: str = "sqrt") -> Optional[dict]:
    """Generator of ``Z x O_K`` when it is monogenic.

    ``wcase="sqrt"``: ``O_K = Z[sqrt(ell)]``, monogenic iff ``ell = r^2 +- 1``.
    ``wcase="half"``: ``O_K = Z[omega]``, ``omega = (1 + sqrt(4 ell + 1))/2``,
    monogenic iff ``r (r - 1) = ell +- 1``.
    """
    if wcase == "sqrt":
        for target in (ell - 1, ell + 1):
            if target >= 0:
                r = isqrt(target)
                if r * r == target:
                    # (t - r)(t^2 - ell)
                    poly = MonicCubic(-r, -ell, r * ell)
                    return {"r": r, "generator": (r, "sqrt"), "ell": ell, "charpoly": poly}
        return None
    if wcase == "half":
        for target in (ell - 1, ell + 1):
            for r in range(0, isqrt(max(target, 0)) + 2):
                if r * (r - 1) == target:
                    # (t - r)(t^2 - t - ell)
                    poly = MonicCubic(-1 - r, r - ell, r * ell)
                    return {"r": r, "generator": (r, "omega"), "ell": ell, "charpoly": poly}
        return None
    raise ValueError("wcase must be 'sqrt' or 'half'")


# ---------------------------------------------------------------------------
# units of order two


def _poly_inverse_mod(a, m):
    """Inverse of ``a`` modulo ``m`` over Q via the extended Euclidean algorithm."""
    r0, r1 = normalize(m), normalize(a)
    s0, s1 = (), (Fraction(1),)
    while degree(r1) > 0:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1))
    if not r1:
        raise ZeroDivisionError("not coprime")
    c = r1[0]
    return tuple(x / c for x in s1)


def mu2_elements(ring: CubicRing) -> List[FieldElem]:
    """All ``x`` in ``E`` with ``x^2 = 1`` (signed sums of primitive idempotents)."""
    ring.require_etale()
    pz, t = _sympy_poly(ring.p)
    facs = [f for f, _ in sympy.Poly(pz.as_expr(), t, domain="QQ").factor_list()[1]]
    pc = ring.p.coeffs
    idems = []
    for f in facs:
        fc = normalize([Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in reversed(f.all_coeffs())])
        cof = poly_divmod(pc, fc)[0]
        inv = _poly_inverse_mod(cof, fc)
        idems.append(FieldElem(ring, ring.reduce(poly_mul(cof, inv))))
    out = []
    for signs in product((1, -1), repeat=len(idems)):
        x = ring.elem(0)
        for s, e in zip(signs, idems):
            x = x + e * s
        out.append(x)
    return out


def multiplier_mu2(ideal: FracIdeal) -> List[FieldElem]:
    """``mu_2`` of the multiplier ring ``{x : x I in I}``."""
    return [x for x in mu2_elements(ideal.ring) if (ideal * x).issubset(ideal)]
