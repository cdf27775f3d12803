"""Quadratic Hilbert symbols over Q and cocycle models of metaplectic covers.

The two-fold cover of SL2 over Q_v is modelled as pairs ``(g, zeta)`` with
Gelbart's cocycle
``alpha(g1, g2) = (x1, x2)_v (-x1 x2, x(g1 g2))_v`` where ``x(g) = c`` if
``c != 0`` and ``d`` otherwise.  The two covers of GL2 are built on the
semidirect product with ``Q_v^x`` acting through ``diag(1, y)``.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import List, Optional, Tuple

import gmpy2
import sympy

# gmpy2 rationals: the random relation suites multiply many matrices and
# Fraction arithmetic dominated the runtime.
Q = gmpy2.mpq


@dataclass(frozen=True, order=True)
class Place:
    """A prime ``q`` or the archimedean place (``q is None``)."""

    q: Optional[int] = None

    def __post_init__(self):
        if self.q is not None and not sympy.isprime(self.q):
            raise ValueError(f"{self.q} is not prime")

    @property
    def is_infinite(self) -> bool:
        return self.q is None

    @classmethod
    def parse(cls, text) -> "Place":
        s = str(text).strip().lower()
        if s in ("inf", "infinity", "oo", "r", "real"):
            return cls(None)
        return cls(int(s))

    def __str__(self):
        return "inf" if self.q is None else str(self.q)


INF = Place(None)


def _valuation(n: int, q: int) -> Tuple[int, int]:
    k = 0
    while n % q == 0:
        n //= q
        k += 1
    return k, n


def _legendre(u: int, q: int) -> int:
    r = pow(u % q, (q - 1) // 2, q)
    return -1 if r == q - 1 else 1


def _as_square_class(a) -> int:
    """An integer in the same square class as the nonzero rational ``a``."""
    a = Q(a)
    if a == 0:
        raise ValueError("Hilbert symbol of zero")
    return int(a.numerator * a.denominator)


def hilbert(a, b, v: Place) -> int:
    """``(a, b)_v`` for nonzero rationals."""
    a, b = _as_square_class(a), _as_square_class(b)
    if v.is_infinite:
        return -1 if a < 0 and b < 0 else 1
    q = v.q
    al, u = _valuation(a, q)
    be, w = _valuation(b, q)
    if q != 2:
        eps = ((q - 1) // 2) % 2
        sign = -1 if (al * be * eps) % 2 else 1
        if be % 2:
            sign *= _legendre(u, q)
        if al % 2:
            sign *= _legendre(w, q)
        return sign

    def e(x):
        return ((x - 1) // 2) % 2

    def om(x):
        return ((x * x - 1) // 8) % 2

    expo = e(u) * e(w) + al * om(w) + be * om(u)
    return -1 if expo % 2 else 1


def hilbert_product(a, b) -> int:
    """Product of ``(a, b)_v`` over every place where it can be nontrivial."""
    a, b = Q(a), Q(b)
    primes = {2}
    for n in (a.numerator, a.denominator, b.numerator, b.denominator):
        primes.update(sympy.primefactors(abs(int(n))))
    out = hilbert(a, b, INF)
    for q in sorted(primes):
        out *= hilbert(a, b, Place(q))
    return out


# ---------------------------------------------------------------------------
# SL2 cover

Mat2 = Tuple[object, object, object, object]  # (a, b, c, d) as exact rationals


def mat(a, b, c, d) -> Mat2:
    return (Q(a), Q(b), Q(c), Q(d))


def mat_mul(g: Mat2, h: Mat2) -> Mat2:
    a, b, c, d = g
    e, f, k, l = h
    return (a * e + b * k, a * f + b * l, c * e + d * k, c * f + d * l)


def mat_det(g: Mat2) -> Q:
    return g[0] * g[3] - g[1] * g[2]


def mat_inv(g: Mat2) -> Mat2:
    a, b, c, d = g
    det = a * d - b * c
    return (d / det, -b / det, -c / det, a / det)


IDENTITY = mat(1, 0, 0, 1)


def x_of(s: Mat2) -> Q:
    return s[2] if s[2] != 0 else s[3]


def alpha_cocycle(g1: Mat2, g2: Mat2, v: Place) -> int:
    x1, x2 = x_of(g1), x_of(g2)
    return hilbert(x1, x2, v) * hilbert(-x1 * x2, x_of(mat_mul(g1, g2)), v)


class PlaceMismatch(ValueError):
    pass


@dataclass(frozen=True)
class MetaSL2Elem:
    g: Mat2
    zeta: int
    place: Place

    def __post_init__(self):
        if mat_det(self.g) != 1:
            raise ValueError("matrix must have determinant one")
        if self.zeta not in (1, -1):
            raise ValueError("zeta must be +1 or -1")

    def __mul__(self, other):
        return msl2_mul(self, other)

    def inverse(self):
        return msl2_inv(self)

    def signed(self, eps: int) -> "MetaSL2Elem":
        return MetaSL2Elem(self.g, self.zeta * eps, self.place)

    def to_json(self):
        return {"g": [str(x) for x in self.g], "zeta": self.zeta, "place": str(self.place)}


def _trusted(cls, **fields):
    """Build a product without re-validating it; determinants and signs are multiplicative."""
    obj = object.__new__(cls)
    for k, val in fields.items():
        object.__setattr__(obj, k, val)
    return obj


def _cover_product(g1: Mat2, z1: int, g2: Mat2, z2: int, v: Place) -> Tuple[Mat2, int]:
    g = mat_mul(g1, g2)
    x1, x2 = x_of(g1), x_of(g2)
    zeta = z1 * z2 * hilbert(x1, x2, v) * hilbert(-x1 * x2, x_of(g), v)
    return g, zeta


def msl2_mul(x: MetaSL2Elem, y: MetaSL2Elem) -> MetaSL2Elem:
    if x.place != y.place:
        raise PlaceMismatch("elements live over different places")
    g, zeta = _cover_product(x.g, x.zeta, y.g, y.zeta, x.place)
    return _trusted(MetaSL2Elem, g=g, zeta=zeta, place=x.place)


def msl2_inv(x: MetaSL2Elem) -> MetaSL2Elem:
    gi = mat_inv(x.g)
    return MetaSL2Elem(gi, x.zeta * alpha_cocycle(x.g, gi, x.place), x.place)


def msl2_identity(v: Place) -> MetaSL2Elem:
    return MetaSL2Elem(IDENTITY, 1, v)


def x_alpha(u, v: Place) -> MetaSL2Elem:
    return MetaSL2Elem(mat(1, u, 0, 1), 1, v)


def x_minus_alpha(u, v: Place) -> MetaSL2Elem:
    return MetaSL2Elem(mat(1, 0, u, 1), 1, v)


def w_tilde(t, v: Place) -> MetaSL2Elem:
    t = Q(t)
    return MetaSL2Elem(mat(0, t, -1 / t, 0), 1, v)


def h_tilde(t, v: Place) -> MetaSL2Elem:
    """``w(t) w(-1)``; equals ``(diag(t, 1/t), (t, t)_v)``."""
    return w_tilde(t, v) * w_tilde(-1, v)


def embed_sl2_gelbart(x: MetaSL2Elem) -> MetaSL2Elem:
    """Normalized presentation of ``x``; also re-checks the pinned generator images."""
    t = x_of(x.g)
    v = x.place
    w = x_alpha(t, v) * x_minus_alpha(-1 / t, v) * x_alpha(t, v)
    if w != w_tilde(t, v):
        raise AssertionError("w(t) is not x(t) x_-(-1/t) x(t) in this model")
    h = h_tilde(t, v)
    if h != MetaSL2Elem(mat(t, 0, 0, 1 / t), hilbert(t, t, v), v):
        raise AssertionError("h(t) does not have the pinned image")
    return MetaSL2Elem(tuple(Q(c) for c in x.g), x.zeta, v)


def steinberg_opposite_identity(t, s, v: Place) -> bool:
    """``x(t) x_-(s) = (r, t/r)^-1 x_-(s/r) h(r) x(t/r)`` with ``r = 1 + s t``."""
    t, s = Q(t), Q(s)
    r = 1 + s * t
    if r == 0:
        raise ValueError("1 + st must be nonzero")
    lhs = x_alpha(t, v) * x_minus_alpha(s, v)
    rhs = x_minus_alpha(s / r, v) * h_tilde(r, v) * x_alpha(t / r, v)
    pref = hilbert(r, t / r, v) if t != 0 else 1
    return lhs == rhs.signed(pref)


def v_factor(y, s: Mat2, v: Place) -> int:
    return 1 if s[2] != 0 else hilbert(y, s[3], v)


def conj_matrix(y, s: Mat2) -> Mat2:
    """``diag(1, y)^-1 s diag(1, y)``."""
    y = Q(y)
    a, b, c, d = s
    return (a, b * y, c / y, d)


def conj_action(y, x: MetaSL2Elem) -> MetaSL2Elem:
    y = Q(y)
    if y == 0:
        raise ValueError("y must be nonzero")
    return MetaSL2Elem(conj_matrix(y, x.g), v_factor(y, x.g, x.place) * x.zeta, x.place)


# ---------------------------------------------------------------------------
# GL2 covers


class Variant(enum.Enum):
    COVER0 = "COVER0"
    COVER1 = "COVER1"


@dataclass(frozen=True)
class MetaGL2Elem:
    """Represents ``s diag(1, y)`` with sign ``zeta``."""

    s: Mat2
    zeta: int
    y: object
    place: Place
    variant: Variant

    def __post_init__(self):
        if mat_det(self.s) != 1:
            raise ValueError("s must have determinant one")
        if self.y == 0:
            raise ValueError("y must be nonzero")

    @property
    def matrix(self) -> Mat2:
        return mat_mul(self.s, mat(1, 0, 0, self.y))

    def __mul__(self, other):
        return mgl2_mul(self, other)

    def signed(self, eps: int) -> "MetaGL2Elem":
        return MetaGL2Elem(self.s, self.zeta * eps, self.y, self.place, self.variant)

    def to_json(self):
        return {
            "s": [str(x) for x in self.s],
            "zeta": self.zeta,
            "y": str(self.y),
            "place": str(self.place),
            "variant": self.variant.value,
        }


def mgl2_mul(x: MetaGL2Elem, y: MetaGL2Elem) -> MetaGL2Elem:
    if x.place != y.place or x.variant != y.variant:
        raise PlaceMismatch("elements differ in place or cover variant")
    v = x.place
    # y.s conjugated by diag(1, 1/x.y), as in conj_action
    yi = 1 / x.y
    twisted = conj_matrix(yi, y.s)
    g, zeta = _cover_product(x.s, x.zeta, twisted, v_factor(yi, y.s, v) * y.zeta, v)
    if x.variant is Variant.COVER1:
        zeta *= hilbert(x.y, y.y, v)
    return _trusted(MetaGL2Elem, s=g, zeta=zeta, y=x.y * y.y, place=v, variant=x.variant)


def mgl2_identity(v: Place, variant: Variant) -> MetaGL2Elem:
    return MetaGL2Elem(IDENTITY, 1, Q(1), v, variant)


def mgl2_inv(x: MetaGL2Elem) -> MetaGL2Elem:
    """Inverse found by solving ``x * x' = 1`` for the sign."""
    yi = 1 / x.y
    # (s diag(1,y))^-1 = diag(1, 1/y) s^-1 = (s^-1)^{y} diag(1, 1/y)
    s_inv = conj_matrix(x.y, mat_inv(x.s))
    cand = MetaGL2Elem(s_inv, 1, yi, x.place, x.variant)
    prod = x * cand
    return cand.signed(prod.zeta)


def gl2_from_sl2(x: MetaSL2Elem, variant: Variant) -> MetaGL2Elem:
    return MetaGL2Elem(x.g, x.zeta, Q(1), x.place, variant)


def h1_tilde(s, v: Place, variant: Variant = Variant.COVER1) -> MetaGL2Elem:
    s = Q(s)
    return MetaGL2Elem(mat(s, 0, 0, 1 / s), hilbert(s, s, v), Q(1), v, variant)


def h2_tilde(t, v: Place, variant: Variant = Variant.COVER1) -> MetaGL2Elem:
    return MetaGL2Elem(IDENTITY, 1, Q(t), v, variant)


def w1_tilde(t, v: Place, variant: Variant = Variant.COVER1) -> MetaGL2Elem:
    return gl2_from_sl2(w_tilde(t, v), variant)


def commutator(a: MetaGL2Elem, b: MetaGL2Elem) -> MetaGL2Elem:
    return a * b * mgl2_inv(a) * mgl2_inv(b)


# ---------------------------------------------------------------------------
# self tests


def random_rational(rng: random.Random, bound: int = 20, nonzero: bool = True) -> Q:
    while True:
        x = Q(rng.randint(-bound, bound), rng.randint(1, bound))
        if x != 0 or not nonzero:
            return x


def random_sl2(rng: random.Random, bound: int = 20) -> Mat2:
    """Random determinant-one matrix; a share are upper triangular so that ``c = 0`` is exercised."""
    kind = rng.random()
    if kind < 0.25:
        a = random_rational(rng, bound)
        return mat(a, random_rational(rng, bound, nonzero=False), 0, 1 / a)
    a = random_rational(rng, bound, nonzero=False)
    c = random_rational(rng, bound)
    d = random_rational(rng, bound, nonzero=False)
    # b from ad - bc = 1
    return mat(a, (a * d - 1) / c, c, d)


def _run(name, samples, rng, fn) -> dict:
    failures = []
    for _ in range(samples):
        case = fn(rng)
        if case is not None:
            failures.append(case)
    return {"test": name, "samples": samples, "failures": failures}


def selftest(place: Place, samples: int = 1000, seed: int = 0, tests=None) -> List[dict]:
    """Randomized relation checks at ``place``; one report per relation.

    ``tests`` restricts the run to the named relations.  Each relation draws
    from its own generator seeded by ``(seed, name)``.
    """
    v = place
    reports = []

    def cocycle(r):
        g1, g2, g3 = random_sl2(r), random_sl2(r), random_sl2(r)
        lhs = alpha_cocycle(g1, g2, v) * alpha_cocycle(mat_mul(g1, g2), g3, v)
        rhs = alpha_cocycle(g1, mat_mul(g2, g3), v) * alpha_cocycle(g2, g3, v)
        return None if lhs == rhs else {"g": [[str(c) for c in g] for g in (g1, g2, g3)]}

    def assoc(r):
        a, b, c = (MetaSL2Elem(random_sl2(r), r.choice((1, -1)), v) for _ in range(3))
        return None if (a * b) * c == a * (b * c) else {"g": [x.to_json() for x in (a, b, c)]}

    def hilbert_props(r):
        a, b, c = random_rational(r), random_rational(r), random_rational(r)
        ok = (
            hilbert(a, b, v) == hilbert(b, a, v)
            and hilbert(a * b, c, v) == hilbert(a, c, v) * hilbert(b, c, v)
            and hilbert(a, -a, v) == 1
            and (a + b == 0 or hilbert(a, b, v) * hilbert(-a * b, a + b, v) == 1)
        )
        return None if ok else {"a": str(a), "b": str(b), "c": str(c)}

    def product_formula(r):
        a, b = random_rational(r), random_rational(r)
        return None if hilbert_product(a, b) == 1 else {"a": str(a), "b": str(b)}

    def torus(r):
        s, t = random_rational(r), random_rational(r)
        ok = h_tilde(s, v) * h_tilde(t, v) == h_tilde(s * t, v).signed(hilbert(s, t, v))
        return None if ok else {"s": str(s), "t": str(t)}

    def steinberg(r):
        t, s = random_rational(r), random_rational(r)
        if 1 + s * t == 0:
            return None
        return None if steinberg_opposite_identity(t, s, v) else {"t": str(t), "s": str(s)}

    def conj_auto(r):
        y1, y2 = random_rational(r), random_rational(r)
        a, b = (MetaSL2Elem(random_sl2(r), r.choice((1, -1)), v) for _ in range(2))
        ok = conj_action(y1, a * b) == conj_action(y1, a) * conj_action(y1, b)
        ok = ok and conj_action(y1, conj_action(y2, a)) == conj_action(y1 * y2, a)
        return None if ok else {"y1": str(y1), "y2": str(y2), "a": a.to_json(), "b": b.to_json()}

    def gl2_relations(r):
        s, t, u = random_rational(r), random_rational(r), random_rational(r)
        c1 = Variant.COVER1
        e = mgl2_identity(v, c1)
        ok = h2_tilde(s, v) * h2_tilde(t, v) == h2_tilde(s * t, v).signed(hilbert(s, t, v))
        ok = ok and commutator(h1_tilde(s, v), h2_tilde(t, v)) == e.signed(hilbert(s, t, v))
        lhs = w1_tilde(t, v) * h2_tilde(u, v) * w1_tilde(-t, v)
        rhs = (h1_tilde(u, v) * h2_tilde(u, v)).signed(hilbert(1 / u, t / u, v))
        ok = ok and lhs == rhs
        # the two covers differ by (y1, y2)
        a0 = MetaGL2Elem(random_sl2(r), 1, s, v, Variant.COVER0)
        b0 = MetaGL2Elem(random_sl2(r), 1, t, v, Variant.COVER0)
        a1 = MetaGL2Elem(a0.s, 1, s, v, c1)
        b1 = MetaGL2Elem(b0.s, 1, t, v, c1)
        p0, p1 = a0 * b0, a1 * b1
        ok = ok and p0.s == p1.s and p0.zeta * hilbert(s, t, v) == p1.zeta
        # associativity of both covers
        c0 = MetaGL2Elem(random_sl2(r), 1, u, v, Variant.COVER0)
        cc1 = MetaGL2Elem(c0.s, 1, u, v, c1)
        ok = ok and (a0 * b0) * c0 == a0 * (b0 * c0) and (a1 * b1) * cc1 == a1 * (b1 * cc1)
        return None if ok else {"s": str(s), "t": str(t), "u": str(u)}

    for name, fn in [
        ("cocycle", cocycle),
        ("associativity", assoc),
        ("torus", torus),
        ("hilbert_properties", hilbert_props),
        ("hilbert_product", product_formula),
        ("steinberg_opposite", steinberg),
        ("conjugation_action", conj_auto),
        ("gl2_cover_relations", gl2_relations),
    ]:
        if tests is not None and name not in tests:
            continue
        reports.append(_run(name, samples, random.Random(f"{seed}:{v}:{name}"), fn))
    return reports
