"""Exact univariate polynomial helpers, monic cubics and Sturm root isolation.

Polynomials are tuples of :class:`~fractions.Fraction` (or ``int``) listed from
the constant term upward.  Nothing here touches floating point.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import List, Sequence, Tuple

Poly = Tuple[Fraction, ...]


class PolynomialParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# dense polynomial arithmetic over Q


def normalize(p: Sequence) -> Poly:
    out = [Fraction(c) for c in p]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def degree(p: Poly) -> int:
    return len(p) - 1


def poly_eval(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_add(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    return normalize([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def poly_neg(p: Sequence) -> Poly:
    return normalize([-c for c in p])


def poly_sub(p: Sequence, q: Sequence) -> Poly:
    return poly_add(p, poly_neg(q))


def poly_mul(p: Sequence, q: Sequence) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return normalize(out)


def poly_pow(p: Sequence, n: int) -> Poly:
    out: Poly = (Fraction(1),)
    for _ in range(n):
        out = poly_mul(out, p)
    return out


def poly_deriv(p: Sequence) -> Poly:
    return normalize([i * p[i] for i in range(1, len(p))])


def poly_divmod(p: Sequence, q: Sequence) -> Tuple[Poly, Poly]:
    q = normalize(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(normalize(p))
    dq = len(q) - 1
    quot = [Fraction(0)] * max(len(r) - dq, 1)
    while len(r) - 1 >= dq and r:
        shift = len(r) - 1 - dq
        c = r[-1] / q[-1]
        quot[shift] = c
        for i, b in enumerate(q):
            r[i + shift] -= c * b
        r = list(normalize(r))
    return normalize(quot), tuple(r)


def poly_monic(p: Sequence) -> Poly:
    p = normalize(p)
    if not p:
        return p
    lead = p[-1]
    return tuple(c / lead for c in p)


def poly_gcd(p: Sequence, q: Sequence) -> Poly:
    a, b = normalize(p), normalize(q)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return poly_monic(a)


def squarefree_factors(p: Sequence) -> List[Tuple[Poly, int]]:
    """Yun's algorithm: ``p = lc * prod(f_i ** i)`` with each ``f_i`` squarefree and monic."""
    p = poly_monic(p)
    if degree(p) < 1:
        return []
    out = []
    a = poly_gcd(p, poly_deriv(p))
    b = poly_divmod(p, a)[0]
    c = poly_divmod(poly_deriv(p), a)[0]
    d = poly_sub(c, poly_deriv(b))
    i = 1
    while degree(b) >= 1:
        a = poly_gcd(b, d)
        b = poly_divmod(b, a)[0]
        c = poly_divmod(d, a)[0]
        if degree(a) >= 1:
            out.append((a, i))
        i += 1
        d = poly_sub(c, poly_deriv(b))
    return out


def squarefree_part(p: Sequence) -> Poly:
    p = poly_monic(p)
    if degree(p) < 1:
        return p
    return poly_monic(poly_divmod(p, poly_gcd(p, poly_deriv(p)))[0])


def resultant(p: Sequence, q: Sequence) -> Fraction:
    """Resultant as the determinant of the Sylvester matrix."""
    p, q = normalize(p), normalize(q)
    m, n = degree(p), degree(q)
    size = m + n
    if size == 0:
        return Fraction(1)
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + list(reversed(p)) + [Fraction(0)] * (n - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + list(reversed(q)) + [Fraction(0)] * (m - 1 - i))
    return det_exact(rows)


def det_exact(rows: Sequence[Sequence]) -> Fraction:
    """Fraction-exact determinant by Gaussian elimination."""
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pv = m[col][col]
        result *= pv
        for r in range(col + 1, n):
            f = m[r][col] / pv
            if f:
                for k in range(col, n):
                    m[r][k] -= f * m[col][k]
    return sign * result


# ---------------------------------------------------------------------------
# Sturm sequences


def sturm_chain(p: Sequence) -> List[Poly]:
    p = normalize(p)
    chain = [p, poly_deriv(p)]
    while chain[-1]:
        r = poly_divmod(chain[-2], chain[-1])[1]
        if not r:
            break
        chain.append(poly_neg(r))
    return [c for c in chain if c]


def _sign_changes(chain: Sequence[Poly], x) -> int:
    signs = []
    for c in chain:
        v = poly_eval(c, x)
        if v:
            signs.append(v > 0)
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _sign_changes_at_infinity(chain: Sequence[Poly], positive: bool) -> int:
    signs = []
    for c in chain:
        lead = c[-1] > 0
        if not positive and degree(c) % 2:
            lead = not lead
        signs.append(lead)
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def count_roots(p: Sequence, lo=None, hi=None) -> int:
    """Number of distinct real roots of squarefree ``p`` in ``(lo, hi]`` (``None`` = infinite)."""
    chain = sturm_chain(p)
    if degree(chain[0]) < 1:
        return 0
    left = _sign_changes_at_infinity(chain, False) if lo is None else _sign_changes(chain, lo)
    right = _sign_changes_at_infinity(chain, True) if hi is None else _sign_changes(chain, hi)
    return left - right


def cauchy_bound(p: Sequence) -> Fraction:
    p = poly_monic(p)
    return 1 + max((abs(c) for c in p[:-1]), default=Fraction(0))


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction
    multiplicity: int = 1

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def refine(self, p: Sequence) -> "RationalInterval":
        """Halve the interval around the unique root of squarefree ``p`` it isolates."""
        if self.lo == self.hi:
            return self
        mid = (self.lo + self.hi) / 2
        fm = poly_eval(p, mid)
        if fm == 0:
            return RationalInterval(mid, mid, self.multiplicity)
        if poly_eval(p, self.lo) * fm < 0:
            return RationalInterval(self.lo, mid, self.multiplicity)
        return RationalInterval(mid, self.hi, self.multiplicity)

    def __float__(self):
        return float((self.lo + self.hi) / 2)


def _isolate_squarefree(p: Poly, eps: Fraction) -> List[Tuple[Fraction, Fraction]]:
    """Open intervals with non-root endpoints, one per real root of squarefree ``p``."""
    if degree(p) < 1:
        return []
    bound = cauchy_bound(p)  # strict: every root lies in (-bound, bound)
    out: List[Tuple[Fraction, Fraction]] = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        n = count_roots(p, lo, hi)
        if n == 0:
            continue
        if n == 1 and hi - lo < eps:
            out.append((lo, hi))
            continue
        # split away from roots so endpoints stay non-roots
        width = hi - lo
        for k in (2, 3, 5, 7, 11):
            mid = lo + width * Fraction(k // 2, k)
            if poly_eval(p, mid) != 0:
                break
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(out)


def isolate_real_roots_poly(p: Sequence, eps) -> List[RationalInterval]:
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    out = []
    for f, mult in squarefree_factors(p):
        for lo, hi in _isolate_squarefree(f, eps):
            out.append(RationalInterval(lo, hi, mult))
    return sorted(out, key=lambda iv: (iv.lo, iv.hi))


def real_root_count(p: Sequence, with_multiplicity: bool = True) -> int:
    total = 0
    for f, mult in squarefree_factors(p):
        total += count_roots(f) * (mult if with_multiplicity else 1)
    return total


def all_roots_real(p: Sequence) -> bool:
    p = normalize(p)
    return real_root_count(p) == degree(p)


# ---------------------------------------------------------------------------
# monic cubics


@dataclass(frozen=True, order=True)
class MonicCubic:
    """``t^3 + a2 t^2 + a1 t + a0`` with integer coefficients."""

    a2: int
    a1: int
    a0: int

    def __post_init__(self):
        for name in ("a2", "a1", "a0"):
            v = getattr(self, name)
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise ValueError(f"non-integral coefficient {name}={v}")
                object.__setattr__(self, name, int(v))
            elif not isinstance(v, int) or isinstance(v, bool):
                raise TypeError(f"coefficient {name} must be an integer")

    @property
    def coeffs(self) -> Poly:
        return (Fraction(self.a0), Fraction(self.a1), Fraction(self.a2), Fraction(1))

    def __call__(self, x):
        return ((x + self.a2) * x + self.a1) * x + self.a0

    @classmethod
    def from_coeffs(cls, coeffs: Sequence) -> "MonicCubic":
        c = normalize(coeffs)
        if len(c) != 4 or c[3] != 1:
            raise ValueError("not a monic cubic")
        return cls(c[2], c[1], c[0])

    @classmethod
    def parse(cls, text: str) -> "MonicCubic":
        try:
            return cls.from_coeffs(parse_polynomial(text))
        except ValueError as exc:
            raise PolynomialParseError(f"{text!r}: {exc}") from None

    def __str__(self) -> str:
        return format_polynomial(self.coeffs)


def discriminant(p: MonicCubic) -> int:
    a2, a1, a0 = p.a2, p.a1, p.a0
    return 18 * a2 * a1 * a0 - 4 * a2 ** 3 * a0 + a2 ** 2 * a1 ** 2 - 4 * a1 ** 3 - 27 * a0 ** 2


def isolate_real_roots(p: MonicCubic, eps) -> List[RationalInterval]:
    return isolate_real_roots_poly(p.coeffs, eps)


def is_totally_real(p: MonicCubic) -> bool:
    d = discriminant(p)
    counted = real_root_count(p.coeffs)
    if d > 0 and counted != 3 or d < 0 and counted != 1:
        raise AssertionError("discriminant sign disagrees with Sturm count")
    return counted == 3


def max_abs_root_bound(p: MonicCubic) -> int:
    """Smallest integer ``B`` with every real root in ``[-B, B]``."""
    sqf = squarefree_part(p.coeffs)
    top = ceil(cauchy_bound(sqf))
    for b in range(0, top + 1):
        above = count_roots(sqf, b, None)
        below = count_roots(sqf, None, -b) - (1 if poly_eval(sqf, -b) == 0 else 0)
        if above == 0 and below == 0:
            return b
    return top


# ---------------------------------------------------------------------------
# text syntax
#
#   expr    := term (("+" | "-") term)*
#   term    := ["+" | "-"] factor (["*"] factor)*
#   factor  := primary ["^" INT]
#   primary := INT | "t" | "(" expr ")"
#
# Whitespace is ignored; "**" is accepted for "^"; juxtaposition multiplies.

_TOKEN = re.compile(r"\s*(?:(\d+)|(\*\*|[-+*^()])|([A-Za-z]))")


def _tokenize(text: str) -> List[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialParseError(f"unexpected character at {pos}: {text[pos:]!r}")
        tok = m.group(1) or m.group(2) or m.group(3)
        if m.group(3) and tok != "t":
            raise PolynomialParseError(f"unknown variable {tok!r}; use t")
        out.append("^" if tok == "**" else tok)
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise PolynomialParseError(f"expected {expected or 'token'}, got {tok!r}")
        self.i += 1
        return tok

    def expr(self) -> Poly:
        acc = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term(allow_sign=False)
            acc = poly_add(acc, rhs) if op == "+" else poly_sub(acc, rhs)
        return acc

    def term(self, allow_sign=True) -> Poly:
        sign = 1
        if allow_sign:
            while self.peek() in ("+", "-"):
                if self.take() == "-":
                    sign = -sign
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok == "*":
                self.take()
                acc = poly_mul(acc, self.factor())
            elif tok is not None and (tok == "(" or tok == "t" or tok.isdigit()):
                acc = poly_mul(acc, self.factor())
            else:
                break
        return acc if sign == 1 else poly_neg(acc)

    def factor(self) -> Poly:
        base = self.primary()
        if self.peek() == "^":
            self.take()
            exp = self.take()
            if not exp.isdigit():
                raise PolynomialParseError("exponent must be a non-negative integer")
            base = poly_pow(base, int(exp))
        return base

    def primary(self) -> Poly:
        tok = self.take()
        if tok.isdigit():
            return normalize([int(tok)])
        if tok == "t":
            return (Fraction(0), Fraction(1))
        if tok == "(":
            inner = self.expr()
            self.take(")")
            return inner
        if tok == "-":
            return poly_neg(self.primary())
        raise PolynomialParseError(f"unexpected token {tok!r}")


def parse_polynomial(text: str) -> Poly:
    toks = _tokenize(text)
    if not toks:
        raise PolynomialParseError("empty polynomial")
    parser = _Parser(toks)
    result = parser.expr()
    if parser.peek() is not None:
        raise PolynomialParseError(f"trailing input at token {parser.peek()!r}")
    return result


def format_polynomial(p: Sequence, var: str = "t") -> str:
    p = normalize(p)
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        neg = c < 0
        mag = -c if neg else c
        if k == 0:
            body = str(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)

