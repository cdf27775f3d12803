"""Half-integral weight generalized Whittaker functions (binary64).

``W(n, nu, alpha) = nu^(n+1) sum_v (|alpha|/alpha)^(2v) K_v(|alpha|^2)
x^(n+v) y^(n-v) / ((n+v)! (n-v)!)``, the sum over ``v`` in ``-n, -n+1, ..., n``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

from .binary_cubics import BinaryCubic, Psd, psd_classify


@dataclass(frozen=True, order=True)
class HalfInt:
    """``numerator / 2`` with odd numerator."""

    numerator: int

    def __post_init__(self):
        if self.numerator % 2 == 0:
            raise ValueError("half-integers need an odd numerator")

    @classmethod
    def parse(cls, text) -> "HalfInt":
        f = Fraction(str(text).strip())
        if (2 * f).denominator != 1:
            raise ValueError(f"{text!r} is not a half-integer")
        return cls(int(2 * f))

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 2)

    def __float__(self):
        return self.numerator / 2

    def __neg__(self):
        return HalfInt(-self.numerator)

    def __str__(self):
        return f"{self.numerator}/2"


def _k_poly(order: int) -> List[int]:
    """Integer coefficients of ``P`` with ``K_{order+1/2}(z) = K_{1/2}(z) P(1/z)``.

    ``P_0 = 1``; ``P_{k+1}(w) = (1 + (k + 1) w) P_k(w) + w^2 P_k'(w)``, which
    unrolls ``K_{v+1}(z) = (v/z) K_v(z) - K_v'(z)``.
    """
    p = [1]
    for k in range(order):
        nxt = [0] * (len(p) + 1)
        for i, c in enumerate(p):
            nxt[i] += c
            nxt[i + 1] += (k + 1) * c
            if i:
                nxt[i + 1] += i * c
        p = nxt
    return p


def bessel_k_half(v, z: float) -> float:
    """``K_v(z)`` for half-integral ``v`` in closed form."""
    if z <= 0:
        raise ValueError("z must be positive")
    if not isinstance(v, HalfInt):
        v = HalfInt.parse(v)
    order = (abs(v.numerator) - 1) // 2
    base = math.sqrt(math.pi / (2 * z)) * math.exp(-z)
    w = 1.0 / z
    total = 0.0
    for c in reversed(_k_poly(order)):
        total = total * w + float(c)
    return base * total


def _phase_power(phase: complex, k: int) -> complex:
    """``phase^k`` by repeated multiplication; conjugates for negative ``k``."""
    out = complex(1.0, 0.0)
    base = phase if k >= 0 else phase.conjugate()
    for _ in range(abs(k)):
        out *= base
    return out


Coeffs = Dict[Tuple[int, int], complex]


def whittaker_value(n, nu: float, alpha: complex) -> Coeffs:
    """Coefficient of ``x^i y^j`` keyed by ``(i, j) = (n+v, n-v)``."""
    if not isinstance(n, HalfInt):
        n = HalfInt.parse(n)
    if n.numerator < 1:
        raise ValueError("n must be at least 1/2")
    if nu <= 0:
        raise ValueError("nu must be positive")
    alpha = complex(alpha)
    r = abs(alpha)
    if r == 0:
        raise ValueError("alpha must be nonzero")
    phase = alpha.conjugate() / r
    phase /= abs(phase)
    z = r * r
    two_n = n.numerator
    pre = nu ** (float(n) + 1)
    out: Coeffs = {}
    for i in range(two_n + 1):
        # v = i - n, so 2v = 2i - 2n is odd
        vnum = 2 * i - two_n
        kval = bessel_k_half(HalfInt(vnum), z)
        coeff = pre * _phase_power(phase, vnum) * kval / (math.factorial(i) * math.factorial(two_n - i))
        out[(i, two_n - i)] = coeff
    return out


def ell1_closed_form(nu: float, alpha: complex) -> Coeffs:
    """``sqrt(pi nu^3 / 2) e^{-|a|^2}/|a| [(|a|/a) x + (a/|a|) y]``."""
    alpha = complex(alpha)
    r = abs(alpha)
    if r == 0:
        raise ValueError("alpha must be nonzero")
    c = math.sqrt(math.pi * nu ** 3 / 2) * math.exp(-r * r) / r
    u = alpha / r
    return {(1, 0): c * u.conjugate(), (0, 1): c * u}


def scale_index(alpha: complex, scale: float = 1.0) -> complex:
    """Optional normalization factor applied to ``alpha`` (for example ``2 pi``)."""
    return complex(alpha) * scale


class NotPsdError(ValueError):
    pass


def alpha_squared(f: BinaryCubic, z: complex, j_recip_sqrt_sq: float) -> complex:
    """``-j f(z, 1)`` for a PSD form ``f`` and ``Im z > 0``."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    if psd_classify(f) is not Psd.PSD:
        raise NotPsdError("binary cubic is NOT_PSD; alpha^2 would vanish somewhere on the upper half plane")
    val = f.a * z ** 3 + f.b * z ** 2 + f.c * z + f.d
    return -j_recip_sqrt_sq * val


def default_j(z: complex) -> float:
    """``(Im z)^(-1/2)`` for the upper-triangular representative taking ``i`` to ``z``."""
    return complex(z).imag ** -0.5


def track_alpha(f: BinaryCubic, path: Sequence[complex], j_values: Iterable[float] = None) -> List[complex]:
    """Continuous square root of ``alpha_squared`` along ``path``.

    The first point uses the principal square root; each later point picks
    the sign closest to the previous value.  The negated list is the other branch.
    """
    path = [complex(p) for p in path]
    js = list(j_values) if j_values is not None else [default_j(p) for p in path]
    out: List[complex] = []
    for z, j in zip(path, js):
        s = cmath.sqrt(alpha_squared(f, z, j))
        if out and abs(s - out[-1]) > abs(-s - out[-1]):
            s = -s
        out.append(s)
    return out


def coeffs_to_json(c: Coeffs) -> dict:
    return {f"x^{i} y^{j}": [v.real, v.imag] for (i, j), v in sorted(c.items())}
