"""Binary cubic forms as Fourier-coefficient indices on G2."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .algebra_core import MonicCubic, all_roots_real, normalize
from .jordan import WVector


@dataclass(frozen=True)
class BinaryCubic:
    """``a u^3 + b u^2 v + c u v^2 + d v^3``."""

    a: int
    b: int
    c: int
    d: int

    def __call__(self, u, v):
        return self.a * u ** 3 + self.b * u ** 2 * v + self.c * u * v ** 2 + self.d * v ** 3

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def reversed(self) -> "BinaryCubic":
        """Swap ``u`` and ``v``."""
        return BinaryCubic(self.d, self.c, self.b, self.a)

    def dehomogenized(self):
        """Coefficients of ``f(z, 1)`` from the constant term upward."""
        return normalize([self.d, self.c, self.b, self.a])

    @classmethod
    def parse(cls, text: str) -> "BinaryCubic":
        parts = [s.strip() for s in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected 'a,b,c,d', got {text!r}")
        vals = []
        for s in parts:
            f = Fraction(s)
            if f.denominator != 1:
                raise ValueError(f"non-integral coefficient {s!r}")
            vals.append(int(f))
        return cls(*vals)

    def __str__(self) -> str:
        return f"{self.a},{self.b},{self.c},{self.d}"

    def to_json(self):
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}

    @classmethod
    def from_json(cls, data) -> "BinaryCubic":
        return cls(int(data["a"]), int(data["b"]), int(data["c"]), int(data["d"]))


class Psd(enum.Enum):
    PSD = "PSD"
    NOT_PSD = "NOT_PSD"

    def __str__(self):
        return self.value


def trace_map(w: WVector) -> BinaryCubic:
    """``(a, b, c, d) -> a u^3 + tr(b) u^2 v + tr(c) u v^2 + d v^3``."""
    coeffs = [Fraction(w.a), Fraction(w.b.trace()), Fraction(w.c.trace()), Fraction(w.d)]
    if any(x.denominator != 1 for x in coeffs):
        raise ValueError("trace map of this vector is not integral")
    return BinaryCubic(*(int(x) for x in coeffs))


def companion(f: BinaryCubic) -> MonicCubic:
    """``f(1, t) = t^3 + c t^2 + b t + a`` for forms with ``d = 1``."""
    if f.d != 1:
        raise ValueError("companion cubic needs d = 1")
    return MonicCubic(f.c, f.b, f.a)


def form_discriminant(f: BinaryCubic) -> int:
    a, b, c, d = f.a, f.b, f.c, f.d
    return 18 * a * b * c * d - 4 * b ** 3 * d + b ** 2 * c ** 2 - 4 * a * c ** 3 - 27 * a ** 2 * d ** 2


def psd_classify(f: BinaryCubic) -> Psd:
    """PSD iff ``f(z, 1)`` has no root in the open upper half plane.

    A vanishing leading coefficient puts a root at infinity, which is not in the
    upper half plane, so only the finite roots matter.  Repeated real roots are
    allowed.
    """
    if f.is_zero():
        raise ValueError("the zero form has no classification")
    poly = f.dehomogenized()
    if len(poly) <= 1:
        return Psd.PSD
    return Psd.PSD if all_roots_real(poly) else Psd.NOT_PSD


def projective_roots_real(f: BinaryCubic) -> bool:
    return psd_classify(f) is Psd.PSD
