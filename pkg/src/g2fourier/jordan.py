"""The cubic norm structure of 3x3 symmetric matrices over Z and its dual lattice."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List, Sequence, Tuple


@dataclass(frozen=True)
class SymMat3:
    """Symmetric 3x3 matrix stored as diagonal ``d1, d2, d3`` and off-diagonal ``o23, o13, o12``.

    Entries are normally ``int``; ``sharp`` and friends may produce ``Fraction``
    entries when applied to half-integral input.
    """

    d1: object
    d2: object
    d3: object
    o23: object
    o13: object
    o12: object

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "SymMat3":
        for i in range(3):
            for j in range(3):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("matrix is not symmetric")
        return cls(rows[0][0], rows[1][1], rows[2][2], rows[1][2], rows[0][2], rows[0][1])

    @classmethod
    def diag(cls, a, b, c) -> "SymMat3":
        return cls(a, b, c, 0, 0, 0)

    @classmethod
    def identity(cls) -> "SymMat3":
        return cls(1, 1, 1, 0, 0, 0)

    @classmethod
    def zero(cls) -> "SymMat3":
        return cls(0, 0, 0, 0, 0, 0)

    def rows(self) -> Tuple[Tuple, Tuple, Tuple]:
        return (
            (self.d1, self.o12, self.o13),
            (self.o12, self.d2, self.o23),
            (self.o13, self.o23, self.d3),
        )

    def key(self) -> Tuple:
        """Canonical sort key ``(d1, d2, d3, o23, o13, o12)``."""
        return (self.d1, self.d2, self.d3, self.o23, self.o13, self.o12)

    def __lt__(self, other: "SymMat3") -> bool:
        return self.key() < other.key()

    def entries(self) -> Tuple:
        return self.key()

    def trace(self):
        return self.d1 + self.d2 + self.d3

    def is_integral(self) -> bool:
        return all(Fraction(x).denominator == 1 for x in self.entries())

    def in_dual_lattice(self) -> bool:
        """Integral diagonal and half-integral off-diagonal."""
        diag_ok = all(Fraction(x).denominator == 1 for x in (self.d1, self.d2, self.d3))
        off_ok = all((2 * Fraction(x)).denominator == 1 for x in (self.o23, self.o13, self.o12))
        return diag_ok and off_ok

    def __add__(self, other: "SymMat3") -> "SymMat3":
        return SymMat3(*(a + b for a, b in zip(self.entries(), other.entries())))

    def scale(self, c) -> "SymMat3":
        return SymMat3(*(c * a for a in self.entries()))

    def conjugate(self, g: Sequence[Sequence[int]]) -> "SymMat3":
        """``g X g^t``."""
        x = self.rows()
        gx = [[sum(g[i][k] * x[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
        out = [[sum(gx[i][k] * g[j][k] for k in range(3)) for j in range(3)] for i in range(3)]
        return SymMat3.from_rows(out)

    def to_json(self) -> List[List]:
        return [[_json_num(v) for v in row] for row in self.rows()]

    @classmethod
    def from_json(cls, data) -> "SymMat3":
        return cls.from_rows([[_parse_num(v) for v in row] for row in data])


def _json_num(v):
    v = Fraction(v)
    if v.denominator == 1:
        return int(v)
    return f"{v.numerator}/{v.denominator}"


def _parse_num(v):
    if isinstance(v, str):
        f = Fraction(v)
        return int(f) if f.denominator == 1 else f
    return v


class HalfSymMat3(SymMat3):
    """Element of the dual lattice: integral diagonal, off-diagonal in (1/2)Z."""

    def __init__(self, d1, d2, d3, o23, o13, o12):
        vals = [Fraction(v) for v in (d1, d2, d3, o23, o13, o12)]
        vals = [int(v) if v.denominator == 1 else v for v in vals]
        super().__init__(*vals)
        if not self.in_dual_lattice():
            raise ValueError("not in the dual lattice of H3(Z)")

    @classmethod
    def from_sym(cls, x: SymMat3) -> "HalfSymMat3":
        return cls(*x.entries())


def det(x: SymMat3):
    return (
        x.d1 * x.d2 * x.d3
        + 2 * x.o12 * x.o23 * x.o13
        - x.d1 * x.o23 ** 2
        - x.d2 * x.o13 ** 2
        - x.d3 * x.o12 ** 2
    )


def sharp(x: SymMat3) -> SymMat3:
    """Adjugate, so that ``x * sharp(x) = det(x) * I``."""
    return SymMat3(
        x.d2 * x.d3 - x.o23 ** 2,
        x.d1 * x.d3 - x.o13 ** 2,
        x.d1 * x.d2 - x.o12 ** 2,
        x.o12 * x.o13 - x.d1 * x.o23,
        x.o12 * x.o23 - x.d2 * x.o13,
        x.o13 * x.o23 - x.d3 * x.o12,
    )


def trace_pair(x: SymMat3, y: SymMat3):
    """``tr(xy)``."""
    return (
        x.d1 * y.d1 + x.d2 * y.d2 + x.d3 * y.d3
        + 2 * (x.o23 * y.o23 + x.o13 * y.o13 + x.o12 * y.o12)
    )


def sigma2(x: SymMat3):
    """Second elementary symmetric function of the eigenvalues (``= tr(x^#)``)."""
    return sharp(x).trace()


def charpoly_coeffs(x: SymMat3) -> Tuple:
    """Coefficients ``(a2, a1, a0)`` of ``det(t I + x) = t^3 + a2 t^2 + a1 t + a0``."""
    return (x.trace(), sigma2(x), det(x))


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]):
    return [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


@dataclass(frozen=True)
class WVector:
    """``(a, b, c, d)`` in ``Z + J0^v + J0^v + Z``."""

    a: int
    b: SymMat3
    c: SymMat3
    d: int

    @classmethod
    def rank_one_from(cls, t: SymMat3) -> "WVector":
        return cls(det(t), sharp(t), t, 1)

    def to_json(self):
        return {"a": _json_num(self.a), "b": self.b.to_json(), "c": self.c.to_json(), "d": _json_num(self.d)}


class GeneralRankUnsupported(ValueError):
    pass


def rank_one_d1(w: WVector) -> bool:
    """Whether ``w = (det c, c^#, c, 1)``."""
    if w.d != 1:
        raise GeneralRankUnsupported("general-rank unsupported: only d = 1 is handled")
    return w.b.key() == sharp(w.c).key() and w.a == det(w.c)


def dual_sharp_scan(bound: int) -> List[HalfSymMat3]:
    """Scan the dual lattice box for ``X`` with ``X^#`` dual but ``X`` not integral.

    Works with doubled off-diagonal entries ``h = 2 o`` to stay in integers:
    ``(X^#)_ii = d_j d_k - h_jk^2 / 4`` and ``(X^#)_ij = (h_ik h_jk - 2 d_k h_ij) / 4``.
    Returns the counterexamples, expected to be none.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    diag = range(-bound, bound + 1)
    halves = range(-2 * bound, 2 * bound + 1)
    bad = []
    for d1, d2, d3 in product(diag, repeat=3):
        for h23, h13, h12 in product(halves, repeat=3):
            if h23 % 2 == 0 and h13 % 2 == 0 and h12 % 2 == 0:
                continue  # X already integral
            if (h23 * h23) % 4 or (h13 * h13) % 4 or (h12 * h12) % 4:
                continue
            if (h12 * h13 - 2 * d1 * h23) % 2:
                continue
            if (h12 * h23 - 2 * d2 * h13) % 2:
                continue
            if (h13 * h23 - 2 * d3 * h12) % 2:
                continue
            bad.append(HalfSymMat3(d1, d2, d3, Fraction(h23, 2), Fraction(h13, 2), Fraction(h12, 2)))
    return bad
