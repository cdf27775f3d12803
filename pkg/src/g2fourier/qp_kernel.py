"""Enumeration of integral symmetric matrices with a prescribed characteristic polynomial.

``Q_p`` is the set of ``T`` in ``H3(Z)`` with ``det(t I + T) = p(t)``; the
rotation group ``SO3(Z)`` acts on it by ``T -> g T g^t``.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import permutations, product
from math import isqrt
from typing import List, Optional, Tuple

from .algebra_core import MonicCubic, is_totally_real, max_abs_root_bound
from .jordan import SymMat3, charpoly_coeffs


Matrix3 = Tuple[Tuple[int, int, int], Tuple[int, int, int], Tuple[int, int, int]]


def _det3(m) -> int:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def so3z_elements() -> List[Matrix3]:
    """The 24 signed permutation matrices of determinant one."""
    out = []
    for perm in permutations(range(3)):
        for signs in product((1, -1), repeat=3):
            m = tuple(tuple(signs[i] if j == perm[i] else 0 for j in range(3)) for i in range(3))
            if _det3(m) == 1:
                out.append(m)
    return sorted(out, reverse=True)


@dataclass(frozen=True)
class Orbit:
    rep: SymMat3
    size: int
    stabilizer_order: int

    def to_json(self):
        return {"rep": self.rep.to_json(), "size": self.size, "stabilizer_order": self.stabilizer_order}


@dataclass(frozen=True)
class QpResult:
    polynomial: MonicCubic
    matrices: Tuple[SymMat3, ...]
    orbits: Optional[Tuple[Orbit, ...]] = None

    @property
    def total(self) -> int:
        return len(self.matrices)

    def to_json(self) -> dict:
        out = {"polynomial": str(self.polynomial), "total": self.total}
        if self.orbits is not None:
            out["orbits"] = [o.to_json() for o in self.orbits]
        out["matrices"] = [m.to_json() for m in self.matrices]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "QpResult":
        poly = MonicCubic.parse(data["polynomial"])
        mats = tuple(SymMat3.from_json(m) for m in data.get("matrices", []))
        orbits = None
        if "orbits" in data:
            orbits = tuple(
                Orbit(SymMat3.from_json(o["rep"]), int(o["size"]), int(o["stabilizer_order"]))
                for o in data["orbits"]
            )
        res = cls(poly, mats, orbits)
        if res.total != int(data["total"]):
            raise ValueError("total does not match the stored matrices")
        return res


def _scan_diagonal(args) -> List[SymMat3]:
    """All matrices in Q_p whose first diagonal entry is ``d1``."""
    d1, a2, a1, a0, bound = args
    found = []
    for d2 in range(-bound, bound + 1):
        d3 = a2 - d1 - d2
        if abs(d3) > bound:
            continue
        # sigma2 = d1 d2 + d1 d3 + d2 d3 - (o23^2 + o13^2 + o12^2)
        s = d1 * d2 + d1 * d3 + d2 * d3 - a1
        if s < 0:
            continue
        lim12 = min(bound, isqrt(s))
        for o12 in range(-lim12, lim12 + 1):
            r12 = s - o12 * o12
            lim13 = min(bound, isqrt(r12))
            for o13 in range(-lim13, lim13 + 1):
                rem = r12 - o13 * o13
                o23 = isqrt(rem)
                if o23 * o23 != rem or o23 > bound:
                    continue
                for x in ((o23, -o23) if o23 else (0,)):
                    det = d1 * d2 * d3 + 2 * o12 * x * o13 - d1 * x * x - d2 * o13 * o13 - d3 * o12 * o12
                    if det == a0:
                        found.append(SymMat3(d1, d2, d3, x, o13, o12))
    return found


def enumerate_qp(p: MonicCubic, jobs: int = 1) -> QpResult:
    """Exhaustive list of ``Q_p`` in canonical order.

    Entries are bounded by the spectral radius, i.e. the largest absolute root
    of ``p``.  ``jobs > 1`` splits the first diagonal entry across processes.
    """
    if not is_totally_real(p):
        return QpResult(p, ())
    bound = max_abs_root_bound(p)
    tasks = [(d1, p.a2, p.a1, p.a0, bound) for d1 in range(-bound, bound + 1)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_scan_diagonal, tasks))
    else:
        chunks = [_scan_diagonal(t) for t in tasks]
    mats = sorted((m for chunk in chunks for m in chunk), key=SymMat3.key)
    target = (p.a2, p.a1, p.a0)
    for m in mats:
        if charpoly_coeffs(m) != target:
            raise AssertionError(f"enumerated matrix {m} has the wrong characteristic polynomial")
    return QpResult(p, tuple(mats))


def brute_force_qp(p: MonicCubic, bound: int) -> List[SymMat3]:
    """Unpruned scan of the box ``[-bound, bound]^6``; test oracle only."""
    target = (p.a2, p.a1, p.a0)
    rng = range(-bound, bound + 1)
    out = []
    for entries in product(rng, repeat=6):
        m = SymMat3(*entries)
        if charpoly_coeffs(m) == target:
            out.append(m)
    return sorted(out, key=SymMat3.key)


def stabilizer(t: SymMat3, group=None) -> List[Matrix3]:
    group = so3z_elements() if group is None else group
    return [g for g in group if t.conjugate(g) == t]


def orbit_decompose(result: QpResult) -> QpResult:
    group = so3z_elements()
    remaining = {m.key(): m for m in result.matrices}
    orbits = []
    while remaining:
        start = remaining[min(remaining)]
        images = {}
        stab = 0
        for g in group:
            img = start.conjugate(g)
            images[img.key()] = img
            if img == start:
                stab += 1
        for k in images:
            if k not in remaining:
                raise AssertionError("orbit leaves the enumerated set")
            del remaining[k]
        rep = images[min(images)]
        orbits.append(Orbit(rep, len(images), stab))
        if len(images) * stab != len(group):
            raise AssertionError("orbit-stabilizer count is off")
    orbits.sort(key=lambda o: o.rep.key())
    return replace(result, orbits=tuple(orbits))
