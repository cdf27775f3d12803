"""The F4 root system in exact rational coordinates.

Simple roots follow Bourbaki: ``a1 = e2 - e3``, ``a2 = e3 - e4``, ``a3 = e4``,
``a4 = (e1 - e2 - e3 - e4)/2``.  Long roots then already have squared length 2
and short roots squared length 1, so no rescaling is needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Dict, FrozenSet, List, Optional, Tuple

Vec = Tuple[Fraction, Fraction, Fraction, Fraction]

M_VALUES = (2, 2, 1, 1)
G2_LATTICE_DIMS = {"trace_zero_matrices": 8, "vector": 3, "dual_vector": 3}


def vec(*xs) -> Vec:
    return tuple(Fraction(x) for x in xs)


def dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vadd(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u: Vec) -> Vec:
    return tuple(Fraction(c) * a for a in u)


def coroot(a: Vec) -> Vec:
    return vscale(Fraction(2) / dot(a, a), a)


def reflect(v: Vec, a: Vec) -> Vec:
    return vsub(v, vscale(dot(v, coroot(a)), a))


def _solve4(cols: List[Vec], target: Vec) -> List[Fraction]:
    n = 4
    m = [[cols[j][i] for j in range(n)] + [target[i]] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        pv = m[c][c]
        m[c] = [x / pv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[i][n] for i in range(n)]


class RootSystemF4:
    def __init__(self):
        self.simple: Tuple[Vec, ...] = (
            vec(0, 1, -1, 0),
            vec(0, 0, 1, -1),
            vec(0, 0, 0, 1),
            vec(Fraction(1, 2), Fraction(-1, 2), Fraction(-1, 2), Fraction(-1, 2)),
        )
        roots = set()
        for i in range(4):
            for s in (1, -1):
                e = [0] * 4
                e[i] = s
                roots.add(vec(*e))
        for i, j in combinations(range(4), 2):
            for si, sj in product((1, -1), repeat=2):
                e = [0] * 4
                e[i], e[j] = si, sj
                roots.add(vec(*e))
        for signs in product((1, -1), repeat=4):
            roots.add(vec(*(Fraction(s, 2) for s in signs)))
        self.coeffs: Dict[Vec, Tuple[int, ...]] = {}
        for r in roots:
            c = _solve4(list(self.simple), r)
            if any(x.denominator != 1 for x in c):
                raise AssertionError("root is not an integral combination of simple roots")
            c = tuple(int(x) for x in c)
            if not (all(x >= 0 for x in c) or all(x <= 0 for x in c)):
                raise AssertionError("root has mixed-sign simple coefficients")
            self.coeffs[r] = c
        self.roots: Tuple[Vec, ...] = tuple(sorted(roots, key=lambda r: (self.height(r), self.coeffs[r])))

    def height(self, r: Vec) -> int:
        return sum(self.coeffs[r])

    def m(self, r: Vec, i: int) -> int:
        """Coefficient of simple root ``i`` (1-based) in ``r``."""
        return self.coeffs[r][i - 1]

    def is_root(self, v: Vec) -> bool:
        return v in self.coeffs

    def from_coeffs(self, c) -> Vec:
        out = vec(0, 0, 0, 0)
        for k, a in zip(c, self.simple):
            out = vadd(out, vscale(k, a))
        return out

    @cached_property
    def positive(self) -> Tuple[Vec, ...]:
        return tuple(r for r in self.roots if self.height(r) > 0)

    @cached_property
    def negative(self) -> Tuple[Vec, ...]:
        return tuple(r for r in self.roots if self.height(r) < 0)

    @cached_property
    def highest_root(self) -> Vec:
        return max(self.positive, key=self.height)

    def long_roots(self):
        return [r for r in self.roots if dot(r, r) == 2]

    def short_roots(self):
        return [r for r in self.roots if dot(r, r) == 1]


def build() -> RootSystemF4:
    return RootSystemF4()


@dataclass(frozen=True)
class Subsets:
    M_R: FrozenSet[Vec]
    U_R: FrozenSet[Vec]
    N: FrozenSet[Vec]
    N_S: FrozenSet[Vec]
    Phi11: FrozenSet[Vec]
    U_Q: FrozenSet[Vec]

    def negated(self, name: str) -> FrozenSet[Vec]:
        return frozenset(tuple(-x for x in r) for r in getattr(self, name))


def subsets(rs: RootSystemF4) -> Subsets:
    pos = rs.positive
    m1 = lambda r: rs.m(r, 1)
    m2 = lambda r: rs.m(r, 2)
    s = Subsets(
        M_R=frozenset(r for r in pos if m1(r) == 0 and m2(r) == 0),
        U_R=frozenset(r for r in pos if m1(r) > 0 or m2(r) > 0),
        N=frozenset(r for r in pos if m1(r) >= 1),
        N_S=frozenset(r for r in pos if m1(r) == 0 and m2(r) == 1),
        Phi11=frozenset(r for r in pos if m1(r) > 0 and m2(r) > 0),
        U_Q=frozenset(r for r in pos if m2(r) >= 1),
    )
    a1 = rs.simple[0]
    if s.U_R != s.N | s.N_S or s.N & s.N_S:
        raise AssertionError("U_R is not the disjoint union of N and N_S")
    if s.U_R != s.U_Q | {a1} or a1 in s.U_Q:
        raise AssertionError("U_R is not the disjoint union of {a1} and U_Q")
    if s.N != s.Phi11 | {a1} or a1 in s.Phi11:
        raise AssertionError("N is not the disjoint union of {a1} and Phi_{1,1}")
    if set(pos) != s.M_R | s.U_R or s.M_R & s.U_R:
        raise AssertionError("positive roots do not split as M_R and U_R")
    return s


@dataclass
class ClosureCheck:
    check_id: str
    statement: str
    verified: bool
    counterexamples: List[dict]

    def to_json(self):
        return {
            "check_id": self.check_id,
            "statement": self.statement,
            "verified": self.verified,
            "counterexamples": self.counterexamples,
        }


def _ab_range(rs: RootSystemF4):
    h = rs.height(rs.highest_root)
    return [(a, b) for a in range(1, h + 1) for b in range(1, h + 1)]


def _fmt(rs: RootSystemF4, r: Vec) -> List[int]:
    return list(rs.coeffs[r])


def check_i(rs, sub) -> ClosureCheck:
    bad = []
    neg_u = sub.negated("U_R")
    m_all = sub.M_R | sub.negated("M_R")
    for beta in neg_u:
        for alpha in m_all:
            for a, b in _ab_range(rs):
                g = vadd(vscale(a, alpha), vscale(b, beta))
                if rs.is_root(g) and g not in neg_u:
                    bad.append({"alpha": _fmt(rs, alpha), "beta": _fmt(rs, beta), "a": a, "b": b, "gamma": _fmt(rs, g)})
    return ClosureCheck("i", "a*alpha + b*beta stays in the negative unipotent radical for alpha in M_R roots, beta in -U_R", not bad, bad)


def check_ii(rs, sub) -> ClosureCheck:
    bad = []
    neg = set(rs.negative)
    for ai in rs.simple[:2]:
        for alpha in sub.U_R:
            if alpha == ai:
                continue
            for a, b in _ab_range(rs):
                g = vsub(vscale(a, ai), vscale(b, alpha))
                if rs.is_root(g) and g not in neg:
                    bad.append({"alpha_i": _fmt(rs, ai), "alpha": _fmt(rs, alpha), "a": a, "b": b, "gamma": _fmt(rs, g)})
    return ClosureCheck("ii", "a*alpha_i - b*alpha is negative when a root, for i in {1,2} and alpha in U_R other than alpha_i", not bad, bad)


def check_iii(rs, sub, domain: str = "N_S") -> ClosureCheck:
    bad = []
    a1 = rs.simple[0]
    for alpha in getattr(sub, domain):
        for a, b in _ab_range(rs):
            g = vsub(vscale(a, a1), vscale(b, alpha))
            if rs.is_root(g):
                bad.append({"alpha": _fmt(rs, alpha), "a": a, "b": b, "gamma": _fmt(rs, g)})
    return ClosureCheck("iii" if domain == "N_S" else f"iii[{domain}]", f"a*alpha_1 - b*alpha is never a root for alpha in {domain}", not bad, bad)


def check_iv(rs, sub) -> ClosureCheck:
    bad = []
    a2 = rs.simple[1]
    pos = set(rs.positive)
    for beta in sub.N_S:
        if beta == a2:
            continue
        for a, b in _ab_range(rs):
            g = vsub(vscale(a, beta), vscale(b, a2))
            if rs.is_root(g) and g not in pos:
                bad.append({"beta": _fmt(rs, beta), "a": a, "b": b, "gamma": _fmt(rs, g)})
    return ClosureCheck("iv", "a*beta - b*alpha_2 is positive when a root, for beta in N_S other than alpha_2", not bad, bad)


def check_closure_lemmas(rs: Optional[RootSystemF4] = None) -> List[ClosureCheck]:
    rs = rs or build()
    sub = subsets(rs)
    return [check_i(rs, sub), check_ii(rs, sub), check_iii(rs, sub), check_iv(rs, sub)]


# ---------------------------------------------------------------------------
# Weyl group

Matrix4 = Tuple[Tuple[Fraction, ...], ...]


def _reflection_matrix(a: Vec) -> Matrix4:
    basis = [vec(*(1 if i == j else 0 for j in range(4))) for i in range(4)]
    cols = [reflect(e, a) for e in basis]
    return tuple(tuple(cols[j][i] for j in range(4)) for i in range(4))


def apply(m: Matrix4, v: Vec) -> Vec:
    return tuple(sum((m[i][j] * v[j] for j in range(4)), Fraction(0)) for i in range(4))


def compose(a: Matrix4, b: Matrix4) -> Matrix4:
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(4)), Fraction(0)) for j in range(4)) for i in range(4))


def weyl_group(rs: Optional[RootSystemF4] = None) -> List[Matrix4]:
    """All elements, generated by breadth-first search from the simple reflections."""
    rs = rs or build()
    gens = [_reflection_matrix(a) for a in rs.simple]
    ident = tuple(tuple(Fraction(int(i == j)) for j in range(4)) for i in range(4))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for s in gens:
                ws = compose(s, w)
                if ws not in seen:
                    seen.add(ws)
                    nxt.append(ws)
        frontier = nxt
    return sorted(seen)


# ---------------------------------------------------------------------------
# weights


def rho_and_fundamental_weights(rs: Optional[RootSystemF4] = None) -> Tuple[Vec, List[Vec]]:
    """``(rho, [w1, w2, w3, w4])`` with ``<w_i, a_j^vee> = delta_ij``."""
    rs = rs or build()
    cor = [coroot(a) for a in rs.simple]
    # rows of the system are the coroots; solve for each omega
    rows = cor
    omegas = []
    for i in range(4):
        target = vec(*(1 if j == i else 0 for j in range(4)))
        cols = [tuple(rows[r][c] for r in range(4)) for c in range(4)]
        omegas.append(tuple(_solve4(cols, target)))
    rho = vec(0, 0, 0, 0)
    for w in omegas:
        rho = vadd(rho, w)
    return rho, omegas


def nu_exc(rs: Optional[RootSystemF4] = None) -> Vec:
    """``rho - (w1 + w2)/2``."""
    rho, om = rho_and_fundamental_weights(rs)
    return vsub(rho, vscale(Fraction(1, 2), vadd(om[0], om[1])))


def dual_pairings(rs: RootSystemF4, v: Vec) -> Tuple[Fraction, ...]:
    return tuple(dot(v, coroot(a)) for a in rs.simple)


def dot_action(w: Matrix4, lam: Vec, rho: Vec) -> Vec:
    return vsub(apply(w, vadd(lam, rho)), rho)


def find_dot_witnesses(rs: Optional[RootSystemF4] = None, group=None) -> List[Matrix4]:
    """Every ``w`` with ``w . (-(3/2) w1) = -(w1 + w2)/2``, sorted."""
    rs = rs or build()
    group = weyl_group(rs) if group is None else group
    rho, om = rho_and_fundamental_weights(rs)
    lam = vscale(Fraction(-3, 2), om[0])
    target = vscale(Fraction(-1, 2), vadd(om[0], om[1]))
    return sorted(w for w in group if dot_action(w, lam, rho) == target)


def find_dot_witness(rs: Optional[RootSystemF4] = None, group=None) -> Optional[Matrix4]:
    ws = find_dot_witnesses(rs, group)
    return ws[0] if ws else None


def g2_and_sl3_subsystems(rs: Optional[RootSystemF4] = None) -> dict:
    """The A2 subsystem spanned by ``a3, a4`` and the G2 lattice dimension tag."""
    rs = rs or build()
    a2_roots = sorted(r for r in rs.roots if rs.m(r, 1) == 0 and rs.m(r, 2) == 0)
    return {
        "sl3_roots": a2_roots,
        "sl3_simple": (rs.simple[2], rs.simple[3]),
        "g2_lattice_dims": dict(G2_LATTICE_DIMS),
        "g2_lattice_rank": sum(G2_LATTICE_DIMS.values()),
    }


def matrix_to_json(w: Matrix4):
    return [[str(x) for x in row] for row in w]
