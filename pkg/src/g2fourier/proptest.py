"""Cross-module property suite.

Every check is registered as a :class:`CheckSpec`; ``run_all`` executes them
with one master seed fanned out per check id, so a rerun with the same seed
reproduces the report exactly.
"""
from __future__ import annotations

import cmath
import math
import random
import xml.etree.ElementTree as ET
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List

from .algebra_core import (
    MonicCubic,
    count_roots,
    discriminant,
    is_totally_real,
    isolate_real_roots,
    poly_deriv,
    poly_eval,
    poly_gcd,
    resultant,
    degree,
)
from .binary_cubics import BinaryCubic, Psd, companion, form_discriminant, psd_classify, trace_map
from .jordan import SymMat3, WVector, charpoly_coeffs, det, dual_sharp_scan, sharp, trace_pair, matmul


@dataclass(frozen=True)
class CheckSpec:
    id: str
    description: str
    anchor: str
    samples: int
    quick_samples: int
    fn: Callable[[random.Random, int], List[dict]]


REGISTRY: Dict[str, CheckSpec] = {}


def check(id, description, anchor, samples=1, quick_samples=None):
    def deco(fn):
        if id in REGISTRY:
            raise ValueError(f"duplicate check id {id}")
        REGISTRY[id] = CheckSpec(id, description, anchor, samples, quick_samples or samples, fn)
        return fn

    return deco


def _rand_cubic(rng, bound=50) -> MonicCubic:
    return MonicCubic(rng.randint(-bound, bound), rng.randint(-bound, bound), rng.randint(-bound, bound))


def _rand_sym(rng, bound=20) -> SymMat3:
    return SymMat3(*(rng.randint(-bound, bound) for _ in range(6)))


def _table_rings():
    from .cli import TABLE

    return [(row, MonicCubic.parse(row.polynomial)) for row in TABLE]


# ---------------------------------------------------------------------------
# algebra_core


@check("algebra.real_root_count", "3 real roots when disc > 0, 1 when disc < 0", "sign of the discriminant", 1000, 200)
def _real_root_count(rng, n):
    bad = []
    for _ in range(n):
        p = _rand_cubic(rng)
        d = discriminant(p)
        if d == 0:
            continue
        k = len(isolate_real_roots(p, Fraction(1, 1000)))
        if k != (3 if d > 0 else 1):
            bad.append({"p": str(p), "roots": k})
    return bad


@check("algebra.disc_resultant", "disc(p) = -Res(p, p') via a Sylvester determinant", "discriminant as a resultant", 1000, 200)
def _disc_res(rng, n):
    bad = []
    for _ in range(n):
        p = _rand_cubic(rng)
        if discriminant(p) != -resultant(p.coeffs, poly_deriv(p.coeffs)):
            bad.append({"p": str(p)})
    return bad


@check("algebra.root_intervals", "every root interval brackets a sign change or a repeated root", "Sturm isolation", 300, 100)
def _root_intervals(rng, n):
    bad = []
    for _ in range(n):
        p = _rand_cubic(rng, 20)
        g = poly_gcd(p.coeffs, poly_deriv(p.coeffs))
        for iv in isolate_real_roots(p, Fraction(1, 100)):
            lo, hi = poly_eval(p.coeffs, iv.lo), poly_eval(p.coeffs, iv.hi)
            ok = lo * hi <= 0
            if not ok and degree(g) >= 1:
                ok = count_roots(g, iv.lo, iv.hi) > 0
            if not ok:
                bad.append({"p": str(p), "interval": [str(iv.lo), str(iv.hi)]})
    return bad


# ---------------------------------------------------------------------------
# jordan


@check("jordan.adjugate", "X X^# = det(X) I", "the sharp map is the adjugate", 1000, 200)
def _adjugate(rng, n):
    bad = []
    for _ in range(n):
        x = _rand_sym(rng)
        d = det(x)
        if matmul(x.rows(), sharp(x).rows()) != [[d if i == j else 0 for j in range(3)] for i in range(3)]:
            bad.append({"x": x.to_json()})
    return bad


@check("jordan.double_sharp", "(X^#)^# = det(X) X", "degree-3 adjugate identity", 1000, 200)
def _double_sharp(rng, n):
    bad = []
    for _ in range(n):
        x = _rand_sym(rng)
        if sharp(sharp(x)).key() != x.scale(det(x)).key():
            bad.append({"x": x.to_json()})
    return bad


@check("jordan.trace_pair", "trace pairing symmetric and bilinear", "trace form", 500, 100)
def _trace_pair(rng, n):
    bad = []
    for _ in range(n):
        x, y, z = _rand_sym(rng), _rand_sym(rng), _rand_sym(rng)
        a, b = rng.randint(-9, 9), rng.randint(-9, 9)
        if trace_pair(x, y) != trace_pair(y, x):
            bad.append({"x": x.to_json(), "y": y.to_json()})
        if trace_pair(x.scale(a) + y.scale(b), z) != a * trace_pair(x, z) + b * trace_pair(y, z):
            bad.append({"x": x.to_json(), "y": y.to_json(), "z": z.to_json()})
    return bad


@check("jordan.dual_sharp", "no half-integral X with X^# in the dual lattice, entries up to 3", "integrality of the sharp map on the dual lattice", 1)
def _dual_sharp(rng, n):
    return [{"bound": b, "x": x.to_json()} for b in range(4) for x in dual_sharp_scan(b)]


# ---------------------------------------------------------------------------
# binary_cubics


@check("cubics.trace_map_companion", "trace map of a rank-one vector has companion det(tI + T)", "rank-one vectors (det T, T^#, T, 1)", 2000, 300)
def _trace_companion(rng, n):
    bad = []
    for _ in range(n):
        t = _rand_sym(rng, 3)
        comp = companion(trace_map(WVector.rank_one_from(t)))
        # independent expansion of det(tI + T) via Newton's identities on the matrix
        m = t.rows()
        tr = sum(m[i][i] for i in range(3))
        m2 = matmul(m, m)
        tr2 = sum(m2[i][i] for i in range(3))
        s2 = (tr * tr - tr2) // 2
        if (comp.a2, comp.a1, comp.a0) != (tr, s2, det(t)):
            bad.append({"t": t.to_json()})
    return bad


@check("cubics.psd", "PSD when the companion is totally real; NOT_PSD when disc < 0 and a != 0", "psd definition", 1000, 200)
def _psd(rng, n):
    bad = []
    for _ in range(n):
        f = BinaryCubic(*(rng.randint(-20, 20) for _ in range(3)), 1)
        if is_totally_real(companion(f)) and psd_classify(f) is not Psd.PSD:
            bad.append({"f": str(f)})
        g = BinaryCubic(*(rng.randint(-20, 20) for _ in range(4)))
        if g.a != 0 and form_discriminant(g) < 0 and psd_classify(g) is not Psd.NOT_PSD:
            bad.append({"f": str(g)})
    return bad


@check("cubics.reversal", "coefficient reversal preserves real projective roots", "psd definition", 1000, 200)
def _reversal(rng, n):
    bad = []
    for _ in range(n):
        f = BinaryCubic(*(rng.randint(-20, 20) for _ in range(4)))
        if f.is_zero():
            continue
        if psd_classify(f) is not psd_classify(f.reversed()):
            bad.append({"f": str(f)})
    return bad


# ---------------------------------------------------------------------------
# qp_kernel


@check("qp.exhaustive", "pruned enumeration equals brute force over [-B, B]^6", "definition of Q_p", 5, 2)
def _exhaustive(rng, n):
    from .algebra_core import max_abs_root_bound
    from .qp_kernel import brute_force_qp, enumerate_qp

    bad = []
    done = 0
    while done < n:
        roots = [rng.randint(-3, 3) for _ in range(3)]
        # p(t) = prod(t + r_i), so the eigenvalues of T are the r_i
        p = MonicCubic(sum(roots), roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2], roots[0] * roots[1] * roots[2])
        bound = max_abs_root_bound(p)
        if bound > 3:
            continue
        done += 1
        fast = [m.key() for m in enumerate_qp(p).matrices]
        slow = [m.key() for m in brute_force_qp(p, bound)]
        if fast != slow:
            bad.append({"p": str(p), "fast": len(fast), "slow": len(slow)})
    return bad


@check("qp.free_action", "trivial stabilizers and 24 | |Q_p| for cubic-field rows", "SO3(Z) acts freely", 1)
def _free(rng, n):
    from .cli import compute_qp

    bad = []
    for row, p in _table_rings():
        if row.structure != "cubic field":
            continue
        res = compute_qp(p)
        if res.total % 24 or any(o.stabilizer_order != 1 for o in res.orbits):
            bad.append({"p": row.polynomial})
    return bad


@check("qp.charpoly_and_partition", "every T has char poly p; orbits partition Q_p", "orbit decomposition", 1)
def _partition(rng, n):
    from .cli import compute_qp

    bad = []
    for row, p in _table_rings():
        res = compute_qp(p)
        if any(charpoly_coeffs(m) != (p.a2, p.a1, p.a0) for m in res.matrices):
            bad.append({"p": row.polynomial, "issue": "charpoly"})
        if sum(o.size for o in res.orbits) != res.total:
            bad.append({"p": row.polynomial, "issue": "partition"})
    return bad


# ---------------------------------------------------------------------------
# cubic_rings


@check("rings.bijection", "pair_to_matrix(matrix_to_pair(T)) is in the orbit of T; orbits stay inequivalent", "matrices versus balanced pairs", 1)
def _bijection(rng, n):
    from .cubic_rings import CubicRing, UndecidedAtCap, matrix_to_pair, pair_to_matrix, pairs_equivalent
    from .qp_kernel import so3z_elements
    from .cli import compute_qp

    group = so3z_elements()
    bad = []
    for row, p in _table_rings():
        res = compute_qp(p)
        if not res.total:
            continue
        ring = CubicRing(p)
        reps = []
        for o in res.orbits:
            orbit = {o.rep.conjugate(g).key() for g in group}
            pair = matrix_to_pair(o.rep, ring)
            reps.append(pair)
            for g in group:
                t = o.rep.conjugate(g)
                q = matrix_to_pair(t, ring)
                if pair_to_matrix(q).key() not in orbit:
                    bad.append({"p": row.polynomial, "t": t.to_json(), "issue": "round trip"})
                try:
                    if not pairs_equivalent(q, pair):
                        bad.append({"p": row.polynomial, "t": t.to_json(), "issue": "orbit not constant"})
                except UndecidedAtCap:
                    bad.append({"p": row.polynomial, "t": t.to_json(), "issue": "undecided"})
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                if pairs_equivalent(reps[i], reps[j]):
                    bad.append({"p": row.polynomial, "issue": f"orbits {i} and {j} equivalent"})
    return bad


@check("rings.ait_identity", "|Q_p| = 24 |Q_R| for irreducible rows", "|Q_p| = |SO3(Z)| |Q_R|", 1)
def _ait(rng, n):
    from .cubic_rings import CubicRing, classes_QR
    from .cli import compute_qp

    bad = []
    for row, p in _table_rings():
        if row.structure != "cubic field":
            continue
        if compute_qp(p).total != 24 * classes_QR(CubicRing(p)).count:
            bad.append({"p": row.polynomial})
    return bad


@check("rings.narrow_class", "|Q_R| = |Cl+[2]| for nonempty maximal field rows", "two-torsion of the narrow class group", 1)
def _narrow(rng, n):
    from .cubic_rings import CubicRing, is_maximal
    from .cli import compute_qp, two_torsion_size

    bad = []
    for row, p in _table_rings():
        res = compute_qp(p)
        if row.structure != "cubic field" or not res.total or not is_maximal(CubicRing(p)):
            continue
        if len(res.orbits) != two_torsion_size(row.class_group):
            bad.append({"p": row.polynomial, "orbits": len(res.orbits), "group": row.class_group})
    return bad


@check("rings.etale_formula", "|Q_p| = (48/|mu2(R)|) |Cl+[2]| delta_R for split rows", "general etale count", 1)
def _etale(rng, n):
    from .cubic_rings import CubicRing, mu2_elements
    from .cli import compute_qp, two_torsion_size

    bad = []
    for row, p in _table_rings():
        if row.structure != "quadratic":
            continue
        res = compute_qp(p)
        mu2 = len(mu2_elements(CubicRing(p)))
        delta = 1 if res.total else 0
        if mu2 != 4 or res.total != (48 // mu2) * two_torsion_size(row.class_group) * delta:
            bad.append({"p": row.polynomial, "total": res.total, "mu2": mu2})
    return bad


@check("rings.stabilizer_mu2", "stabilizer order of T equals |mu2(O_I) with norm 1|", "stabilizers as units of order two", 1)
def _stab(rng, n):
    from .cubic_rings import CubicRing, matrix_to_pair, multiplier_mu2
    from .cli import compute_qp

    bad = []
    for row, p in _table_rings():
        ring = CubicRing(p)
        for o in compute_qp(p).orbits:
            pair = matrix_to_pair(o.rep, ring)
            units = [x for x in multiplier_mu2(pair.ideal) if x.norm() == 1]
            if len(units) != o.stabilizer_order:
                bad.append({"p": row.polynomial, "rep": o.rep.to_json(), "units": len(units)})
    return bad


@check("rings.inverse_different", "trace dual equals (1/p'(theta)) R", "inverse different of a monogenic ring", 100, 30)
def _invdiff(rng, n):
    from .cubic_rings import CubicRing, inverse_different

    bad = []
    done = 0
    while done < n:
        p = _rand_cubic(rng, 30)
        if discriminant(p) <= 0:
            continue
        done += 1
        try:
            d = inverse_different(CubicRing(p))
            if d.norm() != Fraction(1, abs(discriminant(p))):
                bad.append({"p": str(p), "issue": "norm"})
        except AssertionError:
            bad.append({"p": str(p)})
    return bad


# ---------------------------------------------------------------------------
# rootsys_f4


@check("f4.root_strings", "root strings are unbroken", "root strings", 1)
def _strings(rng, n):
    from .rootsys_f4 import build, vadd, vscale

    rs = build()
    roots = set(rs.roots)
    zero = (Fraction(0),) * 4
    bad = []
    for a in rs.roots:
        for b in rs.roots:
            if b == a or b == tuple(-x for x in a):
                continue
            ks = [k for k in range(-4, 5) if vadd(b, vscale(k, a)) in roots or vadd(b, vscale(k, a)) == zero]
            if ks != list(range(min(ks), max(ks) + 1)):
                bad.append({"alpha": rs.coeffs[a], "beta": rs.coeffs[b]})
    return bad


@check("f4.weyl_group", "|W| = 1152 and every root reflection lies in W", "Weyl group of F4", 1)
def _weyl(rng, n):
    from .rootsys_f4 import _reflection_matrix, build, weyl_group, apply

    rs = build()
    w = weyl_group(rs)
    ws = set(w)
    bad = []
    if len(w) != 1152:
        bad.append({"order": len(w)})
    for r in rs.positive:
        if _reflection_matrix(r) not in ws:
            bad.append({"root": rs.coeffs[r]})
    roots = set(rs.roots)
    for g in w[:: max(1, len(w) // 50)]:
        if {apply(g, r) for r in roots} != roots:
            bad.append({"issue": "element does not permute roots"})
    return bad


@check("f4.subsets", "positive roots split as M_R, N, N_S and N = {a1} + Phi_{1,1}", "parabolic root subsets", 1)
def _subsets(rng, n):
    from .rootsys_f4 import build, subsets

    try:
        s = subsets(build())
    except AssertionError as exc:
        return [{"issue": str(exc)}]
    sizes = [len(s.M_R), len(s.U_R), len(s.N), len(s.N_S)]
    return [] if sizes == [3, 21, 15, 6] else [{"sizes": sizes}]


@check("f4.closure", "the four closure statements hold exhaustively", "root combinatorics of the 2-adic subgroups", 1)
def _closure(rng, n):
    from .rootsys_f4 import check_closure_lemmas

    return [c.to_json() for c in check_closure_lemmas() if not c.verified]


@check("f4.nu_exc", "<rho - (w1 + w2)/2, a_i^vee> = 1/m_i", "exceptional exponent", 1)
def _nu(rng, n):
    from .rootsys_f4 import M_VALUES, build, dual_pairings, nu_exc

    rs = build()
    got = dual_pairings(rs, nu_exc(rs))
    want = tuple(Fraction(1, m) for m in M_VALUES)
    return [] if got == want else [{"got": [str(x) for x in got]}]


# ---------------------------------------------------------------------------
# metaplectic


def _meta_check(test_name):
    def fn(rng, n):
        from .metaplectic import Place, selftest

        bad = []
        for place in (Place(2), Place(3), Place(5), Place(7), Place(None)):
            seed = rng.randrange(1 << 30)
            (report,) = selftest(place, n, seed, tests=(test_name,))
            for f in report["failures"]:
                bad.append(dict(f, place=str(place)))
        return bad

    return fn


for _name, _desc in [
    ("cocycle", "Gelbart cocycle condition"),
    ("associativity", "associativity of the SL2 cover"),
    ("torus", "h(s) h(t) = (s, t) h(st)"),
    ("hilbert_properties", "Hilbert symbol symmetry, bimultiplicativity, (a,-a) = 1, (a,b)(-ab,a+b) = 1"),
    ("hilbert_product", "product formula for the Hilbert symbol"),
    ("steinberg_opposite", "opposite unipotent identity"),
    ("conjugation_action", "diag(1, y) acts by automorphisms"),
    ("gl2_cover_relations", "GL2 cover torus relations and the COVER0/COVER1 comparison"),
]:
    check(f"meta.{_name}", _desc, "metaplectic covers of SL2 and GL2", 10000, 500)(_meta_check(_name))


# ---------------------------------------------------------------------------
# whittaker


@check("whittaker.quadrature", "closed forms match quadrature to 1e-10", "integral representation of K_v", 1)
def _quad(rng, n):
    from scipy.integrate import quad

    from .whittaker import HalfInt, bessel_k_half

    bad = []
    for num in (1, 3, 5):
        v = num / 2
        for z in (0.5, 1.0, 2.0, 5.0):
            ref = quad(lambda t: math.exp(-z * math.cosh(t)) * math.cosh(v * t), 0, 40, epsabs=0, epsrel=1e-13, limit=200)[0]
            got = bessel_k_half(HalfInt(num), z)
            if abs(got - ref) > 1e-10 * ref:
                bad.append({"v": v, "z": z, "got": got, "ref": ref})
    return bad


@check("whittaker.recurrence", "K_{v+1} = K_{v-1} + (2v/z) K_v", "three-term recurrence", 200, 50)
def _recur(rng, n):
    from .whittaker import HalfInt, bessel_k_half

    bad = []
    for _ in range(n):
        num = rng.choice([-7, -5, -3, -1, 1, 3, 5, 7])
        z = rng.uniform(0.2, 10)
        v = num / 2
        lhs = bessel_k_half(HalfInt(num + 2), z)
        rhs = bessel_k_half(HalfInt(num - 2), z) + 2 * v / z * bessel_k_half(HalfInt(num), z)
        if abs(lhs - rhs) > 1e-12 * abs(lhs):
            bad.append({"v": v, "z": z})
    return bad


@check("whittaker.ell1", "closed form for n = 1/2 matches the general sum to 1e-12", "l = 1 closed form", 100, 30)
def _ell1(rng, n):
    from .whittaker import ell1_closed_form, whittaker_value

    bad = []
    for _ in range(n):
        nu = rng.uniform(0.1, 5)
        alpha = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        a, b = whittaker_value("1/2", nu, alpha), ell1_closed_form(nu, alpha)
        if any(abs(a[k] - b[k]) > 1e-12 * abs(b[k]) for k in b):
            bad.append({"nu": nu, "alpha": [alpha.real, alpha.imag]})
    return bad


@check("whittaker.antisymmetry", "W(-alpha) = -W(alpha) bit for bit", "sign under the central element", 200, 50)
def _anti(rng, n):
    from .whittaker import whittaker_value

    bad = []
    for _ in range(n):
        nn = f"{rng.choice([1, 3, 5, 7])}/2"
        nu = rng.uniform(0.1, 5)
        alpha = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        a, b = whittaker_value(nn, nu, alpha), whittaker_value(nn, nu, -alpha)
        if any(a[k] != -b[k] for k in a):
            bad.append({"n": nn, "alpha": [alpha.real, alpha.imag]})
    return bad


@check("whittaker.magnitudes", "coefficient magnitudes are phase independent", "unimodular phase", 200, 50)
def _mag(rng, n):
    from .whittaker import HalfInt, bessel_k_half, whittaker_value

    bad = []
    for _ in range(n):
        num = rng.choice([1, 3, 5])
        nu = rng.uniform(0.1, 3)
        r = rng.uniform(0.1, 3)
        alpha = cmath.rect(r, rng.uniform(-math.pi, math.pi))
        vals = whittaker_value(HalfInt(num), nu, alpha)
        for (i, j), c in vals.items():
            expect = nu ** (num / 2 + 1) * bessel_k_half(HalfInt(i - j), r * r) / (math.factorial(i) * math.factorial(j))
            if abs(abs(c) - expect) > 1e-12 * expect:
                bad.append({"n": num / 2, "index": [i, j]})
    return bad


@check("whittaker.decay", "coefficients decrease monotonically for large |alpha|", "exponential decay", 1)
def _decay(rng, n):
    from .whittaker import whittaker_value

    bad = []
    for nn in ("1/2", "3/2", "5/2"):
        prev = None
        for k in range(20):
            r = 3.0 + 0.5 * k
            vals = whittaker_value(nn, 1.0, complex(r, 0))
            mags = {key: abs(v) for key, v in vals.items()}
            if prev is not None and any(mags[key] >= prev[key] for key in mags):
                bad.append({"n": nn, "r": r})
            prev = mags
    return bad


# ---------------------------------------------------------------------------
# runner


def _run_one(args):
    cid, seed, quick = args
    spec = REGISTRY[cid]
    samples = spec.quick_samples if quick else spec.samples
    rng = random.Random(f"{seed}:{cid}")
    try:
        failures = spec.fn(rng, samples)
    except Exception as exc:  # a crash is a failure, not an abort
        failures = [{"exception": f"{type(exc).__name__}: {exc}"}]
    return {
        "id": cid,
        "description": spec.description,
        "anchor": spec.anchor,
        "samples": samples,
        "passed": not failures,
        "failures": failures[:10],
        "failure_count": len(failures),
    }


def run_all(seed: int = 0, quick: bool = False, jobs: int = 1, only=None) -> dict:
    ids = sorted(REGISTRY if only is None else only)
    tasks = [(cid, seed, quick) for cid in ids]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            checks = list(pool.map(_run_one, tasks))
    else:
        checks = [_run_one(t) for t in tasks]
    checks.sort(key=lambda c: c["id"])
    return {"seed": seed, "quick": quick, "passed": all(c["passed"] for c in checks), "checks": checks}


def junit_xml(report: dict) -> str:
    suite = ET.Element(
        "testsuite",
        name="g2fourier.proptest",
        tests=str(len(report["checks"])),
        failures=str(sum(not c["passed"] for c in report["checks"])),
    )
    for c in report["checks"]:
        case = ET.SubElement(suite, "testcase", classname=c["id"].split(".")[0], name=c["id"])
        if not c["passed"]:
            fail = ET.SubElement(case, "failure", message=f"{c['failure_count']} failing samples")
            fail.text = repr(c["failures"])
    return ET.tostring(suite, encoding="unicode")


def write_reports(report: dict, json_path=None, junit_path=None) -> None:
    import json

    if json_path:
        with open(json_path, "w") as fh:
            json.dump(report, fh, indent=2, default=str)
    if junit_path:
        with open(junit_path, "w") as fh:
            fh.write(junit_xml(report))
