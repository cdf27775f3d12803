"""Command line entry point: ``g2fourier <command> ...``.

Exit codes: 0 success, 2 usage or parse error, 3 internal invariant violation,
4 mismatch against embedded expectations.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from . import __version__
from .algebra_core import MonicCubic, PolynomialParseError, is_totally_real
from .binary_cubics import BinaryCubic, companion, psd_classify
from .cubic_rings import CubicRing, classes_QR, is_maximal, mu2_elements
from .qp_kernel import QpResult, enumerate_qp, orbit_decompose

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_MISMATCH = 0, 2, 3, 4
CACHE_ENV = "G2FOURIER_CACHE"


@dataclass(frozen=True)
class TableRow:
    polynomial: str
    structure: str  # "cubic field" or "quadratic"
    expected: int
    class_group: str


TABLE = (
    TableRow("t^3-t^2-2t+1", "cubic field", 24, "1"),
    TableRow("t^3-3t-1", "cubic field", 24, "1"),
    TableRow("t^3-t^2-3t+1", "cubic field", 24, "1"),
    TableRow("t^3-t^2-9t+10", "cubic field", 48, "C4"),
    TableRow("t^3-t^2-14t+23", "cubic field", 48, "C4"),
    TableRow("t^3-t^2-11t+12", "cubic field", 48, "C4"),
    TableRow("t^3-t^2-12t-1", "cubic field", 48, "C4"),
    TableRow("t^3-5t-1", "cubic field", 24, "1"),
    TableRow("t^3-t^2-9t+8", "cubic field", 0, "C6"),
    TableRow("t^3-21t-35", "cubic field", 24, "C3"),
    TableRow("(t-1)(t^2-2)", "quadratic", 12, "1"),
    TableRow("(t-2)(t^2-3)", "quadratic", 0, "C2"),
    TableRow("(t-3)(t^2-10)", "quadratic", 24, "C2"),
    TableRow("t^3-t^2-54t+169", "cubic field", 96, "C2 x C2"),
    TableRow("t^3-t^2-34t-57", "cubic field", 96, "C4 x C2"),
)


def parse_group(desc: str) -> List[int]:
    """Cyclic factor orders from a descriptor such as ``"C4 x C2"`` or ``"1"``."""
    s = desc.strip()
    if s in ("1", "", "trivial"):
        return []
    parts = re.split(r"\s*(?:x|×|\*)\s*", s)
    out = []
    for part in parts:
        m = re.fullmatch(r"C_?\{?(\d+)\}?", part.strip())
        if not m:
            raise ValueError(f"cannot parse group descriptor {desc!r}")
        out.append(int(m.group(1)))
    return out


def two_torsion_size(desc: str) -> int:
    return 2 ** sum(1 for n in parse_group(desc) if n % 2 == 0)


# ---------------------------------------------------------------------------
# cache


def cache_root(flag: Optional[str] = None) -> Path:
    if flag:
        base = Path(flag)
    elif os.environ.get(CACHE_ENV):
        base = Path(os.environ[CACHE_ENV])
    else:
        base = Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "g2fourier"
    return base / f"v{__version__}"


def cache_key(p: MonicCubic) -> str:
    return hashlib.sha256(str(p).encode()).hexdigest()


def cache_load(root: Path, p: MonicCubic) -> Optional[QpResult]:
    path = root / f"{cache_key(p)}.json"
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
        if data.get("version") != __version__ or data.get("hash") != cache_key(p):
            return None
        return QpResult.from_json(data["result"])
    except (ValueError, KeyError):
        return None


def cache_store(root: Path, result: QpResult) -> None:
    root.mkdir(parents=True, exist_ok=True)
    entry = {
        "hash": cache_key(result.polynomial),
        "version": __version__,
        "timestamp": time.time(),
        "result": result.to_json(),
    }
    path = root / f"{entry['hash']}.json"
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(entry, sort_keys=True))
    tmp.replace(path)


def compute_qp(p: MonicCubic, jobs: int = 1, cache: Optional[Path] = None) -> QpResult:
    """Enumeration with orbit decomposition, through the cache when given."""
    if cache is not None:
        hit = cache_load(cache, p)
        if hit is not None and hit.orbits is not None:
            return hit
    res = orbit_decompose(enumerate_qp(p, jobs=jobs))
    if cache is not None:
        cache_store(cache, res)
    return res


# ---------------------------------------------------------------------------
# commands


def _emit(obj, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")
        return
    rows = obj if isinstance(obj, list) else [obj]
    flat = [{k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()} for r in rows]
    keys = []
    for r in flat:
        keys.extend(k for k in r if k not in keys)
    w = csv.DictWriter(out, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    w.writerows(flat)


def _cache_from(args) -> Optional[Path]:
    return None if args.no_cache else cache_root(args.cache_dir)


def cmd_qp(args) -> int:
    p = MonicCubic.parse(args.polynomial)
    res = compute_qp(p, args.jobs, _cache_from(args))
    if args.count:
        print(res.total)
        return EXIT_OK
    out = {"polynomial": str(p), "total": res.total}
    if args.orbits or not args.list:
        out["orbits"] = [o.to_json() for o in res.orbits]
    if args.list:
        out["matrices"] = [m.to_json() for m in res.matrices]
    _emit(out, args.format)
    return EXIT_OK


def cmd_coeff(args) -> int:
    f = BinaryCubic.parse(args.form)
    if f.d != 1:
        print("error: only forms with d = 1 are supported", file=sys.stderr)
        return EXIT_USAGE
    p = companion(f)
    res = compute_qp(p, args.jobs, _cache_from(args))
    n_orbits = len(res.orbits)
    out = {
        "form": str(f),
        "polynomial": str(p),
        "magnitude": res.total,
        "sign": "undetermined",
        "orbits": n_orbits,
    }
    ring = CubicRing(p)
    if ring.disc != 0:
        out["delta"] = 1 if res.total else 0
        irreducible = len(mu2_elements(ring)) == 2
        out["maximal"] = is_maximal(ring)
        if out["maximal"] and irreducible and res.total:
            out["narrow_class_two_torsion"] = n_orbits
    _emit(out, args.format)
    return EXIT_OK


def check_table_row(row: TableRow, cache: Optional[Path] = None, jobs: int = 1) -> dict:
    """Recompute one row and every structural identity attached to it."""
    p = MonicCubic.parse(row.polynomial)
    res = compute_qp(p, jobs, cache)
    ring = CubicRing(p)
    checks = {"count": res.total == row.expected}
    checks["maximal"] = is_maximal(ring)
    cl2 = two_torsion_size(row.class_group)
    n_orbits = len(res.orbits)
    stabs = sorted({o.stabilizer_order for o in res.orbits})
    if row.structure == "cubic field":
        checks["free_action"] = all(o.stabilizer_order == 1 for o in res.orbits)
        checks["divisible_by_24"] = res.total % 24 == 0
        if res.total and checks["maximal"]:
            checks["class_group_two_torsion"] = n_orbits == cl2
    else:
        mu2 = len(mu2_elements(ring))
        delta = 1 if res.total else 0
        checks["etale_formula"] = res.total == (48 // mu2) * cl2 * delta
        checks["stabilizer_two"] = all(o.stabilizer_order == 2 for o in res.orbits)
    return {
        "polynomial": row.polynomial,
        "expected": row.expected,
        "computed": res.total,
        "orbits": n_orbits,
        "stabilizers": stabs,
        "class_group": row.class_group,
        "checks": checks,
        "pass": all(checks.values()),
    }


def cmd_table(args) -> int:
    reports = [check_table_row(r, _cache_from(args), args.jobs) for r in TABLE]
    if args.format == "json":
        _emit(reports, "json")
    else:
        for r in reports:
            status = "PASS" if r["pass"] else "FAIL"
            bad = [k for k, v in r["checks"].items() if not v]
            extra = f"  failed: {', '.join(bad)}" if bad else ""
            print(f"{status}  {r['polynomial']:<18} expected {r['expected']:>3}  got {r['computed']:>3}{extra}")
        print(f"{sum(r['pass'] for r in reports)}/{len(reports)} rows pass")
    return EXIT_OK if all(r["pass"] for r in reports) else EXIT_MISMATCH


def cmd_psd(args) -> int:
    f = BinaryCubic.parse(args.form)
    print(psd_classify(f).value)
    return EXIT_OK


def cmd_roots(args) -> int:
    from . import rootsys_f4 as rf

    rs = rf.build()
    out = {}
    if args.check_lemmas:
        out["closure_checks"] = [c.to_json() for c in rf.check_closure_lemmas(rs)]
    if args.weyl_witness:
        group = rf.weyl_group(rs)
        ws = rf.find_dot_witnesses(rs, group)
        out["weyl_order"] = len(group)
        out["witnesses"] = [rf.matrix_to_json(w) for w in ws]
    if args.nu_exc:
        nu = rf.nu_exc(rs)
        out["nu_exc"] = [str(x) for x in nu]
        out["pairings"] = [str(x) for x in rf.dual_pairings(rs, nu)]
    if not out:
        print("error: choose --check-lemmas, --weyl-witness or --nu-exc", file=sys.stderr)
        return EXIT_USAGE
    _emit(out, "json")
    if args.check_lemmas and not all(c["verified"] for c in out["closure_checks"]):
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_cover(args) -> int:
    from .metaplectic import Place, selftest

    if not args.selftest:
        print("error: only --selftest is available", file=sys.stderr)
        return EXIT_USAGE
    places = [Place.parse(p) for p in args.place.split(",")]
    reports = []
    for v in places:
        for r in selftest(v, args.samples, args.seed):
            r = dict(r, place=str(v))
            reports.append(r)
    _emit(reports, "json")
    return EXIT_OK if all(not r["failures"] for r in reports) else EXIT_INVARIANT


def _parse_complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def cmd_whittaker(args) -> int:
    from .whittaker import coeffs_to_json, whittaker_value

    alpha = _parse_complex(args.alpha) * args.scale
    out = whittaker_value(args.n, args.nu, alpha)
    _emit({"n": args.n, "nu": args.nu, "alpha": [alpha.real, alpha.imag], "coefficients": coeffs_to_json(out)}, "json")
    return EXIT_OK


def run_batch(lines, cache: Optional[Path], jobs: int = 1) -> List[dict]:
    reader = csv.reader(lines)
    rows = []
    first = True
    for rec in reader:
        if not rec or not rec[0].strip():
            continue
        text = rec[0].strip()
        if first and text.lower() == "polynomial":
            first = False
            continue
        first = False
        try:
            p = MonicCubic.parse(text)
            res = compute_qp(p, jobs, cache)
            rows.append({
                "polynomial": text,
                "total": res.total,
                "orbits": len(res.orbits),
                "stabilizers": " ".join(str(o.stabilizer_order) for o in res.orbits),
                "error": "",
            })
        except (PolynomialParseError, ValueError) as exc:
            rows.append({"polynomial": text, "total": "", "orbits": "", "stabilizers": "", "error": str(exc)})
    return rows


def cmd_batch(args) -> int:
    with open(args.file, newline="") as fh:
        rows = run_batch(fh, _cache_from(args), args.jobs)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=["polynomial", "total", "orbits", "stabilizers", "error"], lineterminator="\n")
        if rows:
            w.writeheader()
            w.writerows(rows)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .proptest import run_all, write_reports

    report = run_all(seed=args.seed, quick=args.quick, jobs=args.jobs)
    if args.json or args.junit:
        write_reports(report, args.json, args.junit)
    for c in report["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['id']:<28} samples={c['samples']}")
    return EXIT_OK if report["passed"] else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="g2fourier", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def cached(p):
        p.add_argument("--cache-dir")
        p.add_argument("--no-cache", action="store_true")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("qp", help="enumerate Q_p for a monic cubic")
    p.add_argument("polynomial")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true")
    g.add_argument("--orbits", action="store_true")
    g.add_argument("--count", action="store_true")
    cached(p)
    p.set_defaults(func=cmd_qp)

    p = sub.add_parser("coeff", help="Fourier coefficient magnitude for a binary cubic a,b,c,1")
    p.add_argument("form")
    cached(p)
    p.set_defaults(func=cmd_coeff)

    p = sub.add_parser("table", help="reproduce the embedded table of 15 rows")
    cached(p)
    p.set_defaults(func=cmd_table, format="text")
    p.add_argument("--json", dest="format", action="store_const", const="json")

    p = sub.add_parser("psd", help="classify a binary cubic a,b,c,d")
    p.add_argument("form")
    p.set_defaults(func=cmd_psd)

    p = sub.add_parser("roots", help="F4 root system checks")
    p.add_argument("--check-lemmas", action="store_true")
    p.add_argument("--weyl-witness", action="store_true")
    p.add_argument("--nu-exc", action="store_true")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("cover", help="metaplectic cover relations")
    p.add_argument("--selftest", action="store_true")
    p.add_argument("--place", default="2,3,5,7,inf")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("whittaker", help="generalized Whittaker coefficients")
    p.add_argument("--n", default="1/2")
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--alpha", required=True)
    p.add_argument("--scale", type=float, default=1.0, help="factor applied to alpha, e.g. 2*pi")
    p.set_defaults(func=cmd_whittaker)

    p = sub.add_parser("batch", help="Q_p counts for a CSV of polynomials")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    cached(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("selftest", help="run the cross-module property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json")
    p.add_argument("--junit")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (PolynomialParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
