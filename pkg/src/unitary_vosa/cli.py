"""``vosa``: build instances from JSON job specs and run check suites.

Exit codes: 0 all checks pass, 1 a check failed, 2 invalid spec,
3 a computation needed data above the cutoff.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .exact import fmt_rational, parse_rational, scalar_to_json
from .fermion import FermionSpace, build_fermion_vosa
from .lattice import IntegralLattice, LatticeValidationError, build_lattice_vosa
from .linalg import Indefinite, psd_verdict
from .ns import NSParams, build_ns_vosa, shapovalov_gram, unitarity_check, verma_basis
from .structure import (
    BasisNotOrthonormalizable,
    CentralChargeMismatch,
    NonSemisimpleWeightZero,
    conformal_comparison,
    decompose,
    direct_sum,
    tensor_product,
    weight_one_algebra,
)
from .voa import (
    CutoffExceeded,
    TruncatedVOSA,
    commutator_check,
    corrupt_form,
    half_integers,
    invariance_check,
    random_commutator_tuples,
)

CONSTRUCTIONS = ("ns", "fermion", "lattice", "direct_sum", "tensor")
CHECKS = ("gram", "psd", "invariance", "commutator", "decompose", "weight_one", "conformal", "characters")
VOSA_CHECKS = ("invariance", "commutator", "decompose", "weight_one", "conformal")


class SpecError(Exception):
    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(message)


def _rational(value, pointer: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SpecError("expected an exact rational as an integer or a \"p/q\" string", pointer)
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"cannot parse {value!r} as a rational", pointer) from None


def _matrix(value, pointer: str, integer: bool = False) -> List[List]:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise SpecError("expected a non-empty list of rows", pointer)
    n = len(value)
    out = []
    for i, row in enumerate(value):
        if len(row) != n:
            raise SpecError(f"row {i} has length {len(row)}, expected {n}", f"{pointer}/{i}")
        r = []
        for j, x in enumerate(row):
            q = _rational(x, f"{pointer}/{i}/{j}")
            if integer and q.denominator != 1:
                raise SpecError(f"entry {x!r} is not an integer", f"{pointer}/{i}/{j}")
            r.append(q)
        out.append(r)
    for i in range(n):
        for j in range(i + 1, n):
            if out[i][j] != out[j][i]:
                raise SpecError(
                    f"matrix is not symmetric: entry ({i},{j}) = {fmt_rational(out[i][j])} but ({j},{i}) = {fmt_rational(out[j][i])}",
                    f"{pointer}/{i}/{j}",
                )
    return out


def _cutoff(spec: Dict) -> Fraction:
    if "cutoff" not in spec:
        raise SpecError("missing cutoff", "/cutoff")
    c = _rational(spec["cutoff"], "/cutoff")
    if c.denominator > 2:
        raise SpecError("cutoff must be a half-integer", "/cutoff")
    if c <= 0:
        raise SpecError("cutoff must be positive", "/cutoff")
    limit = os.environ.get("VOSA_CUTOFF_LIMIT")
    if limit:
        try:
            lim = parse_rational(limit)
        except (ValueError, ZeroDivisionError):
            raise SpecError(f"VOSA_CUTOFF_LIMIT={limit!r} is not a rational", "/cutoff") from None
        if c > lim:
            raise SpecError(f"cutoff {fmt_rational(c)} exceeds VOSA_CUTOFF_LIMIT={limit}", "/cutoff")
    return c


def _build(node: Any, pointer: str, cutoff: Fraction) -> Dict:
    """Validate a construction node and return ``{"kind", "V" (lazy), "ns"}``."""
    if not isinstance(node, dict):
        raise SpecError("expected an object", pointer or "/")
    kind = node.get("construction")
    if kind not in CONSTRUCTIONS:
        raise SpecError(f"construction must be one of {list(CONSTRUCTIONS)}", f"{pointer}/construction")
    params = node.get("parameters", {})
    pp = f"{pointer}/parameters"
    if not isinstance(params, dict):
        raise SpecError("parameters must be an object", pp)
    try:
        if kind == "ns":
            if "c" not in params:
                raise SpecError("missing central charge c", f"{pp}/c")
            c = _rational(params["c"], f"{pp}/c")
            h = _rational(params.get("h", 0), f"{pp}/h")
            p = NSParams(c, h)
            return {"kind": kind, "ns": p, "make": (lambda: build_ns_vosa(c, cutoff)) if h == 0 else None}
        if kind == "fermion":
            n = params.get("n")
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise SpecError("n must be a positive integer", f"{pp}/n")
            form = params.get("form")
            if form is not None:
                form = _matrix(form, f"{pp}/form")
                if len(form) != n:
                    raise SpecError(f"form must be {n}x{n}", f"{pp}/form")
            F = FermionSpace(n, tuple(tuple(r) for r in form) if form else ())
            _need(cutoff)
            return {"kind": kind, "make": lambda: build_fermion_vosa(F, cutoff)}
        if kind == "lattice":
            if "gram" not in params:
                raise SpecError("missing gram", f"{pp}/gram")
            gram = _matrix(params["gram"], f"{pp}/gram", integer=True)
            if "rank" in params and params["rank"] != len(gram):
                raise SpecError(f"rank {params['rank']} does not match gram size {len(gram)}", f"{pp}/rank")
            gens = params.get("generators", [])
            if not isinstance(gens, list):
                raise SpecError("generators must be a list of lattice vectors", f"{pp}/generators")
            for k, g in enumerate(gens):
                if not isinstance(g, list) or len(g) != len(gram) or any(
                    isinstance(x, bool) or not isinstance(x, int) for x in g
                ):
                    raise SpecError(f"generator must be a list of {len(gram)} integers", f"{pp}/generators/{k}")
            try:
                L = IntegralLattice.from_rows([[int(x) for x in r] for r in gram])
            except LatticeValidationError as e:
                raise SpecError(str(e), f"{pp}/gram" + "".join(f"/{x}" for x in e.path)) from None
            _need(cutoff)
            return {"kind": kind, "make": lambda: build_lattice_vosa(L, cutoff, gens)}
        key = "summands" if kind == "direct_sum" else "factors"
        parts = params.get(key)
        if not isinstance(parts, list) or len(parts) < (1 if kind == "direct_sum" else 2):
            raise SpecError(f"{key} must be a list of constructions", f"{pp}/{key}")
        subs = [_build(x, f"{pp}/{key}/{k}", cutoff) for k, x in enumerate(parts)]
        for k, s in enumerate(subs):
            if s["make"] is None:
                raise SpecError("only vacuum NS modules (h = 0) can be combined", f"{pp}/{key}/{k}/parameters/h")
        if kind == "direct_sum":

            def make():
                try:
                    return direct_sum([s["make"]() for s in subs])
                except CentralChargeMismatch as e:
                    raise SpecError(str(e), f"{pp}/{key}") from None

            return {"kind": kind, "make": make}

        def make_t():
            V = subs[0]["make"]()
            for s in subs[1:]:
                V = tensor_product(V, s["make"]())
            return V

        return {"kind": kind, "make": make_t}
    except ValueError as e:
        if isinstance(e, SpecError):
            raise
        raise SpecError(str(e), pp) from None


def _need(cutoff: Fraction):
    if cutoff < 2:
        raise SpecError("this construction needs cutoff >= 2 (the conformal vector has weight 2)", "/cutoff")


def validate(spec: Any) -> Dict:
    if not isinstance(spec, dict):
        raise SpecError("job spec must be a JSON object", "/")
    cutoff = _cutoff(spec)
    checks = spec.get("checks")
    if not isinstance(checks, list) or not checks:
        raise SpecError("checks must be a non-empty list", "/checks")
    for k, c in enumerate(checks):
        if c not in CHECKS:
            raise SpecError(f"unknown check {c!r}; expected one of {list(CHECKS)}", f"/checks/{k}")
    options = spec.get("options", {})
    if not isinstance(options, dict):
        raise SpecError("options must be an object", "/options")
    built = _build(spec, "", cutoff)
    for k, c in enumerate(checks):
        if c in VOSA_CHECKS and built["make"] is None:
            raise SpecError(f"check {c!r} needs a vertex superalgebra; use h = 0 for ns", f"/checks/{k}")
    if "conformal" in checks:
        opt = options.get("conformal")
        if not isinstance(opt, dict) or opt.get("kind") not in ("sugawara", "heisenberg"):
            raise SpecError("conformal check needs options.conformal.kind in {sugawara, heisenberg}", "/options/conformal")
        if opt["kind"] == "sugawara":
            for key in ("level", "dual_coxeter"):
                if key not in opt:
                    raise SpecError(f"sugawara comparison needs {key}", f"/options/conformal/{key}")
                _rational(opt[key], f"/options/conformal/{key}")
    return {"cutoff": cutoff, "checks": list(checks), "options": options, "built": built}


# ---- checks ------------------------------------------------------------------------------------


def _matrix_json(m) -> List[List]:
    rows = m.rows if hasattr(m, "rows") else m
    return [[scalar_to_json(x) for x in r] for r in rows]


def characters(V: TruncatedVOSA) -> Dict[str, int]:
    return {fmt_rational(w): len(V.basis(w)) for w in half_integers(0, V.cutoff)}


def _verma_characters(p: NSParams, cutoff) -> Dict[str, int]:
    return {fmt_rational(w): len(verma_basis(p, w)) for w in half_integers(0, cutoff)}


def _check_gram(ctx) -> Dict:
    if ctx["ns"] is not None:
        p, cutoff = ctx["ns"], ctx["cutoff"]
        weights = {
            fmt_rational(w): {"basis": [str(m) for m in verma_basis(p, w)], "gram": _matrix_json(shapovalov_gram(p, w))}
            for w in half_integers(0, cutoff)
        }
        return {"check": "gram", "status": "pass", "c": fmt_rational(p.c), "h": fmt_rational(p.h), "weights": weights}
    V = ctx["V"]
    weights = {
        fmt_rational(w): {"basis": [V.label_str(l) for l in V.basis(w)], "gram": _matrix_json(V.gram(w))}
        for w in V.weights()
    }
    return {"check": "gram", "status": "pass", "instance": V.describe(), "weights": weights}


def _check_psd(ctx) -> Dict:
    if ctx["ns"] is not None:
        p, cutoff = ctx["ns"], ctx["cutoff"]
        rep = unitarity_check(p, cutoff)
        weights = {}
        for w in half_integers(0, cutoff):
            v = rep.verdicts[w]
            entry = {"gram": _matrix_json(shapovalov_gram(p, w)), "rank": rep.rank(w)}
            entry.update(v.to_json() if v is not None else {"verdict": "empty"})
            weights[fmt_rational(w)] = entry
        first = rep.first_indefinite
        return {
            "check": "psd",
            "status": "pass" if rep.consistent_with_unitary else "fail",
            "c": fmt_rational(p.c),
            "h": fmt_rational(p.h),
            "consistent_with_unitary": rep.consistent_with_unitary,
            "first_indefinite_weight": None if first is None else fmt_rational(first),
            "weights": weights,
        }
    V = ctx["V"]
    weights = {}
    ok = True
    for w in V.weights():
        v = psd_verdict(V.gram(w))
        ok = ok and not isinstance(v, Indefinite)
        weights[fmt_rational(w)] = v.to_json()
    return {"check": "psd", "status": "pass" if ok else "fail", "instance": V.describe(), "weights": weights}


def _check_invariance(ctx) -> Dict:
    V = ctx["V"]
    opt = ctx["options"].get("invariance", {})
    reports = []
    for g in range(len(V.generators)):
        mw = opt.get("max_weight")
        reports.append(invariance_check(V, g, None if mw is None else parse_rational(mw)))
    witnesses = [w for r in reports for w in r.witnesses]
    return {
        "check": "invariance",
        "instance": V.describe(),
        "cutoff": fmt_rational(V.cutoff),
        "status": "pass" if all(r.passed for r in reports) else "fail",
        "witnesses": witnesses,
        "generators": [r.to_json() for r in reports],
    }


def _check_commutator(ctx) -> Dict:
    V = ctx["V"]
    opt = ctx["options"].get("commutator", {})
    count = int(opt.get("samples", 50))
    rng = random.Random(int(opt.get("seed", 0)))
    tuples = random_commutator_tuples(V, count, rng)
    witnesses = []
    failures = 0
    for t in tuples:
        r = commutator_check(V, t.u, t.v, t.m, t.n, t.w)
        if not r.passed:
            failures += 1
            if len(witnesses) < 20:
                fmt = lambda vec: {V.label_str(l): scalar_to_json(c) for l, c in vec.items()}  # noqa: E731
                witnesses.append({"u": fmt(t.u), "v": fmt(t.v), "m": t.m, "n": t.n, "w": fmt(t.w), "lhs": fmt(r.lhs), "rhs": fmt(r.rhs)})
    return {
        "check": "commutator",
        "instance": V.describe(),
        "cutoff": fmt_rational(V.cutoff),
        "status": "pass" if failures == 0 else "fail",
        "samples": count,
        "failures": failures,
        "witnesses": witnesses,
    }


def _check_decompose(ctx) -> Dict:
    V = ctx["V"]
    try:
        return decompose(V).to_json()
    except NonSemisimpleWeightZero as e:
        return {"check": "decompose", "instance": V.describe(), "status": "fail", "error": str(e)}


def _check_weight_one(ctx) -> Dict:
    V = ctx["V"]
    alg = weight_one_algebra(V)
    out = {"check": "weight_one", "instance": V.describe(), "status": "pass" if alg.passed else "fail"}
    out.update(alg.to_json())
    return out


def _check_conformal(ctx) -> Dict:
    V = ctx["V"]
    opt = ctx["options"]["conformal"]
    try:
        return conformal_comparison(
            V,
            opt["kind"],
            opt.get("level"),
            opt.get("dual_coxeter"),
        ).to_json()
    except (BasisNotOrthonormalizable, ValueError) as e:
        return {"check": "conformal", "instance": V.describe(), "status": "fail", "error": str(e)}


def _check_characters(ctx) -> Dict:
    if ctx["ns"] is not None:
        dims = _verma_characters(ctx["ns"], ctx["cutoff"])
        return {"check": "characters", "status": "pass", "module": "verma", "dims": dims}
    return {"check": "characters", "status": "pass", "instance": ctx["V"].describe(), "dims": characters(ctx["V"])}


RUNNERS = {
    "gram": _check_gram,
    "psd": _check_psd,
    "invariance": _check_invariance,
    "commutator": _check_commutator,
    "decompose": _check_decompose,
    "weight_one": _check_weight_one,
    "conformal": _check_conformal,
    "characters": _check_characters,
}


def run(spec: Any, corrupt: bool = False, jobs: int = 1) -> Dict:
    """Validate and execute a job spec; returns the report with an ``exit_code`` key."""
    job = validate(spec)
    built = job["built"]
    checks = job["checks"]
    V = None
    # ns gram/psd/characters describe the Verma module M(c, h); VOSA checks use L(c, 0)
    needs_v = built["make"] is not None and (built.get("ns") is None or any(c in VOSA_CHECKS for c in checks))
    if needs_v:
        V = built["make"]()
        if corrupt:
            V = corrupt_form(V)
    ctx = {"V": V, "ns": built.get("ns"), "cutoff": job["cutoff"], "options": job["options"]}
    if jobs > 1:
        # warm shared caches so worker threads mostly read
        if V is not None:
            for w in V.weights():
                V.basis(w)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda c: RUNNERS[c](ctx), checks))
    else:
        results = [RUNNERS[c](ctx) for c in checks]
    ok = all(r["status"] == "pass" for r in results)
    return {
        "construction": built["kind"],
        "cutoff": fmt_rational(job["cutoff"]),
        "corrupt_form": corrupt,
        "status": "pass" if ok else "fail",
        "checks": results,
        "exit_code": 0 if ok else 1,
    }


def _csv_table(report: Dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["weight", "dim"])
    for r in report["checks"]:
        if r["check"] == "characters":
            for wt, d in sorted(r["dims"].items(), key=lambda kv: Fraction(kv[0])):
                w.writerow([wt, d])
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="vosa", description="Exact unitarity checks for truncated vertex operator superalgebras.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the checks of a JSON job spec")
    r.add_argument("spec", nargs="?", default="-", help="spec file, or - for stdin")
    r.add_argument("--csv", action="store_true", help="print the character table as CSV instead of the JSON report")
    r.add_argument("--corrupt-form", action="store_true", help="flip one weight-2 Gram entry to exercise failure paths")
    r.add_argument("--jobs", type=int, default=1, help="run checks on this many threads")
    r.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    args = ap.parse_args(argv)

    try:
        text = sys.stdin.read() if args.spec == "-" else open(args.spec, encoding="utf-8").read()
    except OSError as e:
        print(_dump({"error": "validation", "pointer": "", "message": str(e)}))
        return 2
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as e:
        print(_dump({"error": "validation", "pointer": "", "message": f"invalid JSON: {e}"}))
        return 2
    if args.csv:
        if not isinstance(spec, dict) or "characters" not in (spec.get("checks") or []):
            print(_dump({"error": "validation", "pointer": "/checks", "message": "--csv needs the characters check"}))
            return 2
    try:
        report = run(spec, corrupt=args.corrupt_form, jobs=max(1, args.jobs))
    except SpecError as e:
        print(_dump({"error": "validation", "pointer": e.pointer, "message": str(e)}))
        print(f"vosa: invalid spec at {e.pointer or '/'}: {e}", file=sys.stderr)
        return 2
    except CutoffExceeded as e:
        print(_dump({"error": "cutoff_exceeded", "message": str(e)}))
        print(f"vosa: {e}", file=sys.stderr)
        return 3
    code = report.pop("exit_code")
    if args.csv:
        sys.stdout.write(_csv_table(report))
    elif args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(_dump(report) + "\n")
    else:
        print(_dump(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
