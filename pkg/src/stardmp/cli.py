"""``stardmp`` command line: compute, check, verify, fuzz, gen.

Every command prints one JSON document to standard output, failures
included. Exit codes: 0 success, 1 predicate false or failed instances,
2 inverse does not exist, 3 numerical failure or inconsistency, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Optional

from . import gen
from .geninv import (
    NoCoreInverse,
    NoGroupInverse,
    adjoint_pseudo_core_agrees,
    core_inverse,
    drazin,
    group_inverse,
    is_EP,
    is_projection,
    is_star_dmp,
    moore_penrose,
    pseudo_core,
)
from .matcore import MatrixFormatError, NumericalFailure, StarDMPError, Tolerance, from_json, to_json
from .registry import THEOREM_IDS, check, instance_from_json, instance_to_json

EXIT_OK, EXIT_FALSE, EXIT_NO_INVERSE, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2, 3, 64

MATRIX_KINDS = {
    "stardmp": gen.gen_star_dmp,
    "ep": gen.gen_ep,
    "random": gen.gen_random,
    "oblique": gen.gen_oblique,
    "idempotent": gen.gen_idempotent,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(doc: Any):
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _load_matrix(path: str):
    try:
        return from_json(_load(path))
    except (MatrixFormatError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _tol(args) -> Tolerance:
    try:
        return Tolerance(args.eq_tol, args.rank_rel)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- compute / check -------------------------------------------------------------


def cmd_compute(args) -> int:
    a = _load_matrix(args.file)
    tol = _tol(args)
    doc: dict = {"command": "compute", "kind": args.kind}
    try:
        if args.kind == "drazin":
            res, cert = drazin(a, tol)
            x = res.drazin
            doc["index"] = res.index
        else:
            fn = {"mp": moore_penrose, "group": group_inverse, "core": core_inverse, "pcore": pseudo_core}[args.kind]
            x, cert = fn(a, tol)
    except (NoGroupInverse, NoCoreInverse) as exc:
        doc["error"] = str(exc)
        _emit(doc)
        return EXIT_NO_INVERSE
    except NumericalFailure as exc:
        doc["error"] = str(exc)
        _emit(doc)
        return EXIT_NUMERICAL
    doc["matrix"] = to_json(x)
    doc["certificate"] = cert.to_json()
    _emit(doc)
    return EXIT_OK if cert.passed else EXIT_NUMERICAL


def cmd_check(args) -> int:
    a = _load_matrix(args.file)
    tol = _tol(args)
    doc: dict = {"command": "check", "predicate": args.predicate}
    try:
        if args.predicate == "stardmp":
            rep = is_star_dmp(a, tol)
            doc["report"] = rep.to_json()
            _emit(doc)
            if not rep.consistent:
                return EXIT_NUMERICAL
            return EXIT_OK if rep.verdict else EXIT_FALSE
        verdict = is_projection(a, tol) if args.predicate == "projection" else is_EP(a, tol)
    except NumericalFailure as exc:
        doc["error"] = str(exc)
        _emit(doc)
        return EXIT_NUMERICAL
    doc["verdict"] = bool(verdict)
    _emit(doc)
    return EXIT_OK if verdict else EXIT_FALSE


# -- batch reports ---------------------------------------------------------------


class RunReport:
    def __init__(self, command: str, **extra):
        self.command = command
        self.extra = extra
        self.instances = self.passed = self.failed = self.inconsistent = self.vacuous = self.errors = 0
        self.failures: list[dict] = []

    def record(self, key: dict, ok: bool, consistent: bool = True, detail: Optional[dict] = None):
        self.instances += 1
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append({**key, "verdict": detail})
        if not consistent:
            self.inconsistent += 1

    def error(self, key: dict, exc: Exception):
        self.errors += 1
        self.record(key, False, True, {"error": f"{type(exc).__name__}: {exc}"})

    def exit_code(self) -> int:
        if self.inconsistent or self.errors:
            return EXIT_NUMERICAL
        return EXIT_FALSE if self.failed else EXIT_OK

    def to_json(self) -> dict:
        return {
            "command": self.command,
            **self.extra,
            "instances": self.instances,
            "passed": self.passed,
            "failed": self.failed,
            "inconsistent": self.inconsistent,
            "vacuous": self.vacuous,
            "errors": self.errors,
            "failures": self.failures,
        }


def _verify_one(report: RunReport, theorem: str, inst, key: dict, tol: Tolerance):
    try:
        v = check(theorem, inst, tol)
    except StarDMPError as exc:
        report.error(key, exc)
        return
    ok = v.consistent and v.equivalence_ok is not False
    if not v.hypotheses_hold:
        report.vacuous += 1
    report.record(key, ok, v.consistent, None if ok else v.to_json())


def _need_dim(args, low: int):
    if args.dim is None:
        raise UsageError("--dim is required")
    if args.dim < low:
        raise UsageError(f"--dim must be at least {low}")


def cmd_verify(args) -> int:
    theorem = args.theorem
    tol = _tol(args)
    if (args.file is None) == (args.random is None):
        raise UsageError("give exactly one of --file or --random")
    report = RunReport("verify", theorem=theorem)
    if args.file is not None:
        doc = _load(args.file)
        items = doc if isinstance(doc, list) else [doc]
        parsed = []
        for i, obj in enumerate(items):
            if isinstance(obj, dict) and "instance" in obj:
                obj = obj["instance"]
            try:
                parsed.append(instance_from_json(theorem, obj))
            except (MatrixFormatError, ValueError) as exc:
                raise UsageError(f"{args.file}[{i}]: {exc}") from None
        for i, inst in enumerate(parsed):
            _verify_one(report, theorem, inst, {"file": args.file, "index": i}, tol)
    else:
        if args.random < 0:
            raise UsageError("--random must be nonnegative")
        _need_dim(args, gen.min_dim(theorem))
        report.extra.update(dim=args.dim, seed=args.seed)
        for i in range(args.random):
            spec = gen.batch_spec(args.seed, i, args.dim)
            key = {"index": i, "seed": spec.seed}
            try:
                inst = gen.generate(theorem, spec)
            except StarDMPError as exc:
                report.error(key, exc)
                continue
            _verify_one(report, theorem, inst, key, tol)
    _emit(report.to_json())
    return report.exit_code()


def run_fuzz(count: int, dim: int, seed: int, tol: Tolerance, near_miss: Optional[int] = None) -> RunReport:
    """The fuzz batch behind ``stardmp fuzz``, returned as a report."""
    report = RunReport("fuzz", dim=dim, seed=seed)
    kinds = ("stardmp", "ep", "random")
    for i in range(count):
        kind = kinds[i % 3]
        spec = gen.batch_spec(seed, i, dim)
        key = {"index": i, "seed": spec.seed, "generator": kind}
        try:
            a = MATRIX_KINDS[kind](spec)
            rep = is_star_dmp(a, tol)
            expected = {"stardmp": True, "ep": True}.get(kind)
            ok = rep.consistent and (expected is None or rep.verdict == expected)
            if kind == "ep":
                ok = ok and is_EP(a, tol)
            if rep.verdict:
                ok = ok and adjoint_pseudo_core_agrees(a, tol)
        except StarDMPError as exc:
            report.error(key, exc)
            continue
        report.record(key, ok, rep.consistent, None if ok else rep.to_json())

    ids = [t for t in gen.NEAR_MISS_LABELS if dim >= gen.NEAR_MISS_MIN_DIM.get(t, 1)]
    total = max(1, count // 10) if near_miss is None else near_miss
    nm = {"instances": 0, "exact": 0, "extra": 0, "missed": 0}
    for j in range(total if ids else 0):
        theorem = ids[j % len(ids)]
        spec = gen.batch_spec(seed, count + j, dim)
        key = {"near_miss": j, "seed": spec.seed, "theorem": theorem}
        try:
            miss = gen.gen_near_miss(theorem, spec)
            v = check(theorem, miss.instance, tol)
        except StarDMPError as exc:
            report.error(key, exc)
            continue
        nm["instances"] += 1
        broken = v.broken
        if miss.label not in broken:
            nm["missed"] += 1
        elif broken == [miss.label]:
            nm["exact"] += 1
        else:
            nm["extra"] += 1
        ok = miss.label in broken
        report.record(key, ok, v.consistent, None if ok else {"label": miss.label, **v.to_json()})
    nm["exact_rate"] = nm["exact"] / nm["instances"] if nm["instances"] else 1.0
    report.extra["near_miss"] = nm
    return report


def cmd_fuzz(args) -> int:
    if args.count < 0 or args.dim < 1:
        raise UsageError("--count must be nonnegative and --dim positive")
    report = run_fuzz(args.count, args.dim, args.seed, _tol(args), args.near_miss)
    _emit(report.to_json())
    return report.exit_code()


def cmd_gen(args) -> int:
    target = args.target
    if target not in THEOREM_IDS and target not in MATRIX_KINDS:
        raise UsageError(f"unknown target {target!r}")
    _need_dim(args, 1)
    if args.count < 1:
        raise UsageError("--count must be positive")
    out = []
    for i in range(args.count):
        spec = gen.batch_spec(args.seed, i, args.dim)
        if args.core_rank is not None:
            if not 0 <= args.core_rank <= args.dim:
                raise UsageError("--core-rank must lie in [0, dim]")
            spec = gen.GenSpec(args.dim, args.core_rank, spec.seed)
        doc = {"theorem": target, "seed": spec.seed, "dim": spec.dim, "core_rank": spec.core_rank}
        try:
            if target in MATRIX_KINDS:
                if args.near_miss:
                    raise UsageError("--near-miss needs a theorem id")
                doc["matrix"] = to_json(MATRIX_KINDS[target](spec))
            elif args.near_miss:
                miss = gen.gen_near_miss(target, spec, args.eps)
                doc.update(hypotheses_verified=False, broken=miss.label, eps=miss.eps)
                doc["instance"] = instance_to_json(target, miss.instance)
            else:
                doc["hypotheses_verified"] = True
                doc["instance"] = instance_to_json(target, gen.generate(target, spec))
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc.args[0] if exc.args else exc)) from None
        except StarDMPError as exc:
            _emit({"command": "gen", "error": str(exc)})
            return EXIT_NUMERICAL
        out.append(doc)
    _emit(out[0] if args.count == 1 else out)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    tol = _Parser(add_help=False)
    tol.add_argument("--eq-tol", type=float, default=Tolerance.eq_tol)
    tol.add_argument("--rank-rel", type=float, default=Tolerance.rank_rel)

    p = _Parser(prog="stardmp", description="Generalized inverses and *-DMP decisions for complex matrices.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("compute", parents=[tol], help="compute a generalized inverse")
    c.add_argument("kind", choices=["mp", "group", "drazin", "core", "pcore"])
    c.add_argument("file")
    c.set_defaults(fn=cmd_compute)

    k = sub.add_parser("check", parents=[tol], help="decide a predicate")
    k.add_argument("predicate", choices=["projection", "ep", "stardmp"])
    k.add_argument("file")
    k.set_defaults(fn=cmd_check)

    v = sub.add_parser("verify", parents=[tol], help="verify a theorem on files or generated instances")
    v.add_argument("theorem", choices=THEOREM_IDS)
    v.add_argument("--file")
    v.add_argument("--random", type=int)
    v.add_argument("--dim", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(fn=cmd_verify)

    f = sub.add_parser("fuzz", parents=[tol], help="cross-check the *-DMP characterizations")
    f.add_argument("--count", type=int, default=1000)
    f.add_argument("--dim", type=int, default=4)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--near-miss", type=int, help="near-miss instances (default count // 10)")
    f.set_defaults(fn=cmd_fuzz)

    g = sub.add_parser("gen", help="emit generated instances as JSON")
    g.add_argument("target", help="theorem id or one of " + ", ".join(MATRIX_KINDS))
    g.add_argument("--dim", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--core-rank", type=int)
    g.add_argument("--near-miss", action="store_true")
    g.add_argument("--eps", type=float, default=1e-3)
    g.set_defaults(fn=cmd_gen)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not 0 <= getattr(args, "seed", 0) < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        return args.fn(args)
    except UsageError as exc:
        print(f"stardmp: {exc}", file=sys.stderr)
        _emit({"error": str(exc), "exit": EXIT_USAGE})
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
