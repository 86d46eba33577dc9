"""Command line front end: ``quonlang <subcommand> ...``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import pf_algebra as pf
from . import spider_engine as se
from .dsl import Document, Env, parse, render_expr
from .errors import ParseError, QuonError
from .numerics import DEFAULT_EPS, Tensor
from .quon_calculus import find_word
from .qudit_core import GATE_NAMES, clifford_order, expected_clifford_order, gate, random_state, teleport_run
from .suites import SUITES, CheckRecord, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CONFIG_KEYS = {"dims", "dim", "tol", "seed", "cap", "trials", "max_len"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# formatting


def fmt_complex(z: complex, digits: int = 6) -> str:
    re, im = round(z.real, digits) + 0.0, round(z.imag, digits) + 0.0
    if im == 0:
        return f"{re:g}"
    if re == 0:
        return f"{im:g}i"
    return f"{re:g}{im:+g}i"


def format_tensor(t: Tensor, digits: int = 6) -> list[str]:
    m = t.matrix
    cells = [[fmt_complex(z, digits) for z in row] for row in m]
    width = max((len(c) for row in cells for c in row), default=1)
    return ["  [" + "  ".join(c.rjust(width) for c in row) + "]" for row in cells]


def _scalar_json(z: Optional[complex]):
    if z is None:
        return None
    return [round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0]


def _err_json(x: float):
    return None if not math.isfinite(x) else float(f"{x:.6e}")


def build_report(command: str, dims: Sequence[int], records: list[CheckRecord]) -> dict:
    rows = [
        {
            "name": r.name,
            "status": r.status,
            "max_error": _err_json(r.max_error),
            "scalar": _scalar_json(r.scalar),
            "detail": r.detail,
            "runtime_ms": round(r.runtime_ms, 3),
        }
        for r in records
    ]
    return {
        "schema": 1,
        "tool": "quonlang",
        "version": __version__,
        "command": command,
        "dims": list(dims),
        "records": rows,
        "pass": all(r.passed for r in records),
    }


def write_report(path: Optional[str], report: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def print_records(records: list[CheckRecord], out) -> None:
    width = max((len(r.name) for r in records), default=4)
    for r in records:
        err = "-" if r.max_error == 0 else ("inf" if not math.isfinite(r.max_error) else f"{r.max_error:.2e}")
        extra = f"  {r.detail}" if r.detail else ""
        print(f"{r.status.upper():5}  {r.name.ljust(width)}  {err:>9}{extra}", file=out)
    n_pass = sum(r.passed for r in records)
    print(f"{n_pass}/{len(records)} passed", file=out)


# ---------------------------------------------------------------------------
# configuration


def read_config(path: str) -> dict:
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value
    return cfg


def parse_dims(text: str) -> list[int]:
    try:
        dims = [int(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"bad dimension list {text!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise UsageError(f"bad dimension list {text!r}")
    return dims


def merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Config-file values fill flags that were not given on the command line."""
    if getattr(args, "config", None):
        for key, value in read_config(args.config).items():
            if hasattr(args, key) and getattr(args, key) is None:
                setattr(args, key, value)
    try:
        if getattr(args, "dims", None) is not None and not isinstance(args.dims, list):
            args.dims = parse_dims(args.dims)
        for key, cast in (("dim", int), ("tol", float), ("seed", int), ("cap", int), ("trials", int), ("max_len", int)):
            if getattr(args, key, None) is not None:
                setattr(args, key, cast(getattr(args, key)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return args


# ---------------------------------------------------------------------------
# subcommands


def _load(path: str) -> Document:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse(text)


def _doc_dims(doc: Document, args) -> list[int]:
    if getattr(args, "dim", None):
        return [args.dim]
    if getattr(args, "dims", None):
        return list(args.dims)
    return [doc.dim] if doc.dim else [2]


def document_checks(doc: Document, dims: Sequence[int], tol: float, label: str = "") -> list[CheckRecord]:
    rows = []
    for d in dims:
        env = Env(doc, d)
        for s in doc.checks:
            name = f"{label}line {s.line}/d={d}"
            t0 = time.perf_counter()
            try:
                lhs, rhs = env.tensor(s.lhs), env.tensor(s.rhs)
                c = s.scalar.value(d) if s.scalar is not None else 1.0
                if lhs.shape != rhs.shape:
                    raise QuonError(f"shape mismatch {lhs.shape[1:]} vs {rhs.shape[1:]}")
                err = lhs.max_dev(rhs.scale(c))
                status = "pass" if err <= tol else "fail"
                rows.append(CheckRecord(name, status, err, complex(c), (time.perf_counter() - t0) * 1000))
            except QuonError as exc:
                rows.append(CheckRecord(name, "error", math.inf, None, 0.0, f"{type(exc).__name__}: {exc}"))
    return rows


def cmd_check(args, out) -> int:
    tol = args.tol if args.tol is not None else DEFAULT_EPS
    seed = args.seed if args.seed is not None else 0
    records: list[CheckRecord] = []
    if args.files:
        dims_used: list[int] = []
        for path in args.files:
            doc = _load(path)
            dims = _doc_dims(doc, args)
            dims_used += [d for d in dims if d not in dims_used]
            records += document_checks(doc, dims, tol, label=f"{Path(path).name}:")
    else:
        names = args.suite or list(SUITES)
        for name in names:
            if name not in SUITES:
                raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
        cap = args.cap if args.cap is not None else 100_000
        for name in names:
            records += run_suite(name, args.dims, tol, seed, cap)
        dims_used = list(args.dims) if args.dims else []
    print_records(records, out)
    write_report(args.report, build_report("check", dims_used, records))
    return EXIT_OK if all(r.passed for r in records) else EXIT_FAIL


def cmd_eval(args, out) -> int:
    doc = _load(args.file)
    for d in _doc_dims(doc, args):
        env = Env(doc, d)
        for s in doc.evals:
            t = env.tensor(s.expr)
            print(f"eval {render_expr(s.expr)}  [d={d}, {t.out_legs} out, {t.in_legs} in]", file=out)
            for line in format_tensor(t):
                print(line, file=out)
    return EXIT_OK


def cmd_normalize(args, out) -> int:
    doc = _load(args.file)
    tol = args.tol if args.tol is not None else DEFAULT_EPS
    records = []
    for d in _doc_dims(doc, args):
        env = Env(doc, d)
        for s in doc.evals:
            diag = env.diagram(s.expr)
            trace: list = []
            nf = se.normalize(diag, trace=trace)
            err = se.eval_tensor(diag).max_dev(se.eval_tensor(nf))
            nodes = [n.label() for _, n in nf.nodes if n.kind not in ("in", "out")]
            print(f"normalize {render_expr(s.expr)}  [d={d}]", file=out)
            print(f"  steps: {', '.join(r for r, _ in trace) or 'none'}", file=out)
            print(f"  nodes: {' '.join(nodes) or '(none)'}", file=out)
            print(f"  edges: {len(nf.edges)}  scalar: {fmt_complex(complex(nf.scalar))}  genus marks: {nf.genus_marks}", file=out)
            print(f"  semantics preserved: {'yes' if err <= tol else 'NO'}", file=out)
            records.append(CheckRecord(f"line {s.line}/d={d}", "pass" if err <= tol else "fail", err))
    write_report(args.report, build_report("normalize", _doc_dims(doc, args), records))
    return EXIT_OK if all(r.passed for r in records) else EXIT_FAIL


def cmd_clifford(args, out) -> int:
    d = args.dim if args.dim is not None else 2
    cap = args.cap if args.cap is not None else 100_000
    t0 = time.perf_counter()
    n = clifford_order(d, cap)
    want = expected_clifford_order(d)
    print(n, file=out)
    rec = CheckRecord(f"clifford/order/d={d}", "pass" if n == want else "fail", 0.0 if n == want else 1.0, complex(n),
                      (time.perf_counter() - t0) * 1000, f"expected {want}")
    write_report(args.report, build_report("clifford", [d], [rec]))
    return EXIT_OK if n == want else EXIT_FAIL


def cmd_teleport(args, out) -> int:
    d = args.dim if args.dim is not None else 2
    trials = args.trials if args.trials is not None else 20
    seed = args.seed if args.seed is not None else 0
    tol = args.tol if args.tol is not None else DEFAULT_EPS
    rng = np.random.default_rng(seed)
    states = [random_state(d, rng) for _ in range(trials)]
    records = []
    print(f"teleport d={d} trials={trials} seed={seed}", file=out)
    for a in range(d):
        for b in range(d):
            reps = [teleport_run(d, psi, (a, b)) for psi in states]
            worst = min(r.fidelity for r in reps)
            prob = reps[0].probability
            print(f"  outcome ({a},{b})  p={prob:.6f}  min fidelity={worst:.12f}  correction {reps[0].correction}", file=out)
            err = 1 - worst
            records.append(CheckRecord(f"teleport/d={d}/outcome=({a},{b})", "pass" if err <= tol else "fail", err))
    write_report(args.report, build_report("teleport", [d], records))
    return EXIT_OK if all(r.passed for r in records) else EXIT_FAIL


def cmd_search(args, out) -> int:
    d = args.dim if args.dim is not None else 2
    target = args.target or "F"
    if target not in GATE_NAMES or target == "CNOT":
        raise UsageError(f"target must be one of {', '.join(n for n in GATE_NAMES if n != 'CNOT')}")
    max_len = args.max_len if args.max_len is not None else 4
    tol = args.tol if args.tol is not None else DEFAULT_EPS
    t0 = time.perf_counter()
    try:
        word = find_word(d, gate(d, target), max_len, tol)
    except QuonError as exc:
        print(f"no word: {exc}", file=out)
        rec = CheckRecord(f"search/{target}/d={d}", "fail", math.inf, None, 0.0, str(exc))
        write_report(args.report, build_report("search", [d], [rec]))
        return EXIT_FAIL
    print(f"{target} (d={d}): {word}  [length {len(word)}]", file=out)
    rec = CheckRecord(f"search/{target}/d={d}", "pass", 0.0, None, (time.perf_counter() - t0) * 1000, str(word))
    write_report(args.report, build_report("search", [d], [rec]))
    return EXIT_OK


def cmd_pf(args, out) -> int:
    d = args.dim if args.dim is not None else 3
    n = 4
    c = [pf.pf_generator(d, n, m) for m in range(1, n + 1)]
    show = lambda label, x: print(f"  {label:<22} = {pf.render(x)}", file=out)
    print(f"PF_{n} at d={d}", file=out)
    show("c1 c2", pf.pf_mul(c[0], c[1]))
    show("c2 c1", pf.pf_mul(c[1], c[0]))
    show("c1^d", pf.pf_generator(d, n, 1, d))
    show("(c1 c3)*", pf.pf_adjoint(pf.pf_mul(c[0], c[2])))
    show("c1 (x) c2 (twisted)", pf.pf_twisted_mul(c[0], c[1]))
    u = pf.pf_mul(pf.pf_generator(d, n, 2, -1), c[0])
    print(f"  charge(c2^-1 c1)       = {pf.pf_charge(u)}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quonlang", description="Verification engine for the quon diagram language.")
    p.add_argument("--version", action="version", version=f"quonlang {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *flags):
        sp.add_argument("--config", help="file of key = value defaults (flags win)")
        sp.add_argument("--report", help="write the JSON report here")
        if "dims" in flags:
            sp.add_argument("--dims", help="comma separated dimensions, e.g. 2,3,4,5")
        if "dim" in flags:
            sp.add_argument("--dim", type=int)
        if "tol" in flags:
            sp.add_argument("--tol", type=float)
        if "seed" in flags:
            sp.add_argument("--seed", type=int)
        if "cap" in flags:
            sp.add_argument("--cap", type=int)

    sp = sub.add_parser("check", help="run built-in suites, or the checks of .quon files")
    sp.add_argument("files", nargs="*")
    sp.add_argument("--suite", action="append", help=f"restrict to a suite ({', '.join(SUITES)}); repeatable")
    common(sp, "dims", "tol", "seed", "cap")
    sp.set_defaults(func=cmd_check, dim=None)

    sp = sub.add_parser("eval", help="evaluate the eval statements of a .quon file")
    sp.add_argument("file")
    common(sp, "dim", "dims")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("normalize", help="normalize the eval statements of a .quon file")
    sp.add_argument("file")
    common(sp, "dim", "dims", "tol")
    sp.set_defaults(func=cmd_normalize)

    sp = sub.add_parser("clifford", help="order of the one-qudit Clifford group by BFS")
    common(sp, "dim", "cap")
    sp.set_defaults(func=cmd_clifford)

    sp = sub.add_parser("teleport", help="simulate teleportation over every outcome")
    sp.add_argument("--trials", type=int)
    common(sp, "dim", "seed", "tol")
    sp.set_defaults(func=cmd_teleport)

    sp = sub.add_parser("search", help="shortest braid word for a one-qudit gate")
    sp.add_argument("--target", help="gate name (F, G, X, Y, Z, F2)")
    sp.add_argument("--max-len", dest="max_len", type=int)
    common(sp, "dim", "tol")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("pf", help="parafermion algebra demo")
    common(sp, "dim")
    sp.set_defaults(func=cmd_pf)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        merge_config(args)
        return args.func(args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=err)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except QuonError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
