"""``vnq`` command line: run documents, compile circuits, sweep grid precision.

Exit status is 0 on success, 1 for input/execution errors and 2 for usage
errors.  Every error is one line on stderr of the form
``vnq: error: E_CODE field=<path>: message``.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import __version__
from .core import DimensionError, StateVector, fidelity, random_unitary
from .documents import (
    InputError,
    RunSpec,
    dumps,
    parse_input,
    program_doc,
    state_doc,
)
from .hybrid import apply_hybrid_program
from .qpu import apply_qpu, load_program
from .selftest import run_selftest
from .synth import compile_circuit, gate_fidelity, precision_sweep, program_unitary
from .threebus import run_program


class UsageError(Exception):
    pass


def _with_reference(result: dict, out: StateVector, spec: RunSpec) -> dict:
    if "reference" in spec.payload:
        result["fidelity"] = fidelity(out, spec.payload["reference"])
    return result


def execute(spec: RunSpec) -> dict:
    """Dispatch a parsed document and build its result record."""
    p = spec.payload
    result: dict = {"mode": spec.mode, "seed": spec.seed}
    if spec.mode == "qpu":
        out = apply_qpu(p["table"], load_program(p["table"], p["program"], p["data"]))
        result["output"] = state_doc(out)
        return _with_reference(result, out, spec)
    if spec.mode == "threebus":
        res = run_program(p["table"], p["memory"], p["data"])
        result["executed"] = list(p["memory"].execution_order)
        result["program_restored"] = res.program_restored
        result["output"] = state_doc(res.data)
        return _with_reference(result, res.data, spec)
    if spec.mode == "hybrid":
        out = apply_hybrid_program(p["program"], p["data"])
        result["output"] = state_doc(out)
        return _with_reference(result, out, spec)
    if spec.mode == "compile":
        circ = p["circuit"]
        prog = compile_circuit(circ)
        out = apply_hybrid_program(prog, p["data"])
        ref = p.get("reference", circ.apply(p["data"]))
        result["program"] = program_doc(prog)
        result["unitary_fidelity"] = gate_fidelity(program_unitary(prog), circ.unitary())
        result["output"] = state_doc(out)
        result["fidelity"] = fidelity(out, ref)
        return result
    if spec.mode == "sweep":
        if "targets" in p:
            targets = p["targets"]
        else:
            rng = np.random.default_rng(spec.seed)
            targets = [random_unitary(2, rng) for _ in range(p["random_targets"])]
        rows = precision_sweep(targets, p["Qs"])
        result["targets"] = len(targets)
        result["rows"] = [
            {"Q": r.Q, "worst_infidelity": r.worst_infidelity, "mean_infidelity": r.mean_infidelity} for r in rows
        ]
        return result
    raise UsageError(f"unknown mode {spec.mode!r}")


def compile_document(spec: RunSpec) -> dict:
    """Turn a ``compile`` document into a runnable ``hybrid`` document."""
    if spec.mode != "compile":
        raise UsageError(f"compile expects a document with mode 'compile', got {spec.mode!r}")
    p = spec.payload
    circ = p["circuit"]
    prog = compile_circuit(circ)
    return {
        "mode": "hybrid",
        "seed": spec.seed,
        "program": program_doc(prog),
        "data": state_doc(p["data"]),
        "reference": state_doc(p.get("reference", circ.apply(p["data"]))),
    }


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render(result: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(result) + "\n"
    mode = result["mode"]
    if mode == "sweep":
        return _csv(
            ["Q", "worst_infidelity", "mean_infidelity"],
            [[r["Q"], r["worst_infidelity"], r["mean_infidelity"]] for r in result["rows"]],
        )
    if mode == "selftest":
        return _csv(["check", "passed", "detail"], [[c["name"], c["passed"], c["detail"]] for c in result["checks"]])
    if "output" in result and mode != "compile":
        amps = result["output"]["amplitudes"]
        return _csv(["index", "re", "im"], [[i, re, im] for i, (re, im) in enumerate(amps)])
    raise UsageError(f"csv output is not available for mode {mode!r}")


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError("E_IO", f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), help="output format (default: document's, else json)")
    common.add_argument("--tol", type=float, help="unitarity tolerance for gate validation")
    common.add_argument("--seed", type=int, help="seed for randomized work (default 0)")

    parser = argparse.ArgumentParser(prog="vnq", description="von Neumann quantum processor simulator")
    parser.add_argument("--version", action="version", version=f"vnq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="execute a run document")
    run.add_argument("path", nargs="?", help="document path ('-' or omitted: stdin)")
    comp = sub.add_parser("compile", parents=[common], help="compile a circuit document into a hybrid document")
    comp.add_argument("path", nargs="?")
    sweep = sub.add_parser("sweep", parents=[common], help="precision table of grid-quantized synthesis")
    sweep.add_argument("path", nargs="?", help="sweep document; omit to use --qs/--targets")
    sweep.add_argument("--qs", help="comma-separated grid sizes, e.g. 16,64,256")
    sweep.add_argument("--targets", type=int, default=200, help="number of random targets (default 200)")
    sub.add_parser("selftest", parents=[common], help="run the seeded invariant checks")
    return parser


def _check_tol(args) -> None:
    if args.tol is not None and not args.tol > 0:
        raise UsageError("--tol must be positive")
    if args.seed is not None and args.seed < 0:
        raise UsageError("--seed must be non-negative")


def _sweep_spec(args) -> RunSpec:
    if args.path is not None:
        return parse_input(_read(args.path), tol=args.tol, seed=args.seed)
    if not args.qs:
        raise UsageError("sweep needs a document path or --qs")
    try:
        Qs = [int(q) for q in args.qs.split(",")]
    except ValueError:
        raise UsageError(f"--qs must be comma-separated integers, got {args.qs!r}") from None
    if any(q < 1 for q in Qs) or args.targets < 1:
        raise UsageError("grid sizes and --targets must be positive")
    return RunSpec("sweep", {"Qs": Qs, "random_targets": args.targets}, seed=args.seed or 0)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_tol(args)
        if args.command == "selftest":
            seed = args.seed or 0
            checks = run_selftest(seed)
            result = {
                "mode": "selftest",
                "seed": seed,
                "passed": all(c.passed for c in checks),
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
            }
            _write(render(result, args.format or "json"), args.out)
            return 0 if result["passed"] else 1
        if args.command == "sweep":
            spec = _sweep_spec(args)
            if spec.mode != "sweep":
                raise UsageError(f"sweep expects a document with mode 'sweep', got {spec.mode!r}")
            _write(render(execute(spec), args.format or spec.fmt), args.out)
            return 0
        spec = parse_input(_read(args.path), tol=args.tol, seed=args.seed)
        if args.command == "compile":
            text = dumps(compile_document(spec)) + "\n"
            if args.format == "csv":
                raise UsageError("compile emits a JSON document; csv is not available")
            _write(text, args.out)
            return 0
        _write(render(execute(spec), args.format or spec.fmt), args.out)
        return 0
    except UsageError as exc:
        print(f"vnq: error: E_USAGE: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"vnq: error: {exc}", file=sys.stderr)
        return 1
    except (DimensionError, ValueError, IndexError) as exc:
        print(f"vnq: error: E_EXEC: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
