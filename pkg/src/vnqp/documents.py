"""Run documents: JSON input parsing, validation and deterministic emission.

A document is one JSON object with a ``mode`` field.  Complex numbers are
``[re, im]`` pairs, matrices are row-major lists of rows, and states are
``{"layout": [...], "amplitudes": [[re, im], ...]}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import NAMED_GATES, VALID_TOL, DenseUnitary, RegisterLayout, StateVector, unitarity_deviation
from .hybrid import Entangler, HybridLayer, HybridProgram
from .qpu import GateTable
from .synth import CircuitIR, Cnot, OneQubit
from .threebus import ProgramMemory

MODES = ("qpu", "threebus", "hybrid", "compile", "sweep")
FORMATS = ("json", "csv")


class InputError(Exception):
    """Malformed or invalid run document.

    ``str()`` gives the single-line form ``E_CODE field=<path>: message``.
    """

    def __init__(self, code: str, message: str, field: str | None = None, line: int | None = None):
        super().__init__(message)
        self.code = code
        self.field = field
        self.line = line
        self.message = message

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line={self.line}")
        if self.field is not None:
            where.append(f"field={self.field}")
        loc = (" " + " ".join(where)) if where else ""
        return f"{self.code}{loc}: {self.message}"


@dataclass
class RunSpec:
    mode: str
    payload: dict = field(default_factory=dict)
    fmt: str = "json"
    tol: float = VALID_TOL
    seed: int = 0


# ---------------------------------------------------------------- parsing


def _require(doc: dict, key: str, path: str = "") -> Any:
    if key not in doc:
        raise InputError("E_MISSING_FIELD", "required field missing", _join(path, key))
    return doc[key]


def _join(path: str, key) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else key


def _int(v, path: str, minimum: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError("E_TYPE", f"expected an integer, got {type(v).__name__}", path)
    if minimum is not None and v < minimum:
        raise InputError("E_VALUE", f"must be >= {minimum}, got {v}", path)
    return v


def _real(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError("E_TYPE", f"expected a number, got {type(v).__name__}", path)
    if not math.isfinite(v):
        raise InputError("E_VALUE", "number must be finite", path)
    return float(v)


def _list(v, path: str, nonempty: bool = True) -> list:
    if not isinstance(v, list):
        raise InputError("E_TYPE", f"expected a list, got {type(v).__name__}", path)
    if nonempty and not v:
        raise InputError("E_VALUE", "list must not be empty", path)
    return v


def _object(v, path: str) -> dict:
    if not isinstance(v, dict):
        raise InputError("E_TYPE", f"expected an object, got {type(v).__name__}", path)
    return v


def _complex(v, path: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(_real(v, path))
    if not isinstance(v, list) or len(v) != 2:
        raise InputError("E_TYPE", "complex numbers are written as [re, im]", path)
    return complex(_real(v[0], _join(path, 0)), _real(v[1], _join(path, 1)))


def _matrix(v, path: str, tol: float) -> DenseUnitary:
    if isinstance(v, str):
        if v not in NAMED_GATES:
            raise InputError("E_VALUE", f"unknown gate name {v!r}; known: {sorted(NAMED_GATES)}", path)
        return NAMED_GATES[v]
    rows = _list(v, path)
    n = len(rows)
    mat = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        row = _list(row, _join(path, i))
        if len(row) != n:
            raise InputError("E_SHAPE", f"row has {len(row)} entries, matrix needs {n}", _join(path, i))
        for j, z in enumerate(row):
            mat[i, j] = _complex(z, _join(_join(path, i), j))
    dev = unitarity_deviation(mat)
    if dev > tol:
        raise InputError("E_NOT_UNITARY", f"matrix is not unitary (max deviation {dev:.3e} > {tol:.1e})", path)
    return DenseUnitary(mat, tol=tol)


def _state(v, path: str, layout: tuple[int, ...] | None = None) -> StateVector:
    v = _object(v, path)
    lay = tuple(_int(f, _join(_join(path, "layout"), i), 1)
                for i, f in enumerate(_list(_require(v, "layout", path), _join(path, "layout"))))
    if layout is not None and lay != tuple(layout):
        raise InputError("E_SHAPE", f"layout {list(lay)} does not match expected {list(layout)}",
                         _join(path, "layout"))
    amps_path = _join(path, "amplitudes")
    amps = [_complex(z, _join(amps_path, i)) for i, z in enumerate(_list(_require(v, "amplitudes", path), amps_path))]
    dim = math.prod(lay)
    if len(amps) != dim:
        raise InputError("E_SHAPE", f"layout {list(lay)} needs {dim} amplitudes, got {len(amps)}", amps_path)
    norm = float(np.linalg.norm(amps))
    if abs(norm - 1.0) > VALID_TOL:
        raise InputError("E_NOT_NORMALIZED", f"state norm is {norm!r}, expected 1", amps_path)
    return StateVector(RegisterLayout(lay), amps)


def _gates(doc: dict, tol: float) -> GateTable:
    gates = _list(_require(doc, "gates"), "gates")
    mats = [_matrix(g, _join("gates", i), tol) for i, g in enumerate(gates)]
    dims = [m.dim for m in mats]
    for i, d in enumerate(dims):
        if d != dims[0]:
            raise InputError("E_SHAPE", f"gate has dim {d}, gates[0] has dim {dims[0]}", _join("gates", i))
    return GateTable(mats)


def _check_declared(doc: dict, key: str, actual: int) -> None:
    if key in doc and _int(doc[key], key, 1) != actual:
        raise InputError("E_SHAPE", f"declared {key}={doc[key]} but gates imply {actual}", key)


def _parse_qpu(doc: dict, tol: float) -> dict:
    table = _gates(doc, tol)
    _check_declared(doc, "M", table.M)
    _check_declared(doc, "N", table.N)
    prog = _require(doc, "program")
    if isinstance(prog, dict):
        program = _state(prog, "program", (table.M,))
    else:
        program = _int(prog, "program", 0)
        if program >= table.M:
            raise InputError("E_VALUE", f"program index {program} out of range [0, {table.M})", "program")
    out = {"table": table, "program": program, "data": _state(_require(doc, "data"), "data", (table.N,))}
    if "reference" in doc:
        out["reference"] = _state(doc["reference"], "reference", (table.M, table.N))
    return out


def _parse_threebus(doc: dict, tol: float) -> dict:
    table = _gates(doc, tol)
    _check_declared(doc, "M", table.M)
    _check_declared(doc, "N", table.N)
    slots = [_int(c, _join("slots", i), 0) for i, c in enumerate(_list(_require(doc, "slots"), "slots"))]
    current = _int(doc.get("current", 0), "current", 0)
    for i, c in enumerate(slots):
        if c >= table.M:
            raise InputError("E_VALUE", f"instruction {c} out of range [0, {table.M})", _join("slots", i))
    if current >= table.M:
        raise InputError("E_VALUE", f"instruction {current} out of range [0, {table.M})", "current")
    out = {
        "table": table,
        "memory": ProgramMemory(table.M, tuple(slots), current),
        "data": _state(_require(doc, "data"), "data", (table.N,)),
    }
    if "reference" in doc:
        out["reference"] = _state(doc["reference"], "reference", (table.N,))
    return out


def parse_program(v, path: str = "program") -> HybridProgram:
    v = _object(v, path)
    n = _int(_require(v, "n_qubits", path), _join(path, "n_qubits"), 1)
    lpath = _join(path, "layers")
    layers = []
    for li, layer in enumerate(_list(v.get("layers", []), lpath, nonempty=False)):
        here = _join(lpath, li)
        layer = _object(layer, here)
        rpath = _join(here, "rotations")
        rots = []
        for qi, triple in enumerate(_list(_require(layer, "rotations", here), rpath)):
            tpath = _join(rpath, qi)
            triple = _list(triple, tpath)
            if len(triple) != 3:
                raise InputError("E_SHAPE", f"rotation triple needs 3 parameters, got {len(triple)}", tpath)
            qs = tuple(_real(q, _join(tpath, j)) for j, q in enumerate(triple))
            for j, q in enumerate(qs):
                if not 0.0 <= q < 1.0:
                    raise InputError("E_VALUE", f"rotation parameter {q!r} outside [0, 1)", _join(tpath, j))
            rots.append(qs)
        if len(rots) != n:
            raise InputError("E_SHAPE", f"{len(rots)} rotation triples for {n} qubits", rpath)
        epath = _join(here, "entanglers")
        ents = []
        for ei, ent in enumerate(_list(layer.get("entanglers", []), epath, nonempty=False)):
            e_here = _join(epath, ei)
            ent = _object(ent, e_here)
            bit = _int(_require(ent, "bit", e_here), _join(e_here, "bit"), 0)
            if bit > 1:
                raise InputError("E_VALUE", f"entangler bit must be 0 or 1, got {bit}", _join(e_here, "bit"))
            c = _int(_require(ent, "control", e_here), _join(e_here, "control"), 0)
            t = _int(_require(ent, "target", e_here), _join(e_here, "target"), 0)
            for name, q in (("control", c), ("target", t)):
                if q >= n:
                    raise InputError("E_VALUE", f"qubit {q} out of range [0, {n})", _join(e_here, name))
            if c == t:
                raise InputError("E_VALUE", "control and target must differ", e_here)
            ents.append(Entangler(bit, c, t))
        layers.append(HybridLayer(tuple(rots), tuple(ents)))
    return HybridProgram(n, tuple(layers))


def _default_data(n: int) -> StateVector:
    return StateVector.basis([2] * n, 0)


def _parse_hybrid(doc: dict, tol: float) -> dict:
    prog = parse_program(_require(doc, "program"))
    qubits = (2,) * prog.n_qubits
    out = {"program": prog}
    out["data"] = _state(doc["data"], "data", qubits) if "data" in doc else _default_data(prog.n_qubits)
    if "reference" in doc:
        out["reference"] = _state(doc["reference"], "reference", qubits)
    return out


def parse_circuit(doc: dict, tol: float) -> CircuitIR:
    n = _int(_require(doc, "n_qubits"), "n_qubits", 1)
    instrs = []
    for i, ins in enumerate(_list(_require(doc, "circuit"), "circuit", nonempty=False)):
        here = _join("circuit", i)
        ins = _object(ins, here)
        op = _require(ins, "op", here)
        if op == "u":
            q = _int(_require(ins, "qubit", here), _join(here, "qubit"), 0)
            if "gate" in ins:
                mat = _matrix(ins["gate"], _join(here, "gate"), tol)
            else:
                mat = _matrix(_require(ins, "matrix", here), _join(here, "matrix"), tol)
            if mat.dim != 2:
                raise InputError("E_SHAPE", f"single-qubit gate must be 2x2, got dim {mat.dim}", _join(here, "matrix"))
            if q >= n:
                raise InputError("E_VALUE", f"qubit {q} out of range [0, {n})", _join(here, "qubit"))
            instrs.append(OneQubit(q, mat))
        elif op == "cnot":
            c = _int(_require(ins, "control", here), _join(here, "control"), 0)
            t = _int(_require(ins, "target", here), _join(here, "target"), 0)
            for name, q in (("control", c), ("target", t)):
                if q >= n:
                    raise InputError("E_VALUE", f"qubit {q} out of range [0, {n})", _join(here, name))
            if c == t:
                raise InputError("E_VALUE", "control and target must differ", here)
            instrs.append(Cnot(c, t))
        else:
            raise InputError("E_VALUE", f"unknown op {op!r}; expected 'u' or 'cnot'", _join(here, "op"))
    return CircuitIR(n, instrs)


def _parse_compile(doc: dict, tol: float) -> dict:
    circ = parse_circuit(doc, tol)
    qubits = (2,) * circ.n_qubits
    out = {"circuit": circ}
    out["data"] = _state(doc["data"], "data", qubits) if "data" in doc else _default_data(circ.n_qubits)
    if "reference" in doc:
        out["reference"] = _state(doc["reference"], "reference", qubits)
    return out


def _parse_sweep(doc: dict, tol: float) -> dict:
    Qs = [_int(q, _join("Qs", i), 1) for i, q in enumerate(_list(_require(doc, "Qs"), "Qs"))]
    out: dict = {"Qs": Qs}
    if "targets" in doc:
        out["targets"] = [_matrix(t, _join("targets", i), tol) for i, t in enumerate(_list(doc["targets"], "targets"))]
        for i, t in enumerate(out["targets"]):
            if t.dim != 2:
                raise InputError("E_SHAPE", f"sweep targets must be 2x2, got dim {t.dim}", _join("targets", i))
    elif "random_targets" in doc:
        out["random_targets"] = _int(doc["random_targets"], "random_targets", 1)
    else:
        raise InputError("E_MISSING_FIELD", "required field missing (or give 'random_targets')", "targets")
    return out


_PARSERS = {
    "qpu": _parse_qpu,
    "threebus": _parse_threebus,
    "hybrid": _parse_hybrid,
    "compile": _parse_compile,
    "sweep": _parse_sweep,
}


def parse_document(doc: Any, tol: float | None = None, seed: int | None = None) -> RunSpec:
    doc = _object(doc, "<document>")
    mode = _require(doc, "mode")
    if not isinstance(mode, str) or mode not in MODES:
        raise InputError("E_UNKNOWN_MODE", f"unknown mode {mode!r}; expected one of {list(MODES)}", "mode")
    fmt = doc.get("format", "json")
    if fmt not in FORMATS:
        raise InputError("E_VALUE", f"unknown format {fmt!r}; expected one of {list(FORMATS)}", "format")
    if tol is None:
        tols = _object(doc.get("tolerances", {}), "tolerances")
        tol = _real(tols.get("unitarity", VALID_TOL), "tolerances.unitarity")
        if tol <= 0:
            raise InputError("E_VALUE", "tolerance must be positive", "tolerances.unitarity")
    if seed is None:
        seed = _int(doc.get("seed", 0), "seed", 0)
    return RunSpec(mode, _PARSERS[mode](doc, tol), fmt, tol, seed)


def parse_input(text: str, tol: float | None = None, seed: int | None = None) -> RunSpec:
    """Parse a run document; every failure surfaces as :class:`InputError`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("E_SYNTAX", exc.msg, line=exc.lineno) from None
    try:
        return parse_document(doc, tol=tol, seed=seed)
    except InputError:
        raise
    except (ValueError, TypeError, IndexError) as exc:
        raise InputError("E_INVALID", str(exc)) from None


# --------------------------------------------------------------- emission


def complex_doc(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def matrix_doc(U) -> list:
    mat = U.entries if isinstance(U, DenseUnitary) else np.asarray(U)
    return [[complex_doc(z) for z in row] for row in mat]


def state_doc(s: StateVector) -> dict:
    return {"layout": list(s.layout.factors), "amplitudes": [complex_doc(z) for z in s.amplitudes]}


def program_doc(prog: HybridProgram) -> dict:
    return {
        "n_qubits": prog.n_qubits,
        "layers": [
            {
                "rotations": [list(t) for t in layer.rotations],
                "entanglers": [{"bit": e.bit, "control": e.control, "target": e.target} for e in layer.entanglers],
            }
            for layer in prog.layers
        ],
    }


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: insertion-ordered keys, floats at 17 significant digits.

    Lists of scalars stay on one line so amplitude pairs remain readable.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
