"""OpenQASM 2.0 export, plus a small reader for the subset we emit."""
from __future__ import annotations

import ast
import math
import operator
import re
from pathlib import Path

from .synthesis import NativeOp

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

# exp(i t ZZ) and exp(i t (XX+YY)); YY uses rx basis changes, whose sign cancels on two qubits
CUSTOM_GATES = (
    "gate zz(theta) a,b { cx a,b; rz(-2*theta) b; cx a,b; }\n"
    "gate xy(theta) a,b { h a; h b; cx a,b; rz(-2*theta) b; cx a,b; h a; h b; "
    "rx(-pi/2) a; rx(-pi/2) b; cx a,b; rz(-2*theta) b; cx a,b; rx(pi/2) a; rx(pi/2) b; }\n"
)

_STMT = re.compile(r"^([a-z_][a-z0-9_]*)\s*(?:\(([^)]*)\))?\s+(.+)$")
_QARG = re.compile(r"^q\[(\d+)\]$")


def to_qasm(circuit) -> str:
    lines = [HEADER.rstrip("\n")]
    if circuit.gate_set == "NATIVE_XY_ZZ":
        lines.append(CUSTOM_GATES.rstrip("\n"))
    lines.append(f"qreg q[{circuit.n}];")
    for op in circuit.ops:
        args = ",".join(f"q[{w}]" for w in op.wires)
        if op.params:
            params = ",".join(repr(float(x)) for x in op.params)
            lines.append(f"{op.name}({params}) {args};")
        else:
            lines.append(f"{op.name} {args};")
    return "\n".join(lines) + "\n"


def export_qasm(circuit, path) -> Path:
    path = Path(path)
    path.write_text(to_qasm(circuit))
    return path


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def _eval(expr: str, env: dict[str, float]) -> float:
    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id == "pi":
                return math.pi
            if node.id in env:
                return env[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        raise ValueError(f"unsupported expression {expr!r}")

    return walk(ast.parse(expr.strip(), mode="eval"))


class QasmParseError(ValueError):
    pass


def parse_qasm(text: str, expand: bool = False) -> tuple[int, list[NativeOp]]:
    """Read the subset written by :func:`to_qasm`.

    With ``expand`` custom gate calls are replaced by their bodies.
    """
    gate_defs: dict[str, tuple[list[str], list[str], list[str]]] = {}
    n = None
    ops: list[NativeOp] = []
    body = re.sub(r"//[^\n]*", "", text)
    for m in re.finditer(r"gate\s+(\w+)\s*\(([^)]*)\)\s*([\w,\s]+)\{([^}]*)\}", body):
        name, params, qargs, inner = m.groups()
        gate_defs[name] = ([p.strip() for p in params.split(",") if p.strip()],
                           [q.strip() for q in qargs.split(",")],
                           [s.strip() for s in inner.split(";") if s.strip()])
    body = re.sub(r"gate\s+\w+\s*\([^)]*\)\s*[\w,\s]+\{[^}]*\}", "", body)
    stmts = [s.strip() for s in body.split(";") if s.strip()]
    if not stmts or stmts[0] != "OPENQASM 2.0":
        raise QasmParseError("missing 'OPENQASM 2.0;' header")
    for lineno, stmt in enumerate(stmts[1:], start=2):
        if stmt.startswith("include"):
            continue
        m = re.match(r"^qreg\s+q\[(\d+)\]$", stmt)
        if m:
            n = int(m.group(1))
            continue
        m = _STMT.match(stmt)
        if not m:
            raise QasmParseError(f"statement {lineno}: cannot parse {stmt!r}")
        name, params, qargs = m.groups()
        wires = []
        for q in qargs.split(","):
            qm = _QARG.match(q.strip())
            if not qm:
                raise QasmParseError(f"statement {lineno}: bad qubit argument {q!r}")
            wires.append(int(qm.group(1)))
        vals = tuple(_eval(p, {}) for p in params.split(",")) if params else ()
        if expand and name in gate_defs:
            ops.extend(_expand(gate_defs, name, vals, wires))
        else:
            ops.append(NativeOp(name, tuple(wires), vals))
    if n is None:
        raise QasmParseError("missing qreg declaration")
    return n, ops


def _expand(defs, name, vals, wires) -> list[NativeOp]:
    pnames, qnames, stmts = defs[name]
    env = dict(zip(pnames, vals))
    qmap = dict(zip(qnames, wires))
    out = []
    for stmt in stmts:
        m = _STMT.match(stmt)
        gname, params, qargs = m.groups()
        sub_wires = [qmap[q.strip()] for q in qargs.split(",")]
        sub_vals = tuple(_eval(p, env) for p in params.split(",")) if params else ()
        if gname in defs:
            out.extend(_expand(defs, gname, sub_vals, sub_wires))
        else:
            out.append(NativeOp(gname, tuple(sub_wires), sub_vals))
    return out
