"""JSON interchange for matrices, channels, QSOTs, probes and process
matrices, plus parsing of named channels/states/unitaries."""
from __future__ import annotations

import ast
import json
import math
import operator
import re
from pathlib import Path
from typing import Any

import numpy as np

from . import quantum as qm
from .interferometer import InterferenceRecord, ProbeConfig
from .linops import ComplexMatrix, DimensionError
from .procmat import SPACES, ProcessMatrix
from .qsot import Qsot


class FormatError(ValueError):
    """Malformed interchange data."""


def _pairs(values) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).reshape(-1)]


def _complex_list(data) -> np.ndarray:
    try:
        return np.array([complex(float(re), float(im)) for re, im in data], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"entries must be [re, im] pairs: {exc}") from None


def matrix_to_json(m) -> dict:
    m = m if isinstance(m, ComplexMatrix) else ComplexMatrix(m)
    return {"dims": list(m.dims), "data": _pairs(m.data)}


def matrix_from_json(obj: dict) -> ComplexMatrix:
    if not isinstance(obj, dict) or "data" not in obj:
        raise FormatError("matrix object needs 'dims' and 'data'")
    data = _complex_list(obj["data"])
    if "shape" in obj:
        raise FormatError("rectangular matrix given where a square one is required")
    dims = [int(d) for d in obj.get("dims", [])]
    if not dims or any(d < 1 for d in dims):
        raise FormatError("dims must be a non-empty list of positive integers")
    n = int(np.prod(dims))
    if data.size != n * n:
        raise FormatError(f"data has {data.size} entries, dims {dims} need {n * n}")
    return ComplexMatrix(data.reshape(n, n), tuple(dims))


def rect_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"shape": list(a.shape), "data": _pairs(a)}


def rect_from_json(obj: dict) -> np.ndarray:
    if "shape" not in obj:
        return matrix_from_json(obj).data
    rows, cols = (int(x) for x in obj["shape"])
    data = _complex_list(obj["data"])
    if data.size != rows * cols:
        raise FormatError(f"data has {data.size} entries, shape needs {rows * cols}")
    return data.reshape(rows, cols)


# -- named objects --------------------------------------------------------

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow}


def eval_angle(text: str) -> float:
    """Evaluate arithmetic over numbers and ``pi`` (e.g. "-pi/2", "0.3*pi")."""
    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise FormatError(f"unsupported expression in {text!r}")
    try:
        value = walk(ast.parse(text.strip(), mode="eval"))
    except SyntaxError:
        raise FormatError(f"cannot parse angle {text!r}") from None
    except (ArithmeticError, ValueError):
        raise FormatError(f"angle {text!r} does not evaluate to a finite number") from None
    if not math.isfinite(value):
        raise FormatError(f"angle {text!r} does not evaluate to a finite number")
    return value


_NAMED = re.compile(r"^\s*([A-Za-z]+)\s*(?:\[(.*)\])?\s*$")


def parse_channel_spec(spec: str) -> qm.QuantumChannel:
    """Channels by name: id, X, Y, Z, X[t], Y[t], Z[t], dephase[t], depolarize[p]."""
    m = _NAMED.match(spec)
    if not m:
        raise FormatError(f"cannot parse channel {spec!r}")
    name, arg = m.group(1), m.group(2)
    if arg is None:
        if name == "id":
            return qm.identity_channel(2)
        if name in ("X", "Y", "Z"):
            return qm.pauli_channel(name)
    else:
        value = eval_angle(arg)
        if name in ("X", "Y", "Z"):
            ch = qm.rotation_channel(name, value)
        elif name == "dephase":
            ch = qm.dephasing(value)
        elif name == "depolarize":
            ch = qm.depolarizing(value)
        elif name == "id":
            return qm.identity_channel(int(value))
        else:
            raise FormatError(f"unknown channel {name!r}")
        ch.name = canonical_name(spec)
        return ch
    raise FormatError(f"unknown channel {spec!r}")


def canonical_name(spec: str) -> str:
    m = _NAMED.match(spec)
    if not m or m.group(2) is None:
        return spec.strip()
    return f"{m.group(1)}[{eval_angle(m.group(2))!r}]"


def parse_state_spec(spec: str) -> ComplexMatrix:
    """States by name: 0, 1, +, -, +i, -i, mixed, mixed:d."""
    spec = spec.strip()
    if spec == "mixed":
        return qm.maximally_mixed(2)
    if spec.startswith("mixed:"):
        return qm.maximally_mixed(int(spec.split(":", 1)[1]))
    try:
        return qm.projector(spec)
    except ValueError:
        raise FormatError(f"unknown state {spec!r}") from None


def parse_unitary_spec(spec: str) -> np.ndarray:
    """Unitaries by name: I, X, Y, Z, H, X[t], Y[t], Z[t]."""
    m = _NAMED.match(spec)
    if not m:
        raise FormatError(f"cannot parse unitary {spec!r}")
    name, arg = m.group(1), m.group(2)
    if arg is None:
        if name in qm.PAULIS:
            return qm.PAULIS[name].copy()
        if name == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    elif name in ("X", "Y", "Z"):
        return qm.rotation(name, eval_angle(arg))
    raise FormatError(f"unknown unitary {spec!r}")


# -- channels, states, dynamics ------------------------------------------

def channel_to_json(ch: qm.QuantumChannel) -> dict:
    out = {"in_dim": ch.in_dim, "out_dim": ch.out_dim, "kraus": [rect_to_json(k) for k in ch.kraus]}
    if ch.name:
        out["name"] = ch.name
    return out


def channel_from_json(obj, validate: bool = True) -> qm.QuantumChannel:
    """Kraus JSON or a named spec; ``validate=False`` skips the CPTP check."""
    if isinstance(obj, str):
        return parse_channel_spec(obj)
    if "kraus" not in obj:
        if "name" in obj:
            return parse_channel_spec(obj["name"])
        raise FormatError("channel object needs 'kraus'")
    ops = [rect_from_json(k) for k in obj["kraus"]]
    ch = qm.QuantumChannel(ops, name=obj.get("name"), validate=validate)
    if ("in_dim" in obj and int(obj["in_dim"]) != ch.in_dim) or \
            ("out_dim" in obj and int(obj["out_dim"]) != ch.out_dim):
        raise FormatError("declared in_dim/out_dim disagree with the Kraus operators")
    return ch


def state_from_json(obj) -> ComplexMatrix:
    if isinstance(obj, str):
        return parse_state_spec(obj)
    return matrix_from_json(obj)


def dynamics_to_json(dyn: qm.Dynamics, weight: float = 1.0) -> dict:
    return {"weight": weight, "state": matrix_to_json(dyn.initial), "channel": channel_to_json(dyn.channel)}


def dynamics_from_json(obj) -> tuple[float, qm.Dynamics]:
    try:
        state = state_from_json(obj["state"])
        channel = channel_from_json(obj["channel"])
    except KeyError as exc:
        raise FormatError(f"dynamics object missing {exc}") from None
    return float(obj.get("weight", 1.0)), qm.Dynamics(state, channel)


# -- QSOT, probe, process matrix, records --------------------------------

def qsot_to_json(q: Qsot) -> dict:
    out = matrix_to_json(q.matrix)
    out.update({"provenance": q.provenance, "regions": q.regions})
    return out


def qsot_from_json(obj: dict) -> Qsot:
    m = matrix_from_json(obj)
    if "regions" in obj and int(obj["regions"]) != len(m.dims):
        raise FormatError("'regions' disagrees with the number of dims")
    return Qsot(m, obj.get("provenance", "other"))


def probe_to_json(p: ProbeConfig) -> dict:
    return {"alpha0": _pairs([p.alpha0])[0], "alpha1": _pairs([p.alpha1])[0],
            "basis_plus": _pairs(p.basis_plus), "basis_minus": _pairs(p.basis_minus)}


def probe_from_json(obj: dict) -> ProbeConfig:
    try:
        a0 = _complex_list([obj["alpha0"]])[0]
        a1 = _complex_list([obj["alpha1"]])[0]
        return ProbeConfig(a0, a1, _complex_list(obj["basis_plus"]), _complex_list(obj["basis_minus"]))
    except KeyError as exc:
        raise FormatError(f"probe object missing {exc}") from None


def process_matrix_to_json(w: ProcessMatrix) -> dict:
    out = matrix_to_json(w.matrix)
    out["spaces"] = list(SPACES)
    return out


def process_matrix_from_json(obj: dict) -> ProcessMatrix:
    if obj.get("spaces", list(SPACES)) != list(SPACES):
        raise FormatError(f"process matrix spaces must be {list(SPACES)}")
    m = matrix_from_json(obj)
    if len(m.dims) != 4:
        raise DimensionError("process matrix needs four dims")
    return ProcessMatrix(m)


def record_to_json(r: InterferenceRecord) -> dict:
    return {"re_I": r.interference.real, "im_I": r.interference.imag,
            "p_plus": r.prob_plus, "p_minus": r.prob_minus}


def record_from_json(obj: dict) -> InterferenceRecord:
    return InterferenceRecord(complex(obj["re_I"], obj["im_I"]), float(obj["p_plus"]), float(obj["p_minus"]))


# -- files ----------------------------------------------------------------

def dumps(obj: Any) -> str:
    """Deterministic JSON text; floats use the shortest round-trip repr."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def save(obj: Any, path) -> None:
    Path(path).write_text(dumps(obj))
