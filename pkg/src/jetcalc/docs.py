"""JSON documents for algebras, bimodules, operators and derivation pairs.

Scalars are written as strings (``"3"``, ``"-1/2"``); integers are also
accepted on input.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algcore import Algebra, make_algebra
from .bimod import Bimodule, LinMap, free_bimodule, make_bimodule
from .errors import MalformedInput
from .exactla import Field, field_from_tag
from .ncdiff import DerivationWitness


def load_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInput(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput(f"{path}: top level must be a JSON object")
    return doc


def dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def encode(field: Field, arr) -> list:
    arr = np.asarray(arr)
    if arr.ndim == 0:
        return field.fmt(arr.item())
    return [encode(field, x) for x in arr]


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise MalformedInput(f"{where}: missing field {key!r}")
    return doc[key]


def _array(field: Field, data, shape: tuple, where: str) -> np.ndarray:
    try:
        arr = field.array(data)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"{where}: {exc}") from exc
    if arr.shape != shape:
        raise MalformedInput(f"{where}: expected shape {shape}, got {arr.shape}")
    return arr


# ---------------------------------------------------------------------------
# algebras


def algebra_to_doc(alg: Algebra) -> dict:
    doc = {
        "field": alg.field.tag(),
        "dim": alg.dim,
        "structure": encode(alg.field, alg.structure),
        "unit": encode(alg.field, alg.unit),
    }
    if alg.names:
        doc["basis_names"] = list(alg.names)
    return doc


def algebra_from_doc(doc: dict, where: str = "algebra") -> Algebra:
    field = field_from_tag(_require(doc, "field", where))
    n = _require(doc, "dim", where)
    if not isinstance(n, int) or n < 1:
        raise MalformedInput(f"{where}: dim must be a positive integer")
    structure = _array(field, _require(doc, "structure", where), (n, n, n), f"{where}.structure")
    unit = doc.get("unit")
    if unit is not None:
        unit = _array(field, unit, (n,), f"{where}.unit")
    names = tuple(doc.get("basis_names", ()))
    return make_algebra(field, structure, unit, names)


def load_algebra(path: str | Path) -> tuple[Algebra, dict]:
    doc = load_json(path)
    return algebra_from_doc(doc, str(path)), doc


# ---------------------------------------------------------------------------
# bimodules


def bimodule_to_doc(mod: Bimodule, inline_algebra: bool = True) -> dict:
    f = mod.field
    doc = {
        "dim": mod.dim,
        "left": encode(f, mod.left),
        "right": encode(f, mod.right),
        "central": bool(mod.central),
    }
    if inline_algebra:
        doc["algebra"] = algebra_to_doc(mod.algebra)
    if mod.names:
        doc["basis_names"] = list(mod.names)
    if mod.generator is not None:
        doc["generator"] = encode(f, mod.generator)
    return doc


def _same_algebra(a: Algebra, b: Algebra) -> bool:
    return (a.field == b.field and a.dim == b.dim
            and np.array_equal(a.structure, b.structure) and np.array_equal(a.unit, b.unit))


def bimodule_from_doc(doc: dict, alg: Algebra, where: str = "bimodule",
                      base_dir: Path | None = None) -> Bimodule:
    """Parse a bimodule over ``alg``.

    An embedded ``algebra`` (inline object or path) must agree with ``alg``.
    ``{"free": k}`` is shorthand for the free bimodule of rank k (k = 1 is
    the regular bimodule).
    """
    if "algebra" in doc:
        ref = doc["algebra"]
        if isinstance(ref, str):
            path = Path(ref) if base_dir is None else base_dir / ref
            other, _ = load_algebra(path)
        else:
            other = algebra_from_doc(ref, f"{where}.algebra")
        if not _same_algebra(other, alg):
            raise MalformedInput(f"{where}: embedded algebra differs from the given algebra")
    if "free" in doc:
        k = doc["free"]
        if not isinstance(k, int) or k < 0:
            raise MalformedInput(f"{where}: free rank must be a non-negative integer")
        return free_bimodule(alg, k)
    f, n = alg.field, alg.dim
    m = _require(doc, "dim", where)
    if not isinstance(m, int) or m < 0:
        raise MalformedInput(f"{where}: dim must be a non-negative integer")
    if m == 0:
        left, right = f.zeros((n, 0, 0)), f.zeros((0, n, 0))
    else:
        left = _array(f, _require(doc, "left", where), (n, m, m), f"{where}.left")
        right = _array(f, _require(doc, "right", where), (m, n, m), f"{where}.right")
    central = bool(doc.get("central", False))
    gen = doc.get("generator")
    if gen is not None:
        gen = _array(f, gen, (m,), f"{where}.generator")
    return make_bimodule(alg, left, right, central, generator=gen,
                         names=tuple(doc.get("basis_names", ())))


def load_bimodule(path: str | Path, alg: Algebra) -> tuple[Bimodule, dict]:
    doc = load_json(path)
    return bimodule_from_doc(doc, alg, str(path), Path(path).parent), doc


# ---------------------------------------------------------------------------
# operators and derivation pairs


def operator_to_doc(op: LinMap) -> dict:
    return {"matrix": encode(op.field, op.matrix)}


def operator_from_doc(doc: dict, P: Bimodule, Q: Bimodule, where: str = "operator") -> LinMap:
    mat = _array(P.field, _require(doc, "matrix", where), (Q.dim, P.dim), f"{where}.matrix")
    return LinMap(P, Q, mat)


def witness_to_doc(field: Field, w: DerivationWitness) -> dict:
    return {"d_right": encode(field, w.d_right), "d_left": encode(field, w.d_left)}


def witness_from_doc(doc: dict, P: Bimodule, Q: Bimodule, where: str = "witness") -> DerivationWitness:
    shape = (P.algebra.dim, Q.dim, P.dim)
    return DerivationWitness(
        _array(P.field, _require(doc, "d_right", where), shape, f"{where}.d_right"),
        _array(P.field, _require(doc, "d_left", where), shape, f"{where}.d_left"))
