"""JSON distribution files.

Layout::

    {
      "family": "HK",
      "variables": [{"name": "Q", "cardinality": 1}, ...],
      "factors":  [{"child": ["Q"], "parents": [], "table": ["1"]}, ...],
      "encoders": [{"child": ["X1"], "parents": ["Q", "U1", "W1"], "table": [...]}],
      "channel":  {"child": ["Y1", "Y2"], "parents": ["X1", "X2"], "table": [...]},
      "common":   [{"u": "U1", "w": "W1", "name": "K1", "table": ["1/2", "1/2"]}]
    }

Tables are flat, row-major over ``parents + child`` axes, with entries
written as exact rationals ("1/32", "0.25", "1").  An encoder may give
``"map"`` instead of ``"table"``: one child index per parent configuration.
``common`` is optional; when present the file describes a base distribution
together with the Wyner common parts that lift it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .probspace import CommonPart, DistributionError, Factor, FactorSpec, Family, VariableDecl


class DistFileError(DistributionError):
    """Malformed distribution file (syntax or structure)."""


@dataclass(frozen=True)
class DistFile:
    spec: FactorSpec
    common: tuple[CommonPart, ...] = ()

    @property
    def lifted(self) -> bool:
        return bool(self.common)


def _fraction(text: Any, where: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise DistFileError(f"{where}: probabilities must be strings like \"1/32\" or integers, got {text!r}")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise DistFileError(f"{where}: cannot read {text!r} as a rational") from None


def _names(obj: dict, key: str, where: str) -> tuple[str, ...]:
    v = obj.get(key, [])
    if isinstance(v, str):
        return (v,)
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        raise DistFileError(f"{where}: '{key}' must be a name or a list of names")
    return tuple(v)


def _factor(obj: Any, cards: dict[str, int], where: str, allow_map: bool = False) -> Factor:
    if not isinstance(obj, dict):
        raise DistFileError(f"{where}: expected an object")
    child = _names(obj, "child", where)
    parents = _names(obj, "parents", where)
    if not child:
        raise DistFileError(f"{where}: missing 'child'")
    for n in child + parents:
        if n not in cards:
            raise DistFileError(f"{where}: undeclared variable {n}")
    pshape = tuple(cards[n] for n in parents)
    cshape = tuple(cards[n] for n in child)
    if allow_map and "map" in obj:
        flat = obj["map"]
        size = int(np.prod(pshape)) if pshape else 1
        if not isinstance(flat, list) or len(flat) != size:
            raise DistFileError(f"{where}: 'map' needs {size} entries")
        csize = int(np.prod(cshape))
        table = np.full((size, csize), Fraction(0), dtype=object)
        for r, v in enumerate(flat):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < csize:
                raise DistFileError(f"{where}: map entry {r} = {v!r} is not a valid output index")
            table[r, v] = Fraction(1)
        return Factor(child, parents, table.reshape(pshape + cshape))
    flat = obj.get("table")
    if not isinstance(flat, list):
        raise DistFileError(f"{where}: missing 'table' list")
    size = int(np.prod(pshape + cshape))
    if len(flat) != size:
        raise DistFileError(f"{where}: dimension mismatch, table has {len(flat)} entries, expected {size}")
    arr = np.empty(size, dtype=object)
    arr[:] = [_fraction(v, f"{where} entry {k}") for k, v in enumerate(flat)]
    return Factor(child, parents, arr.reshape(pshape + cshape))


def loads(text: str, source: str = "<string>") -> DistFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DistFileError(f"{source}:{e.lineno}:{e.colno}: syntax error: {e.msg}") from None
    if not isinstance(doc, dict):
        raise DistFileError(f"{source}: top level must be an object")
    unknown = set(doc) - {"family", "variables", "factors", "encoders", "channel", "common", "comment"}
    if unknown:
        raise DistFileError(f"{source}: unknown keys {sorted(unknown)}")
    try:
        family = Family(doc.get("family"))
    except ValueError:
        raise DistFileError(f"{source}: unknown family {doc.get('family')!r}") from None
    decls = []
    for k, v in enumerate(doc.get("variables", [])):
        if not isinstance(v, dict) or "name" not in v or "cardinality" not in v:
            raise DistFileError(f"{source}: variables[{k}] needs 'name' and 'cardinality'")
        decls.append(VariableDecl(v["name"], v["cardinality"]))
    cards = {d.name: d.cardinality for d in decls}
    if len(cards) != len(decls):
        raise DistFileError(f"{source}: duplicate variable names")
    factors = [_factor(f, cards, f"{source}: factors[{k}]") for k, f in enumerate(doc.get("factors", []))]
    encoders = [
        _factor(f, cards, f"{source}: encoders[{k}]", allow_map=True) for k, f in enumerate(doc.get("encoders", []))
    ]
    if "channel" not in doc:
        raise DistFileError(f"{source}: missing 'channel'")
    channel = _factor(doc["channel"], cards, f"{source}: channel")
    spec = FactorSpec(family, tuple(factors), tuple(encoders), channel, tuple(decls))
    common = []
    for k, c in enumerate(doc.get("common", [])):
        where = f"{source}: common[{k}]"
        if not isinstance(c, dict) or not {"u", "w", "table"} <= set(c):
            raise DistFileError(f"{where}: needs 'u', 'w' and 'table'")
        name = c.get("name", f"K{k + 1}")
        probs = [_fraction(v, f"{where} entry {i}") for i, v in enumerate(c["table"])]
        common.append(CommonPart(c["u"], c["w"], Factor((name,), (), probs)))
    return DistFile(spec, tuple(common))


def load(path: str | Path) -> DistFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DistFileError(f"{path}: {e.strerror or e}") from None
    except UnicodeDecodeError:
        raise DistFileError(f"{path}: not valid UTF-8") from None
    return loads(text, str(path))


def parse_dist(path: str | Path) -> FactorSpec:
    return load(path).spec


def _table_json(f: Factor) -> dict:
    return {
        "child": list(f.child),
        "parents": list(f.parents),
        "table": [str(Fraction(v)) for v in f.table.ravel()],
    }


def dumps(spec: FactorSpec, common: Sequence[CommonPart] = ()) -> str:
    cards = spec.cards()
    declared = {d.name: d.cardinality for d in spec.variables}
    cards.update(declared)
    order = [d.name for d in spec.variables] + [n for n in cards if n not in declared]
    doc: dict[str, Any] = {
        "family": spec.family.value,
        "variables": [{"name": n, "cardinality": int(cards[n])} for n in order],
        "factors": [_table_json(f) for f in spec.factors],
        "encoders": [_table_json(f) for f in spec.encoders],
        "channel": _table_json(spec.channel),
    }
    if common:
        doc["common"] = [
            {"u": c.u, "w": c.w, "name": c.name, "table": [str(Fraction(v)) for v in c.table.table.ravel()]}
            for c in common
        ]
    # one line per declaration and per table keeps files diffable
    parts = []
    for key, value in doc.items():
        if isinstance(value, list):
            inner = ",\n".join("  " + json.dumps(v) for v in value)
            parts.append(f" {json.dumps(key)}: [\n{inner}\n ]" if value else f" {json.dumps(key)}: []")
        else:
            parts.append(f" {json.dumps(key)}: {json.dumps(value)}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def dump(path: str | Path, spec: FactorSpec, common: Sequence[CommonPart] = ()) -> None:
    Path(path).write_text(dumps(spec, common), encoding="utf-8", newline="\n")
