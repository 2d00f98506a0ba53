"""Reading and writing causal models as JSON.

Layout::

    {"variables": [{"name": "A", "cardinality": 2}, ...],
     "edges": [["A", "C"], ...],
     "cpts": {"C": [{"given": {"A": 0, "B": 1}, "dist": ["1/2", "1/2"]}, ...]},
     "roles": {"S": "S", ...}}

Exact probabilities are "num/den" strings, floats are JSON numbers. Errors
carry a code and the JSON path of the offending value.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Any

from .distributions import EXACT, CausalModel, Cpt, DistributionError
from .graphs import Dag, GraphError

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


class ModelFormatError(DistributionError):
    def __init__(self, message: str, code: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message, code)


def _number(value: Any, where: str) -> Fraction | float:
    if isinstance(value, bool):
        raise ModelFormatError(f"expected a probability, got {value!r}", "bad-rational", where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        m = _RATIONAL.match(value)
        if not m:
            raise ModelFormatError(f"malformed rational {value!r}", "bad-rational", where)
        num, den = int(m.group(1)), int(m.group(2) or 1)
        if den == 0:
            raise ModelFormatError(f"zero denominator in {value!r}", "bad-rational", where)
        return Fraction(num, den)
    raise ModelFormatError(f"expected a probability, got {value!r}", "bad-rational", where)


def _format(value: Any) -> Any:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return float(value)


def _expect(cond: bool, message: str, where: str, code: str = "schema") -> None:
    if not cond:
        raise ModelFormatError(message, code, where)


def model_from_json(data: Any) -> CausalModel:
    _expect(isinstance(data, dict), "model must be a JSON object", "$")
    for key in ("variables", "edges", "cpts"):
        _expect(key in data, f"missing key {key!r}", "$")
    variables = data["variables"]
    _expect(isinstance(variables, list) and bool(variables), "variables must be a nonempty list", "variables")
    names, cards = [], {}
    for i, entry in enumerate(variables):
        where = f"variables[{i}]"
        _expect(isinstance(entry, dict) and "name" in entry, "variable needs a name", where)
        name, card = entry["name"], entry.get("cardinality", 2)
        _expect(isinstance(name, str) and bool(name), "name must be a nonempty string", where)
        _expect(name not in cards, f"duplicate variable {name}", where)
        _expect(isinstance(card, int) and not isinstance(card, bool) and card >= 1, "cardinality must be a positive integer", where, "cardinality")
        names.append(name)
        cards[name] = card
    edges = []
    for i, e in enumerate(data["edges"]):
        where = f"edges[{i}]"
        _expect(isinstance(e, list) and len(e) == 2, "edge must be [parent, child]", where)
        for v in e:
            _expect(v in cards, f"unknown variable {v!r}", where, "unknown-variable")
        edges.append((e[0], e[1]))
    try:
        dag = Dag(tuple(names), frozenset(edges))
    except GraphError as err:
        raise ModelFormatError(str(err), "graph", "edges") from err
    raw = data["cpts"]
    _expect(isinstance(raw, dict), "cpts must map variables to row lists", "cpts")
    for v in raw:
        _expect(v in cards, f"CPT for unknown variable {v!r}", "cpts", "unknown-variable")
    cpts = {}
    for v in names:
        where = f"cpts.{v}"
        _expect(v in raw, f"no CPT for {v}", "cpts", "missing-cpt")
        rows = raw[v]
        _expect(isinstance(rows, list) and bool(rows), "CPT must be a nonempty list of rows", where)
        parents: tuple[str, ...] | None = None
        table = {}
        for i, row in enumerate(rows):
            rw = f"{where}[{i}]"
            _expect(isinstance(row, dict) and "dist" in row, "row needs a dist", rw)
            given = row.get("given", {})
            _expect(isinstance(given, dict), "given must map parents to values", rw)
            if parents is None:
                parents = tuple(sorted(given, key=dag.index)) if all(p in cards for p in given) else tuple(given)
                if set(parents) != dag.parents(v):
                    raise ModelFormatError(
                        f"CPT parents {sorted(parents)} differ from DAG parents {dag.sorted(dag.parents(v))}",
                        "parent-mismatch",
                        rw,
                    )
            _expect(set(given) == set(parents), f"row conditions on {sorted(given)}, expected {list(parents)}", rw, "parent-mismatch")
            key = []
            for p in parents:
                val = given[p]
                _expect(
                    isinstance(val, int) and not isinstance(val, bool) and 0 <= val < cards[p],
                    f"value {val!r} out of range for {p}",
                    f"{rw}.given.{p}",
                    "bad-value",
                )
                key.append(val)
            _expect(tuple(key) not in table, f"duplicate row for {dict(zip(parents, key))}", rw, "coverage")
            dist = row["dist"]
            _expect(isinstance(dist, list), "dist must be a list", f"{rw}.dist")
            _expect(len(dist) == cards[v], f"{len(dist)} entries for cardinality {cards[v]}", f"{rw}.dist", "cardinality")
            probs = [_number(x, f"{rw}.dist[{j}]") for j, x in enumerate(dist)]
            for j, x in enumerate(probs):
                _expect(x >= 0, f"negative probability {dist[j]}", f"{rw}.dist[{j}]", "negative")
            exact = all(isinstance(x, Fraction) for x in probs)
            total = sum(probs)
            ok = total == 1 if exact else abs(total - 1) <= 1e-12
            _expect(ok, f"row for {v} given {dict(zip(parents, key))} sums to {total}, not 1", f"{rw}.dist", "row-sum")
            table[tuple(key)] = tuple(probs)
        assert parents is not None
        expected = set(product(*(range(cards[p]) for p in parents)))
        missing = sorted(expected - set(table))
        _expect(not missing, f"no rows for parent values {missing[:3]}", where, "coverage")
        cpts[v] = Cpt(v, parents, table)
    roles = data.get("roles", {})
    _expect(isinstance(roles, dict), "roles must map role names to variables", "roles")
    for r, v in roles.items():
        _expect(v in cards, f"role {r} names unknown variable {v!r}", f"roles.{r}", "unknown-variable")
    # mixing exact strings with float numbers is ambiguous
    floaty = any(isinstance(x, float) for c in cpts.values() for row in c.table.values() for x in row)
    if floaty:
        cpts = {v: c.map_rows(lambda row: [float(x) for x in row]) for v, c in cpts.items()}
    return CausalModel(dag, cards, cpts, dict(roles))


def model_to_json(m: CausalModel) -> dict:
    dag = m.dag
    exact = m.mode == EXACT
    cpts = {}
    for v in dag.vertices:
        cpt = m.cpts[v]
        rows = []
        for key in sorted(cpt.table):
            row = cpt.table[key]
            dist = [_format(Fraction(x) if exact else x) for x in row]
            rows.append({"given": dict(zip(cpt.parents, key)), "dist": dist})
        cpts[v] = rows
    out: dict[str, Any] = {
        "variables": [{"name": v, "cardinality": m.cardinalities[v]} for v in dag.vertices],
        "edges": [list(e) for e in dag.sorted_edges()],
        "cpts": cpts,
    }
    if m.roles:
        out["roles"] = {r: m.roles[r] for r in sorted(m.roles)}
    return out


def dumps_model(m: CausalModel) -> str:
    return json.dumps(model_to_json(m), indent=2, ensure_ascii=False) + "\n"


def loads_model(text: str) -> CausalModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelFormatError(f"invalid JSON: {err.msg}", "parse", f"line {err.lineno} column {err.colno}") from err
    return model_from_json(data)


def load_model(path: str | Path) -> CausalModel:
    return loads_model(Path(path).read_text(encoding="utf-8"))


def save_model(m: CausalModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(m), encoding="utf-8")
