"""Exact and floating discrete distributions induced by causal models.

Two numeric modes are supported. In ``exact`` mode every probability is a
:class:`fractions.Fraction` and conditional independence is decided by exact
equality. In ``float`` mode (used for quantum joints, which contain 1/sqrt(2))
comparisons use an absolute tolerance, ``DEFAULT_TOL`` unless overridden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .graphs import Dag, relatives
from .independence import CISet, CIStatement, all_statements

DEFAULT_TOL = 1e-9
ROW_TOL = 1e-12
FULL_SETS_LIMIT = 6

EXACT = "exact"
FLOAT = "float"


class DistributionError(ValueError):
    """Raised for invalid models or distributions; ``code`` names the failure."""

    def __init__(self, message: str, code: str = "invalid"):
        super().__init__(message)
        self.code = code


class ZeroProbabilityError(DistributionError):
    def __init__(self, message: str):
        super().__init__(message, "zero-probability")


def _mode_of(values: Iterable[Any]) -> str | None:
    kinds = set()
    for v in values:
        if isinstance(v, (Fraction, int)) and not isinstance(v, bool):
            kinds.add(EXACT)
        elif isinstance(v, (float, np.floating)):
            kinds.add(FLOAT)
        else:
            raise DistributionError(f"unsupported probability value {v!r}", "bad-value")
    if len(kinds) > 1:
        raise DistributionError("exact and float probabilities mixed", "mixed-mode")
    return kinds.pop() if kinds else None


def _coerce(v: Any, mode: str) -> Any:
    return Fraction(v) if mode == EXACT else float(v)


@dataclass
class Cpt:
    """P(child | parents) as a map from parent-value tuples to probability rows."""

    child: str
    parents: tuple[str, ...]
    table: dict[tuple[int, ...], tuple[Any, ...]]

    def __post_init__(self) -> None:
        self.parents = tuple(self.parents)
        self.table = {tuple(k): tuple(v) for k, v in self.table.items()}

    @classmethod
    def prior(cls, child: str, dist: Sequence[Any]) -> "Cpt":
        return cls(child, (), {(): tuple(dist)})

    @classmethod
    def from_rows(cls, child: str, parents: Sequence[str], parent_cards: Sequence[int], rows: Sequence[Sequence[Any]]) -> "Cpt":
        """Rows listed in lexicographic order of parent assignments."""
        keys = list(product(*(range(c) for c in parent_cards)))
        if len(keys) != len(rows):
            raise DistributionError(f"{child}: expected {len(keys)} rows, got {len(rows)}", "coverage")
        return cls(child, tuple(parents), dict(zip(keys, (tuple(r) for r in rows))))

    @classmethod
    def deterministic(
        cls,
        child: str,
        parents: Sequence[str],
        parent_cards: Sequence[int],
        func: Callable[..., int],
        card: int = 2,
    ) -> "Cpt":
        table = {}
        for key in product(*(range(c) for c in parent_cards)):
            row = [Fraction(0)] * card
            row[func(*key)] = Fraction(1)
            table[key] = tuple(row)
        return cls(child, tuple(parents), table)

    @property
    def card(self) -> int:
        return len(next(iter(self.table.values())))

    def row(self, assignment: Mapping[str, int]) -> tuple[Any, ...]:
        return self.table[tuple(assignment[p] for p in self.parents)]

    def mode(self) -> str | None:
        return _mode_of(x for row in self.table.values() for x in row)

    def reordered(self, parents: Sequence[str]) -> "Cpt":
        perm = [self.parents.index(p) for p in parents]
        return Cpt(self.child, tuple(parents), {tuple(k[i] for i in perm): v for k, v in self.table.items()})

    def map_rows(self, f: Callable[[tuple[Any, ...]], Sequence[Any]]) -> "Cpt":
        return Cpt(self.child, self.parents, {k: tuple(f(v)) for k, v in self.table.items()})

    def is_deterministic(self) -> bool:
        return all(sum(1 for x in row if x != 0) == 1 for row in self.table.values())


@dataclass
class CausalModel:
    """A DAG plus one CPT per vertex, with per-variable value counts."""

    dag: Dag
    cardinalities: dict[str, int]
    cpts: dict[str, Cpt]
    roles: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        dag = self.dag
        for v in dag.vertices:
            if v not in self.cardinalities:
                raise DistributionError(f"no cardinality for {v}", "cardinality")
            if v not in self.cpts:
                raise DistributionError(f"no CPT for {v}", "missing-cpt")
        extra = set(self.cpts) - set(dag.vertices)
        if extra:
            raise DistributionError(f"CPTs for unknown variables {sorted(extra)}", "unknown-variable")
        modes = set()
        fixed = {}
        for v in dag.vertices:
            cpt = self.cpts[v]
            want = dag.ordered_parents(v)
            if set(cpt.parents) != set(want) or len(cpt.parents) != len(want):
                raise DistributionError(
                    f"CPT for {v} lists parents {list(cpt.parents)} but the DAG has {list(want)}", "parent-mismatch"
                )
            if cpt.parents != want:
                cpt = cpt.reordered(want)
            cards = [self.cardinalities[p] for p in want]
            keys = set(product(*(range(c) for c in cards)))
            if set(cpt.table) != keys:
                missing = sorted(keys - set(cpt.table))
                raise DistributionError(f"CPT for {v} does not cover parent assignments {missing[:3]}", "coverage")
            mode = cpt.mode()
            modes.add(mode)
            for key in sorted(cpt.table):
                row = cpt.table[key]
                if len(row) != self.cardinalities[v]:
                    raise DistributionError(
                        f"CPT for {v}, row {key}: {len(row)} entries for cardinality {self.cardinalities[v]}",
                        "cardinality",
                    )
                if any(x < 0 for x in row):
                    raise DistributionError(f"CPT for {v}, row {key}: negative entry", "negative")
                total = sum(row)
                ok = total == 1 if mode == EXACT else abs(total - 1) <= ROW_TOL
                if not ok:
                    raise DistributionError(f"CPT for {v}, row {key}: sums to {total}, not 1", "row-sum")
            fixed[v] = cpt
        if len(modes - {None}) > 1:
            raise DistributionError("model mixes exact and float CPTs", "mixed-mode")
        self.cpts = fixed
        for role, v in self.roles.items():
            if v not in dag.vertices:
                raise DistributionError(f"role {role} names unknown variable {v}", "unknown-variable")

    @property
    def mode(self) -> str:
        modes = {c.mode() for c in self.cpts.values()} - {None}
        return modes.pop() if modes else EXACT

    @property
    def variables(self) -> tuple[str, ...]:
        return self.dag.vertices

    def replace_cpts(self, cpts: Mapping[str, Cpt]) -> "CausalModel":
        new = dict(self.cpts)
        new.update(cpts)
        return CausalModel(self.dag, dict(self.cardinalities), new, dict(self.roles))


@dataclass
class JointDistribution:
    """A dense probability table over an ordered tuple of variables."""

    variables: tuple[str, ...]
    cards: tuple[int, ...]
    probs: np.ndarray
    mode: str = EXACT
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        self.variables = tuple(self.variables)
        self.cards = tuple(self.cards)
        if len(set(self.variables)) != len(self.variables):
            raise DistributionError("duplicate variables in joint")
        if self.probs.shape != self.cards:
            raise DistributionError(f"table shape {self.probs.shape} does not match cardinalities {self.cards}")
        flat = self.probs.ravel()
        if any(x < 0 for x in flat):
            raise DistributionError("negative probability")
        total = sum(flat, Fraction(0) if self.mode == EXACT else 0.0)
        if self.mode == EXACT and total != 1:
            raise DistributionError(f"probabilities sum to {total}")
        if self.mode == FLOAT and abs(total - 1) > 1e-9:
            raise DistributionError(f"probabilities sum to {total}")

    @classmethod
    def from_dict(
        cls,
        variables: Sequence[str],
        cards: Sequence[int],
        entries: Mapping[tuple[int, ...] | str, Any],
        mode: str | None = None,
        tol: float = DEFAULT_TOL,
    ) -> "JointDistribution":
        """Keys are value tuples or digit strings such as ``"010"``."""
        mode = mode or _mode_of(entries.values()) or EXACT
        zero = Fraction(0) if mode == EXACT else 0.0
        arr = np.full(tuple(cards), zero, dtype=object if mode == EXACT else float)
        for key, p in entries.items():
            idx = tuple(int(c) for c in key) if isinstance(key, str) else tuple(key)
            arr[idx] = arr[idx] + _coerce(p, mode)
        return cls(tuple(variables), tuple(cards), arr, mode, tol)

    def prob(self, assignment: Mapping[str, int] | Sequence[int]) -> Any:
        if isinstance(assignment, Mapping):
            assignment = tuple(assignment[v] for v in self.variables)
        return self.probs[tuple(assignment)]

    def items(self) -> list[tuple[tuple[int, ...], Any]]:
        return [(idx, self.probs[idx]) for idx in product(*(range(c) for c in self.cards))]

    def support(self) -> list[tuple[tuple[int, ...], Any]]:
        return [(idx, p) for idx, p in self.items() if p != 0 and (self.mode == EXACT or p > self.tol)]

    def axis(self, v: str) -> int:
        try:
            return self.variables.index(v)
        except ValueError:
            raise DistributionError(f"unknown variable {v!r}", "unknown-variable") from None

    def card(self, v: str) -> int:
        return self.cards[self.axis(v)]

    def equals(self, other: "JointDistribution", tol: float | None = None) -> bool:
        if set(self.variables) != set(other.variables):
            return False
        other = other.reorder(self.variables)
        if self.cards != other.cards:
            return False
        if self.mode == EXACT and other.mode == EXACT:
            return bool(np.all(self.probs == other.probs))
        t = self.tol if tol is None else tol
        return bool(np.all(np.abs(self.probs.astype(float) - other.probs.astype(float)) <= t))

    def reorder(self, variables: Sequence[str]) -> "JointDistribution":
        axes = [self.axis(v) for v in variables]
        if len(axes) != len(self.variables):
            raise DistributionError("reorder needs every variable exactly once")
        return JointDistribution(
            tuple(variables), tuple(self.cards[a] for a in axes), np.transpose(self.probs, axes), self.mode, self.tol
        )

    def to_float(self, tol: float | None = None) -> "JointDistribution":
        return JointDistribution(
            self.variables, self.cards, self.probs.astype(float), FLOAT, self.tol if tol is None else tol
        )

    def bracket(self) -> str:
        """Mixture notation, e.g. ``1/4[000] + 1/4[010]``."""
        terms = []
        for idx, p in self.support():
            coeff = str(p) if self.mode == EXACT else f"{p:.10g}"
            terms.append(f"{coeff}[{''.join(str(i) for i in idx)}]")
        return " + ".join(terms)

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "cardinalities": list(self.cards),
            "mode": self.mode,
            "probabilities": {
                "".join(str(i) for i in idx) if max(self.cards, default=0) <= 10 else ",".join(map(str, idx)): (
                    str(p) if self.mode == EXACT else float(p)
                )
                for idx, p in self.items()
            },
        }


def point_mass(variables: Sequence[str], cards: Sequence[int], values: Sequence[int]) -> JointDistribution:
    return JointDistribution.from_dict(variables, cards, {tuple(values): Fraction(1)}, EXACT)


# ---------------------------------------------------------------------------
# operations


def joint_from_model(m: CausalModel, tol: float = DEFAULT_TOL) -> JointDistribution:
    """P(X1..Xn) as the product of every variable's CPT entry."""
    dag = m.dag
    names = dag.vertices
    cards = tuple(m.cardinalities[v] for v in names)
    mode = m.mode
    dtype = object if mode == EXACT else float
    one = Fraction(1) if mode == EXACT else 1.0
    probs = np.full(cards, one, dtype=dtype)
    for v in names:
        cpt = m.cpts[v]
        axes = [dag.index(p) for p in cpt.parents] + [dag.index(v)]
        local = np.empty(tuple(cards[a] for a in axes), dtype=dtype)
        for key, row in cpt.table.items():
            for val, p in enumerate(row):
                local[key + (val,)] = _coerce(p, mode)
        # broadcast the local factor into the full table
        order = np.argsort(axes)
        local = np.transpose(local, order)
        shape = [1] * len(names)
        for a in sorted(axes):
            shape[a] = cards[a]
        probs = probs * local.reshape(shape)
    return JointDistribution(names, cards, probs, mode, tol)


def marginalize(d: JointDistribution, keep: Iterable[str]) -> JointDistribution:
    """Sum out everything not in ``keep``; the result keeps ``d``'s variable order."""
    keep = set(keep)
    if not keep:
        raise DistributionError("cannot marginalize onto the empty set", "empty-marginal")
    for v in keep:
        d.axis(v)
    drop = tuple(i for i, v in enumerate(d.variables) if v not in keep)
    probs = d.probs.sum(axis=drop) if drop else d.probs.copy()
    if d.mode == EXACT:
        probs = np.asarray(probs, dtype=object).reshape(tuple(c for v, c in zip(d.variables, d.cards) if v in keep))
    variables = tuple(v for v in d.variables if v in keep)
    cards = tuple(d.cards[d.axis(v)] for v in variables)
    return JointDistribution(variables, cards, np.asarray(probs).reshape(cards), d.mode, d.tol)


def condition(d: JointDistribution, evidence: Mapping[str, int]) -> JointDistribution:
    """Renormalized distribution over the variables not fixed by ``evidence``."""
    if not evidence:
        return d
    index: list[Any] = [slice(None)] * len(d.variables)
    for v, val in evidence.items():
        a = d.axis(v)
        if not 0 <= val < d.cards[a]:
            raise DistributionError(f"value {val} out of range for {v}")
        index[a] = val
    rest = tuple(v for v in d.variables if v not in evidence)
    if not rest:
        raise DistributionError("evidence fixes every variable; nothing left to distribute")
    sub = d.probs[tuple(index)]
    total = sub.sum()
    if total == 0 or (d.mode == FLOAT and total <= d.tol):
        shown = ", ".join(f"{k}={v}" for k, v in sorted(evidence.items()))
        raise ZeroProbabilityError(f"evidence {shown} has probability zero")
    probs = sub / total
    if d.mode == EXACT:
        probs = np.asarray(probs, dtype=object)
    cards = tuple(d.cards[d.axis(v)] for v in rest)
    return JointDistribution(rest, cards, np.asarray(probs).reshape(cards), d.mode, d.tol)


def _grouped(d: JointDistribution, groups: Sequence[Sequence[str]]) -> np.ndarray:
    """Marginal over the union of ``groups`` reshaped to one axis per group."""
    flat = [v for g in groups for v in g]
    m = marginalize(d, flat).reorder(flat) if flat else None
    shape = tuple(math.prod(d.card(v) for v in g) for g in groups)
    return m.probs.reshape(shape)


def ci_holds(d: JointDistribution, s: CIStatement, tol: float | None = None) -> bool:
    """Decide P(X,Y|Z) = P(X|Z) P(Y|Z) for every z with P(Z=z) > 0."""
    xs, ys, zs = sorted(s.x), sorted(s.y), sorted(s.z)
    for v in s.variables:
        d.axis(v)
    pxyz = _grouped(d, [xs, ys, zs]) if zs else _grouped(d, [xs, ys])[:, :, None]
    pz = pxyz.sum(axis=(0, 1))
    pxz = pxyz.sum(axis=1)
    pyz = pxyz.sum(axis=0)
    if d.mode == EXACT:
        lhs = pxyz * pz[None, None, :]
        rhs = pxz[:, None, :] * pyz[None, :, :]
        return bool(np.all(lhs == rhs))
    t = d.tol if tol is None else tol
    live = pz > t
    if not np.any(live):
        return True
    pzl = pz[live]
    joint = pxyz[:, :, live] / pzl
    prod_ = (pxz[:, live] / pzl)[:, None, :] * (pyz[:, live] / pzl)[None, :, :]
    return bool(np.all(np.abs(joint - prod_) <= t))


def all_ci(d: JointDistribution, scope: str = "singleton_pairs", tol: float | None = None) -> CISet:
    """Every CI statement holding in ``d`` within the requested scope."""
    if scope == "full_sets":
        if len(d.variables) > FULL_SETS_LIMIT:
            raise DistributionError(
                f"full_sets scan refused for {len(d.variables)} variables (limit {FULL_SETS_LIMIT}); "
                "use scope='singleton_pairs'",
                "too-large",
            )
        stmts = all_statements(d.variables)
    elif scope == "singleton_pairs":
        stmts = all_statements(d.variables, singleton_pairs=True)
    else:
        raise ValueError(f"unknown scope {scope!r}")
    return CISet((s for s in stmts if ci_holds(d, s, tol)), d.variables)


def markov_ci(dag: Dag) -> CISet:
    """One (X ⊥ Nd(X) | Pa(X)) per vertex whose nondescendants extend past its parents."""
    out = []
    for v in dag.vertices:
        parents, _, nondesc = relatives(dag, v)
        rest = nondesc - parents
        if rest:
            out.append(CIStatement(frozenset([v]), rest, parents))
    return CISet(out, dag.vertices)


def deterministic_extension(m: CausalModel, seed: int | None = None, prefix: str = "U_") -> CausalModel:
    """Add a fresh exogenous parent to every endogenous variable and make its CPT a function.

    The new parent ranges over the cells of the common refinement of the
    cumulative distributions of all rows of the old CPT; the child takes the
    value whose cumulative interval contains the cell (inverse-transform
    sampling). Marginalizing the new parents out reproduces the original
    joint exactly. ``seed`` shuffles the labels of each new parent's values.
    """
    if m.mode != EXACT:
        raise DistributionError("deterministic extension needs exact probabilities", "mixed-mode")
    rng = np.random.default_rng(seed) if seed is not None else None
    dag = m.dag
    vertices = list(dag.vertices)
    edges = set(dag.edges)
    cards = dict(m.cardinalities)
    cpts = dict(m.cpts)
    for v in dag.vertices:
        if dag.is_exogenous(v):
            continue
        cpt = m.cpts[v]
        u = prefix + v
        while u in cards:
            u = "_" + u
        cumulative = {}
        points = {Fraction(0), Fraction(1)}
        for key, row in cpt.table.items():
            acc, cum = Fraction(0), []
            for p in row:
                acc += p
                cum.append(acc)
            cumulative[key] = cum
            points.update(cum)
        bounds = sorted(points)
        cells = list(zip(bounds, bounds[1:]))
        labels = list(range(len(cells)))
        if rng is not None:
            rng.shuffle(labels)
        prior = [Fraction(0)] * len(cells)
        for (lo, hi), lab in zip(cells, labels):
            prior[lab] = hi - lo
        vertices.append(u)
        edges.add((u, v))
        cards[u] = len(cells)
        cpts[u] = Cpt.prior(u, prior)
        table = {}
        for key, cum in cumulative.items():
            for (lo, _), lab in zip(cells, labels):
                val = next(j for j, c in enumerate(cum) if lo < c)
                row = [Fraction(0)] * cpt.card
                row[val] = Fraction(1)
                table[key + (lab,)] = tuple(row)
        cpts[v] = Cpt(v, cpt.parents + (u,), table)
    new_dag = Dag(tuple(vertices), frozenset(edges))
    return CausalModel(new_dag, cards, cpts, dict(m.roles))


def random_model(
    rng: np.random.Generator,
    n: int,
    edge_prob: float = 0.5,
    card: int = 2,
    max_weight: int = 20,
    names: Sequence[str] | None = None,
) -> CausalModel:
    """A random DAG (edges respect ``names`` order) with random positive rational CPTs."""
    names = list(names) if names is not None else [chr(ord("A") + i) for i in range(n)]
    edges = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_prob]
    dag = Dag(tuple(names), frozenset(edges))
    return random_cpts(rng, dag, {v: card for v in names}, max_weight)


def random_distribution(rng: np.random.Generator, k: int, max_weight: int = 20) -> tuple[Fraction, ...]:
    w = [int(x) for x in rng.integers(1, max_weight + 1, size=k)]
    t = sum(w)
    return tuple(Fraction(x, t) for x in w)


def random_cpts(rng: np.random.Generator, dag: Dag, cards: Mapping[str, int], max_weight: int = 20) -> CausalModel:
    cpts = {}
    for v in dag.vertices:
        pa = dag.ordered_parents(v)
        keys = product(*(range(cards[p]) for p in pa))
        cpts[v] = Cpt(v, pa, {k: random_distribution(rng, cards[v], max_weight) for k in keys})
    return CausalModel(dag, dict(cards), cpts)
