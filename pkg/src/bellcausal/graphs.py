"""DAGs, causal orderings, d-separation and latent-variable patterns.

Vertices are identified by their string names; a vertex's index is its
position in ``Dag.vertices``. Every output that lists vertices, edges or
statements is ordered by index or lexicographically so that reports and DOT
files are byte-reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Iterator

from .independence import CISet, CIStatement, all_statements


class GraphError(ValueError):
    pass


class CycleError(GraphError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("directed cycle " + " -> ".join(cycle))


def _as_set(v: Iterable[str] | str) -> frozenset[str]:
    return frozenset([v]) if isinstance(v, str) else frozenset(v)


def _find_cycle(vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[str] | None:
    children: dict[str, list[str]] = {v: [] for v in vertices}
    for a, b in edges:
        children[a].append(b)
    state: dict[str, int] = {}
    stack: list[str] = []

    def visit(v: str) -> list[str] | None:
        state[v] = 1
        stack.append(v)
        for w in children[v]:
            if state.get(w) == 1:
                return stack[stack.index(w):] + [w]
            if w not in state:
                found = visit(w)
                if found:
                    return found
        stack.pop()
        state[v] = 2
        return None

    for v in children:
        if v not in state:
            found = visit(v)
            if found:
                return found
    return None


@dataclass(frozen=True)
class Dag:
    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError(f"duplicate vertex names in {self.vertices}")
        known = set(self.vertices)
        for a, b in self.edges:
            if a not in known or b not in known:
                raise GraphError(f"edge {a}->{b} uses an unknown vertex")
            if a == b:
                raise GraphError(f"self-loop on {a}")
        cycle = _find_cycle(self.vertices, self.edges)
        if cycle:
            raise CycleError(cycle)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]], vertices: Iterable[str] = ()) -> "Dag":
        """Build a DAG, listing vertices first from ``vertices`` then in edge order."""
        order: list[str] = []
        for v in vertices:
            if v not in order:
                order.append(v)
        edges = list(edges)
        for a, b in edges:
            for v in (a, b):
                if v not in order:
                    order.append(v)
        return cls(tuple(order), frozenset(edges))

    @classmethod
    def parse(cls, text: str, vertices: Iterable[str] = ()) -> "Dag":
        """``Dag.parse("W->X, W->Y, S->X")``."""
        edges = []
        for part in text.replace(";", ",").split(","):
            part = part.strip()
            if not part:
                continue
            chain = [p.strip() for p in part.split("->")]
            edges.extend(zip(chain, chain[1:]))
        return cls.from_edges(edges, vertices)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def sorted(self, vs: Iterable[str]) -> list[str]:
        return sorted(vs, key=self.index)

    @cached_property
    def _parents(self) -> dict[str, frozenset[str]]:
        out: dict[str, set[str]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            out[b].add(a)
        return {v: frozenset(p) for v, p in out.items()}

    @cached_property
    def _children(self) -> dict[str, frozenset[str]]:
        out: dict[str, set[str]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            out[a].add(b)
        return {v: frozenset(c) for v, c in out.items()}

    def parents(self, v: str) -> frozenset[str]:
        self.index(v)
        return self._parents[v]

    def children(self, v: str) -> frozenset[str]:
        self.index(v)
        return self._children[v]

    def ordered_parents(self, v: str) -> tuple[str, ...]:
        return tuple(self.sorted(self.parents(v)))

    @cached_property
    def _descendants(self) -> dict[str, frozenset[str]]:
        out: dict[str, frozenset[str]] = {}
        for v in reversed(self.topological_order()):
            acc: set[str] = set()
            for c in self._children[v]:
                acc.add(c)
                acc |= out[c]
            out[v] = frozenset(acc)
        return out

    def descendants(self, v: str) -> frozenset[str]:
        self.index(v)
        return self._descendants[v]

    def ancestors(self, v: str) -> frozenset[str]:
        self.index(v)
        return frozenset(u for u in self.vertices if v in self._descendants[u])

    def adjacent(self, a: str, b: str) -> bool:
        return (a, b) in self.edges or (b, a) in self.edges

    def is_exogenous(self, v: str) -> bool:
        return not self.parents(v)

    def topological_order(self) -> list[str]:
        """The lexicographically least (by index) topological order."""
        indeg = {v: 0 for v in self.vertices}
        for _, b in self.edges:
            indeg[b] += 1
        order: list[str] = []
        ready = [v for v in self.vertices if indeg[v] == 0]
        while ready:
            ready.sort(key=lambda v: self._index[v])
            v = ready.pop(0)
            order.append(v)
            for c in self._children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        return order

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges, key=lambda e: (self._index[e[0]], self._index[e[1]]))

    def with_edges(self, add: Iterable[tuple[str, str]] = (), remove: Iterable[tuple[str, str]] = ()) -> "Dag":
        return Dag(self.vertices, (self.edges - set(remove)) | set(add))

    def __str__(self) -> str:
        parts = []
        for v in self.vertices:
            pa = self.ordered_parents(v)
            parts.append(f"[{v}|{','.join(pa)}]" if pa else f"[{v}]")
        return "".join(parts)


def relatives(dag: Dag, v: str) -> tuple[frozenset[str], frozenset[str], frozenset[str]]:
    """Parents, descendants (excluding ``v``) and nondescendants of ``v``."""
    parents = dag.parents(v)
    desc = dag.descendants(v)
    nondesc = frozenset(dag.vertices) - desc - {v}
    return parents, desc, nondesc


def topological_orderings(dag: Dag, constraints: Iterable[tuple[str, str]] = ()) -> list[tuple[str, ...]]:
    """All total orders consistent with the DAG edges and ``(before, after)`` pairs.

    Orders are produced in lexicographic order of vertex index.
    """
    constraints = set(constraints)
    for a, b in constraints:
        dag.index(a), dag.index(b)
    cycle = _find_cycle(dag.vertices, dag.edges | constraints)
    if cycle:
        raise GraphError("ordering constraints contradict each other or the DAG: " + " < ".join(cycle))
    before: dict[str, set[str]] = {v: set() for v in dag.vertices}
    for a, b in dag.edges | constraints:
        before[b].add(a)

    out: list[tuple[str, ...]] = []
    prefix: list[str] = []
    placed: set[str] = set()

    def extend() -> None:
        if len(prefix) == len(dag.vertices):
            out.append(tuple(prefix))
            return
        for v in dag.vertices:
            if v not in placed and before[v] <= placed:
                prefix.append(v)
                placed.add(v)
                extend()
                placed.discard(v)
                prefix.pop()

    extend()
    return out


def _open_paths_exist(dag: Dag, sources: frozenset[str], targets: frozenset[str], z: frozenset[str]) -> bool:
    """Search simple undirected paths from ``sources`` to ``targets``, pruning at the first block."""
    # collider at c is open iff c or one of its descendants is conditioned on
    collider_open = {c: c in z or bool(dag._descendants[c] & z) for c in dag.vertices}
    neighbours: dict[str, list[tuple[str, bool]]] = {v: [] for v in dag.vertices}
    for a, b in dag.sorted_edges():
        neighbours[a].append((b, True))  # arrowhead at b when walking a -> b
        neighbours[b].append((a, False))

    def walk(v: str, into_v: bool, visited: set[str]) -> bool:
        for w, into_w in neighbours[v]:
            if w in visited:
                continue
            # v is a collider on this path iff both edges point into v
            collider = into_v and not into_w
            blocked = (not collider_open[v]) if collider else (v in z)
            if blocked:
                continue
            if w in targets:
                return True
            visited.add(w)
            if walk(w, into_w, visited):
                return True
            visited.discard(w)
        return False

    for s in sorted(sources, key=dag.index):
        for w, into_w in neighbours[s]:
            if w in targets:
                return True
            if walk(w, into_w, {s, w}):
                return True
    return False


def d_separated(dag: Dag, x: Iterable[str] | str, y: Iterable[str] | str, z: Iterable[str] | str = ()) -> bool:
    """True iff ``z`` blocks every path between ``x`` and ``y``.

    A path is blocked when it passes through a chain or fork node in ``z``,
    or through a collider that is neither in ``z`` nor an ancestor of a
    member of ``z``.
    """
    xs, ys, zs = _as_set(x), _as_set(y), _as_set(z)
    for v in xs | ys | zs:
        dag.index(v)
    if not xs or not ys:
        raise GraphError("d-separation needs nonempty X and Y")
    if xs & ys or xs & zs or ys & zs:
        raise GraphError("X, Y and Z must be pairwise disjoint")
    return not _open_paths_exist(dag, xs, ys, zs)


def dsep_ci_set(dag: Dag, observed: Iterable[str] | None = None, scope: str = "full_sets") -> CISet:
    """Every CI statement over ``observed`` that d-separation forces in ``dag``.

    Set-valued statements are assembled from the singleton-pair table, since
    (X ⊥ Y | Z) holds iff every pair (x, y) is separated by Z.
    """
    obs = frozenset(dag.vertices if observed is None else observed)
    for v in obs:
        dag.index(v)
    pair_sep: dict[tuple[frozenset[str], frozenset[str]], bool] = {}
    for s in all_statements(obs, singleton_pairs=True):
        pair_sep[(s.x | s.y, s.z)] = not _open_paths_exist(dag, s.x, s.y, s.z)
    if scope == "singleton_pairs":
        return CISet((s for s in all_statements(obs, singleton_pairs=True) if pair_sep[(s.x | s.y, s.z)]), obs)
    if scope != "full_sets":
        raise ValueError(f"unknown scope {scope!r}")
    out = []
    for s in all_statements(obs):
        if all(pair_sep[(frozenset((a, b)), s.z)] for a in s.x for b in s.y):
            out.append(s)
    return CISet(out, obs)


def v_structures(dag: Dag) -> set[tuple[str, str, str]]:
    """Triples (P1, C, P2) with P1 -> C <- P2 and P1, P2 non-adjacent; P1 precedes P2 by index."""
    out = set()
    for c in dag.vertices:
        for p1, p2 in combinations(dag.sorted(dag.parents(c)), 2):
            if not dag.adjacent(p1, p2):
                out.add((p1, c, p2))
    return out


# ---------------------------------------------------------------------------
# latent structures and patterns


@dataclass(frozen=True)
class LatentStructure:
    """A DAG whose latent vertices are exogenous common causes of observed ones."""

    dag: Dag
    latent: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "latent", frozenset(self.latent))
        for v in self.latent:
            if self.dag.parents(v):
                raise GraphError(f"latent {v} must be exogenous")
            kids = self.dag.children(v)
            if len(kids) < 2:
                raise GraphError(f"latent {v} must have at least two children")
            if kids & self.latent:
                raise GraphError(f"latent {v} must only cause observed variables")

    @classmethod
    def build(
        cls,
        observed: Iterable[str],
        edges: Iterable[tuple[str, str]] = (),
        confounded: Iterable[Iterable[str]] = (),
        prefix: str = "L",
    ) -> "LatentStructure":
        """Observed vertices and edges plus one fresh latent per child set, named ``L1``, ``L2``..."""
        obs = list(observed)
        vertices = list(obs)
        all_edges = list(edges)
        latent = []
        k = 0
        for kids in confounded:
            k += 1
            name = f"{prefix}{k}"
            while name in obs:
                k += 1
                name = f"{prefix}{k}"
            vertices.append(name)
            latent.append(name)
            all_edges.extend((name, c) for c in sorted(kids, key=obs.index))
        return cls(Dag(tuple(vertices), frozenset(all_edges)), frozenset(latent))

    @cached_property
    def observed(self) -> tuple[str, ...]:
        return tuple(v for v in self.dag.vertices if v not in self.latent)

    @cached_property
    def observed_edges(self) -> frozenset[tuple[str, str]]:
        return frozenset((a, b) for a, b in self.dag.edges if a not in self.latent)

    @cached_property
    def confounded_sets(self) -> tuple[frozenset[str], ...]:
        idx = self.dag.index
        sets = [self.dag.children(l) for l in self.latent]
        return tuple(sorted(sets, key=lambda s: (len(s), sorted(idx(v) for v in s))))

    @property
    def is_pairwise(self) -> bool:
        return all(len(s) == 2 for s in self.confounded_sets)

    def key(self) -> tuple:
        """Identity up to renaming of latent vertices."""
        idx = self.dag.index
        return (
            tuple(sorted((idx(a), idx(b)) for a, b in self.observed_edges)),
            tuple(tuple(sorted(idx(v) for v in s)) for s in self.confounded_sets),
        )

    def ci_set(self, scope: str = "full_sets") -> CISet:
        return dsep_ci_set(self.dag, self.observed, scope)

    def __str__(self) -> str:
        parts = [f"{a}->{b}" for a, b in self.dag.sorted_edges() if a not in self.latent]
        for s in self.confounded_sets:
            parts.append("<" + ",".join(self.dag.sorted(s)) + ">")
        return "{" + ", ".join(parts) + "}"


class Mark(str, enum.Enum):
    DIRECTED = "directed"  # a -> b
    CIRCLE_TAIL = "circle_tail"  # a o-> b
    BIDIRECTED = "bidirected"  # a <-> b
    CIRCLE_CIRCLE = "circle_circle"  # a o-o b

    @property
    def symmetric(self) -> bool:
        return self in (Mark.BIDIRECTED, Mark.CIRCLE_CIRCLE)


_MARK_TEXT = {
    Mark.DIRECTED: "-->",
    Mark.CIRCLE_TAIL: "o->",
    Mark.BIDIRECTED: "<->",
    Mark.CIRCLE_CIRCLE: "o-o",
}


@dataclass(frozen=True)
class Link:
    a: str
    b: str
    mark: Mark

    def __str__(self) -> str:
        return f"{self.a} {_MARK_TEXT[self.mark]} {self.b}"

    def arrowhead_at(self, v: str) -> bool:
        if self.mark is Mark.BIDIRECTED:
            return v in (self.a, self.b)
        if self.mark in (Mark.DIRECTED, Mark.CIRCLE_TAIL):
            return v == self.b
        return False

    def other(self, v: str) -> str:
        return self.b if v == self.a else self.a


@dataclass(frozen=True)
class Pattern:
    """A mixed graph over observed variables with four link marks.

    Directed and circle-tailed links keep their orientation (``a`` is the
    tail end); symmetric links are stored with ``a`` before ``b`` by index.
    """

    vertices: tuple[str, ...]
    links: frozenset[Link] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        idx = {v: i for i, v in enumerate(self.vertices)}
        if len(idx) != len(self.vertices):
            raise GraphError("duplicate vertex names in pattern")
        canon = set()
        pairs = set()
        for link in self.links:
            mark = Mark(link.mark)
            if link.a not in idx or link.b not in idx or link.a == link.b:
                raise GraphError(f"bad link {link}")
            a, b = link.a, link.b
            if mark.symmetric and idx[a] > idx[b]:
                a, b = b, a
            pair = frozenset((a, b))
            if pair in pairs:
                raise GraphError(f"more than one link between {a} and {b}")
            pairs.add(pair)
            canon.add(Link(a, b, mark))
        object.__setattr__(self, "links", frozenset(canon))

    @classmethod
    def parse(cls, text: str, vertices: Iterable[str] = ()) -> "Pattern":
        """``Pattern.parse("S o-o T, T o-o C")``; marks ``-->``, ``o->``, ``<->``, ``o-o``."""
        rev = {v: k for k, v in _MARK_TEXT.items()}
        rev["->"] = Mark.DIRECTED
        order = list(vertices)
        links = []
        for part in text.split(","):
            bits = part.split()
            if not bits:
                continue
            if len(bits) != 3 or bits[1] not in rev:
                raise GraphError(f"cannot parse link {part!r}")
            a, m, b = bits
            for v in (a, b):
                if v not in order:
                    order.append(v)
            links.append(Link(a, b, rev[m]))
        return cls(tuple(order), frozenset(links))

    def index(self, v: str) -> int:
        return self.vertices.index(v)

    def sorted_links(self) -> list[Link]:
        return sorted(self.links, key=lambda l: (self.index(l.a), self.index(l.b)))

    def link(self, a: str, b: str) -> Link | None:
        for l in self.links:
            if {l.a, l.b} == {a, b}:
                return l
        return None

    def adjacent(self, a: str, b: str) -> bool:
        return self.link(a, b) is not None

    def links_at(self, v: str) -> list[Link]:
        return [l for l in self.sorted_links() if v in (l.a, l.b)]

    def own_colliders(self) -> set[tuple[str, str, str]]:
        """Unshielded collisions already present in the pattern: both links carry arrowheads into C."""
        out = set()
        for c in self.vertices:
            heads = [l.other(c) for l in self.links_at(c) if l.arrowhead_at(c)]
            for u, w in combinations(sorted(heads, key=self.index), 2):
                if not self.adjacent(u, w):
                    out.add((u, c, w))
        return out

    def __str__(self) -> str:
        return "{" + ", ".join(str(l) for l in self.sorted_links()) + "}"


# Realizations of each link mark as (edges, confounded) over the link's ends;
# order: direct cause, common cause, both.
def _link_options(link: Link) -> list[tuple[tuple[tuple[str, str], ...], bool]]:
    a, b = link.a, link.b
    if link.mark is Mark.DIRECTED:
        return [(((a, b),), False)]
    if link.mark is Mark.CIRCLE_TAIL:
        return [(((a, b),), False), ((), True), (((a, b),), True)]
    if link.mark is Mark.BIDIRECTED:
        return [((), True)]
    return [(((a, b),), False), (((b, a),), False), ((), True), (((a, b),), True), (((b, a),), True)]


def pattern_realizations(p: Pattern) -> Iterator[tuple[frozenset[tuple[str, str]], tuple[frozenset[str], ...]]]:
    """Every combination of per-link realizations, unfiltered: (observed edges, latent child pairs)."""
    links = p.sorted_links()
    for choice in product(*(_link_options(l) for l in links)):
        edges: set[tuple[str, str]] = set()
        latents: list[frozenset[str]] = []
        for link, (es, conf) in zip(links, choice):
            edges.update(es)
            if conf:
                latents.append(frozenset((link.a, link.b)))
        yield frozenset(edges), tuple(latents)


def _new_vstructures(p: Pattern, edges: frozenset[tuple[str, str]], latents: tuple[frozenset[str], ...]) -> set:
    heads: dict[str, set[str]] = {v: set() for v in p.vertices}
    for a, b in edges:
        heads[b].add(a)
    for pair in latents:
        u, w = sorted(pair, key=p.index)
        heads[u].add(w)
        heads[w].add(u)
    found = set()
    for c, hs in heads.items():
        for u, w in combinations(sorted(hs, key=p.index), 2):
            if not p.adjacent(u, w):
                found.add((u, c, w))
    return found - p.own_colliders()


def expand_pattern(p: Pattern) -> list[LatentStructure]:
    """The latent structures a pattern stands for.

    Every link is replaced by each of its realizations; a combination
    survives when it is acyclic and creates no collision at an observed
    vertex between non-adjacent partners that the pattern does not already
    show. Latent common causes become fresh two-child vertices ``L1``, ``L2``...
    """
    out = []
    for edges, latents in pattern_realizations(p):
        if _new_vstructures(p, edges, latents):
            continue
        if _find_cycle(p.vertices, edges):
            continue
        out.append(LatentStructure.build(p.vertices, sorted(edges, key=lambda e: (p.index(e[0]), p.index(e[1]))), latents))
    return out


# ---------------------------------------------------------------------------
# DOT export


def _q(v: str) -> str:
    return '"' + v.replace('"', r"\"") + '"'


def to_dot(obj: Dag | LatentStructure | Pattern, name: str = "G") -> str:
    lines = [f"digraph {_q(name)} {{"]
    if isinstance(obj, Pattern):
        for v in obj.vertices:
            lines.append(f"  {_q(v)};")
        attrs = {
            Mark.DIRECTED: "",
            Mark.CIRCLE_TAIL: " [arrowtail=odot, dir=both]",
            Mark.BIDIRECTED: " [dir=both]",
            Mark.CIRCLE_CIRCLE: " [arrowhead=odot, arrowtail=odot, dir=both]",
        }
        for l in obj.sorted_links():
            lines.append(f"  {_q(l.a)} -> {_q(l.b)}{attrs[l.mark]};")
    else:
        dag = obj.dag if isinstance(obj, LatentStructure) else obj
        latent = obj.latent if isinstance(obj, LatentStructure) else frozenset()
        for v in dag.vertices:
            lines.append(f"  {_q(v)} [style=dashed];" if v in latent else f"  {_q(v)};")
        for a, b in dag.sorted_edges():
            lines.append(f"  {_q(a)} -> {_q(b)}{' [style=dashed]' if a in latent else ''};")
    lines.append("}")
    return "\n".join(lines) + "\n"
