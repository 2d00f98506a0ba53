"""Causal discovery from conditional independence sets.

Two procedures are provided: ordering enumeration without latent variables
(every admissible causal order yields a minimal DAG, duplicates removed) and
a pattern-producing procedure that allows latent common causes. The latter
is certified against :func:`enumerate_latent_structures`, a brute-force
search over all small latent structures.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Iterable, Sequence

from .graphs import (
    Dag,
    GraphError,
    LatentStructure,
    Link,
    Mark,
    Pattern,
    _find_cycle,
    dsep_ci_set,
    expand_pattern,
    topological_orderings,
)
from .independence import CISet, CIStatement

MAX_LATENT_OBSERVED = 4


class NoFaithfulStructure(Exception):
    """The CI set is not reproduced faithfully by any structure the procedure can return."""


def minimal_parent_set(ci: CISet, y: str, predecessors: Sequence[str]) -> frozenset[str]:
    """Smallest S of ``predecessors`` with (y ⊥ predecessors∖S | S) in ``ci``.

    Ties are broken by the order of ``predecessors``.
    """
    preds = list(predecessors)
    for r in range(len(preds) + 1):
        for subset in combinations(preds, r):
            s = frozenset(subset)
            rest = frozenset(preds) - s
            if not rest or CIStatement(frozenset([y]), rest, s) in ci:
                return s
    return frozenset(preds)


def ordering_candidates(
    ci: CISet, variables: Sequence[str], order_constraints: Iterable[tuple[str, str]] = ()
) -> list[tuple[tuple[str, ...], Dag]]:
    """The minimal DAG for every admissible causal ordering, one entry per ordering."""
    empty = Dag(tuple(variables))
    out = []
    for order in topological_orderings(empty, order_constraints):
        edges = set()
        for i, y in enumerate(order):
            for p in minimal_parent_set(ci, y, order[:i]):
                edges.add((p, y))
        out.append((order, Dag(tuple(variables), frozenset(edges))))
    return out


def wermuth_lauritzen(
    ci: CISet, variables: Sequence[str], order_constraints: Iterable[tuple[str, str]] = ()
) -> list[Dag]:
    """Distinct minimal DAGs over all admissible orderings, in order of first appearance."""
    seen = set()
    out = []
    for _, dag in ordering_candidates(ci, variables, order_constraints):
        if dag.edges not in seen:
            seen.add(dag.edges)
            out.append(dag)
    return out


def filter_faithful(dags: Iterable[Dag], ci: CISet) -> list[Dag]:
    """Keep the DAGs whose d-separation statements are exactly ``ci``."""
    return [d for d in dags if dsep_ci_set(d, d.vertices) == ci]


def respects_order(edges: Iterable[tuple[str, str]], observed: Sequence[str], constraints: Iterable[tuple[str, str]]) -> bool:
    children: dict[str, set[str]] = {v: set() for v in observed}
    for a, b in edges:
        children[a].add(b)

    def reaches(a: str, b: str) -> bool:
        stack, seen = [a], {a}
        while stack:
            v = stack.pop()
            if v == b:
                return True
            for w in children[v] - seen:
                seen.add(w)
                stack.append(w)
        return False

    return not any(reaches(after, before) for before, after in constraints)


def filter_order(structures: Iterable[LatentStructure], order_constraints: Iterable[tuple[str, str]]) -> list[LatentStructure]:
    """Structures with no directed path among observed variables from an ``after`` to its ``before``."""
    constraints = list(order_constraints)
    return [s for s in structures if respects_order(s.observed_edges, s.observed, constraints)]


def enumerate_latent_structures(
    ci: CISet,
    observed: Sequence[str],
    mode: str = "pairwise",
    max_latents: int | None = None,
    order_constraints: Iterable[tuple[str, str]] = (),
    inducing_paths: bool = False,
) -> list[LatentStructure]:
    """Brute force: every latent structure over ``observed`` whose observed d-separations equal ``ci``.

    Each pair of observed variables may be unconnected or joined by an edge
    in either direction, with or without a latent common cause of the pair.
    In ``unrestricted`` mode a latent may also cause three or more observed
    variables. Pairs separated by some set in ``ci`` are never joined, since
    adjacent variables cannot be d-separated. Pairs that no set separates
    must be joined by an edge or a latent unless ``inducing_paths`` is set,
    in which case they may also be left unconnected and kept inseparable by
    an inducing path through other variables.
    An ordering constraint ``(a, b)`` forbids a directed path from ``b`` to ``a``.
    """
    observed = list(observed)
    n = len(observed)
    if n > MAX_LATENT_OBSERVED:
        raise ValueError(f"brute-force enumeration is limited to {MAX_LATENT_OBSERVED} observed variables")
    if mode not in ("pairwise", "unrestricted"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "pairwise" and max_latents is not None and max_latents > n * (n - 1) // 2:
        raise ValueError("max_latents exceeds the number of pairs")
    constraints = list(order_constraints)
    pairs = list(combinations(observed, 2))
    joinable = [not ci.separates(a, b) for a, b in pairs]
    pair_options = []
    for (a, b), ok in zip(pairs, joinable):
        if not ok:
            pair_options.append([(None, False)])
        else:
            opts = [((a, b), False), ((b, a), False), (None, True), ((a, b), True), ((b, a), True)]
            pair_options.append(([(None, False)] if inducing_paths else []) + opts)
    big_sets: list[frozenset[str]] = []
    if mode == "unrestricted":
        for r in range(3, n + 1):
            for subset in combinations(observed, r):
                if all(joinable[pairs.index(p)] for p in combinations(subset, 2)):
                    big_sets.append(frozenset(subset))
    target_pairs = ci.singleton_pairs()
    found = {}
    for choice in product(*pair_options):
        edges = [e for e, _ in choice if e is not None]
        if _find_cycle(observed, edges) or not respects_order(edges, observed, constraints):
            continue
        pair_latents = [frozenset(p) for p, (_, conf) in zip(pairs, choice) if conf]
        for k in range(len(big_sets) + 1):
            for extra in combinations(big_sets, k):
                latents = pair_latents + list(extra)
                if max_latents is not None and len(latents) > max_latents:
                    continue
                s = LatentStructure.build(observed, edges, latents)
                if dsep_ci_set(s.dag, observed, "singleton_pairs") != target_pairs:
                    continue
                if s.ci_set() == ci:
                    found[s.key()] = s
    return [found[k] for k in sorted(found)]


def _adjacency(ci: CISet, observed: Sequence[str]) -> dict[frozenset[str], list[frozenset[str]]]:
    seps = {}
    for a, b in combinations(observed, 2):
        seps[frozenset((a, b))] = ci.separates(a, b)
    return seps


TAIL, ARROW, CIRCLE = "-", ">", "o"


def icstar_pattern(ci: CISet, observed: Sequence[str], validate: bool = True) -> Pattern:
    """Pattern over ``observed`` summarizing the latent structures faithful to ``ci``.

    Skeleton: two variables are linked iff no conditioning set separates
    them. Unshielded triples a - c - b get arrowheads into c when c lies in
    no separating set of a and b. Marks then propagate: an arrowhead into c
    across from a non-adjacent b turns c o-* b into a genuine c -> b, and a
    chain of genuine arrows from a to b puts an arrowhead at b on a - b.
    Three further rules in the style of FCI add arrowheads along
    a *-> c -> b triangles, at the middle of a collider pair, and at the end
    of discriminating paths. A discriminating path never yields a genuine
    arrow: it shows ancestry but cannot exclude a shared latent.

    The pattern describes each link separately. When the faithful
    structures are not a product of per-link options, the expansion of
    the pattern is a strict superset of them.

    With ``validate`` the pattern is checked to realize at least one
    structure with exactly the input independences; otherwise
    :class:`NoFaithfulStructure` is raised.
    """
    observed = list(observed)
    seps = _adjacency(ci, observed)
    adj = {v: set() for v in observed}
    # mark[(a, b)] is the mark at b's end of the a - b link
    mark: dict[tuple[str, str], str] = {}
    for pair, zs in seps.items():
        if not zs:
            a, b = sorted(pair, key=observed.index)
            adj[a].add(b)
            adj[b].add(a)
            mark[(a, b)] = CIRCLE
            mark[(b, a)] = CIRCLE

    for c in observed:
        for a, b in combinations(sorted(adj[c], key=observed.index), 2):
            if b in adj[a]:
                continue
            if not any(c in z for z in seps[frozenset((a, b))]):
                mark[(a, c)] = ARROW
                mark[(b, c)] = ARROW

    changed = True
    while changed:
        changed = False
        # a *-> c o-* b with a, b non-adjacent  =>  c -> b
        for c in observed:
            for a in sorted(adj[c], key=observed.index):
                if mark[(a, c)] != ARROW:
                    continue
                for b in sorted(adj[c], key=observed.index):
                    if b == a or b in adj[a]:
                        continue
                    if mark[(b, c)] == CIRCLE:
                        mark[(b, c)] = TAIL
                        mark[(c, b)] = ARROW
                        changed = True
        # a directed path of genuine arrows a -> ... -> b  =>  arrowhead at b on a *-o b
        for a in observed:
            for b in sorted(adj[a], key=observed.index):
                if mark[(a, b)] != CIRCLE:
                    continue
                if _directed_path(a, b, adj, mark):
                    mark[(a, b)] = ARROW
                    changed = True
        # a *-> c -> b  or  a -> c *-> b, with a *-o b  =>  a *-> b
        for a in observed:
            for b in sorted(adj[a], key=observed.index):
                if mark[(a, b)] != CIRCLE:
                    continue
                for c in adj[a] & adj[b]:
                    into_c = mark[(a, c)] == ARROW and mark[(c, b)] == ARROW
                    if into_c and (mark[(b, c)] == TAIL or mark[(c, a)] == TAIL):
                        mark[(a, b)] = ARROW
                        changed = True
                        break
        # a *-> c <-* b, a *-o d o-* b, d *-o c, a and b non-adjacent  =>  d *-> c
        for c in observed:
            for d in sorted(adj[c], key=observed.index):
                if mark[(d, c)] != CIRCLE:
                    continue
                for a, b in combinations(sorted(adj[c] & adj[d], key=observed.index), 2):
                    if b in adj[a]:
                        continue
                    if mark[(a, c)] == ARROW and mark[(b, c)] == ARROW and mark[(a, d)] == CIRCLE and mark[(b, d)] == CIRCLE:
                        mark[(d, c)] = ARROW
                        changed = True
                        break
        # discriminating paths
        for b in observed:
            for c in sorted(adj[b], key=observed.index):
                if mark[(c, b)] != CIRCLE:
                    continue
                theta = _discriminating_start(b, c, adj, mark)
                if theta is None:
                    continue
                if any(b in z for z in seps[frozenset((theta, c))]):
                    # b is an ancestor of c, but a latent b <-> c is not excluded
                    if mark[(b, c)] == ARROW:
                        continue
                    mark[(b, c)] = ARROW
                else:
                    mark[(c, b)] = ARROW
                    mark[(b, c)] = ARROW
                    for a in adj[b] & adj[c]:
                        if mark[(a, b)] == ARROW and mark[(a, c)] == ARROW and mark[(c, a)] == TAIL:
                            mark[(b, a)] = ARROW
                changed = True

    links = []
    for a, b in combinations(observed, 2):
        if b not in adj[a]:
            continue
        at_a, at_b = mark[(b, a)], mark[(a, b)]
        links.append(_to_link(a, b, at_a, at_b))
    pattern = Pattern(tuple(observed), frozenset(links))
    if validate and not any(s.ci_set() == ci for s in expand_pattern(pattern)):
        raise NoFaithfulStructure(f"no structure realized by {pattern} reproduces the input independences")
    return pattern


def _directed_path(a: str, b: str, adj: dict[str, set[str]], mark: dict[tuple[str, str], str]) -> bool:
    stack, seen = [a], {a}
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if (v, w) == (a, b) or w in seen:
                continue
            if mark[(v, w)] == ARROW and mark[(w, v)] == TAIL:
                if w == b:
                    return True
                seen.add(w)
                stack.append(w)
    return False


def _discriminating_start(b: str, c: str, adj: dict[str, set[str]], mark: dict[tuple[str, str], str]) -> str | None:
    """First end vertex of a path <theta, ..., a, b, c> that discriminates b, if any.

    Every vertex strictly between theta and b is a collider on the path and
    a parent of c; theta is not adjacent to c.
    """

    def parent_of_c(v: str) -> bool:
        return c in adj[v] and mark[(v, c)] == ARROW and mark[(c, v)] == TAIL

    # walk backwards from b; path[-1] is the current collider candidate
    stack = [[b, a] for a in sorted(adj[b]) if a != c and mark[(b, a)] == ARROW and parent_of_c(a)]
    while stack:
        path = stack.pop()
        v = path[-1]
        for w in sorted(adj[v]):
            if w in path or w == c or mark[(w, v)] != ARROW:
                continue
            if w not in adj[c]:
                return w
            if parent_of_c(w) and mark[(v, w)] == ARROW:
                stack.append(path + [w])
    return None


def _to_link(a: str, b: str, at_a: str, at_b: str) -> Link:
    if at_a == ARROW and at_b == ARROW:
        return Link(a, b, Mark.BIDIRECTED)
    if at_a == CIRCLE and at_b == CIRCLE:
        return Link(a, b, Mark.CIRCLE_CIRCLE)
    if at_b == ARROW:
        return Link(a, b, Mark.DIRECTED if at_a == TAIL else Mark.CIRCLE_TAIL)
    if at_a == ARROW:
        return Link(b, a, Mark.DIRECTED if at_b == TAIL else Mark.CIRCLE_TAIL)
    raise GraphError(f"link {a} - {b} has marks {at_a!r}/{at_b!r} with no pattern equivalent")


def structure_keys(structures: Iterable[LatentStructure]) -> set[tuple]:
    return {s.key() for s in structures}
