import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellcausal.graphs import (
    CycleError,
    Dag,
    GraphError,
    LatentStructure,
    Link,
    Mark,
    Pattern,
    d_separated,
    dsep_ci_set,
    expand_pattern,
    pattern_realizations,
    relatives,
    to_dot,
    topological_orderings,
    v_structures,
)
from bellcausal.independence import semigraphoid_closure

NAMES = "ABCDE"


@st.composite
def dags(draw, max_n=5):
    n = draw(st.integers(2, max_n))
    names = list(NAMES[:n])
    order = draw(st.permutations(names))
    edges = [(order[i], order[j]) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
    return Dag(tuple(names), frozenset(edges))


def _nx_separated(dag, x, y, z):
    g = nx.DiGraph()
    g.add_nodes_from(dag.vertices)
    g.add_edges_from(dag.edges)
    return nx.is_d_separator(g, set(x), set(y), set(z))


def test_relatives_of_y():
    dag = Dag.parse("W->X, W->Y, S->X, T->Y")
    assert relatives(dag, "Y") == (frozenset("TW"), frozenset(), frozenset("STWX"))


def test_cycle_rejected():
    with pytest.raises(CycleError):
        Dag.parse("A->B, B->C, C->A")
    with pytest.raises(GraphError):
        Dag.parse("A->A")


def test_collider_and_descendant():
    dag = Dag.parse("A->C, B->C, C->D")
    assert d_separated(dag, "A", "B")
    assert not d_separated(dag, "A", "B", "C")
    assert not d_separated(dag, "A", "B", "D")
    assert v_structures(dag) == {("A", "C", "B")}


def test_dsep_argument_errors():
    dag = Dag.parse("A->B")
    with pytest.raises(GraphError):
        d_separated(dag, "A", "A")
    with pytest.raises(GraphError):
        d_separated(dag, "A", "Q")


@settings(max_examples=80, deadline=None)
@given(dags())
def test_d_separation_matches_networkx(dag):
    vs = dag.vertices
    for x, y in itertools.combinations(vs, 2):
        rest = [v for v in vs if v not in (x, y)]
        for r in range(len(rest) + 1):
            for z in itertools.combinations(rest, r):
                assert d_separated(dag, x, y, z) == _nx_separated(dag, [x], [y], z)


@settings(max_examples=25, deadline=None)
@given(dags(max_n=4))
def test_dsep_set_is_closed(dag):
    ci = dsep_ci_set(dag)
    assert semigraphoid_closure(ci) == ci


@settings(max_examples=40, deadline=None)
@given(dags(max_n=4))
def test_dsep_set_valued_statements_match_networkx(dag):
    for s in dsep_ci_set(dag):
        assert _nx_separated(dag, s.x, s.y, s.z)


def test_topological_orderings_with_constraint():
    empty = Dag(("S", "T", "C"))
    assert len(topological_orderings(empty)) == 6
    assert len(topological_orderings(empty, [("S", "T")])) == 3
    with pytest.raises(GraphError):
        topological_orderings(empty, [("S", "T"), ("T", "S")])


def test_latent_structure_validation():
    with pytest.raises(GraphError):
        LatentStructure(Dag.parse("L->A"), frozenset("L"))
    with pytest.raises(GraphError):
        LatentStructure(Dag.parse("A->L, L->B, L->C"), frozenset("L"))
    s = LatentStructure.build("AB", [], [{"A", "B"}])
    assert s.confounded_sets == (frozenset("AB"),)
    assert str(s) == "{<A,B>}"


def test_latent_confounder_hides_independence():
    s = LatentStructure.build("STAB", [("S", "A"), ("T", "B")], [{"A", "B"}])
    ci = s.ci_set()
    assert not d_separated(s.dag, "A", "B", ("S", "T"))
    assert all(s.variables <= set("STAB") for s in ci)


@pytest.mark.parametrize(
    "mark, count",
    [(Mark.DIRECTED, 1), (Mark.CIRCLE_TAIL, 3), (Mark.BIDIRECTED, 1), (Mark.CIRCLE_CIRCLE, 5)],
)
def test_link_realization_counts(mark, count):
    p = Pattern(("A", "B"), frozenset([Link("A", "B", mark)]))
    assert len(list(pattern_realizations(p))) == count
    assert len(expand_pattern(p)) == count


def test_smoking_pattern_expansion():
    p = Pattern.parse("S o-o T, T o-o C")
    assert len(list(pattern_realizations(p))) == 25
    kept = expand_pattern(p)
    assert len(kept) == 9
    for s in kept:
        assert d_separated(s.dag, "S", "C", "T")


def test_pattern_rejects_double_link():
    with pytest.raises(GraphError):
        Pattern.parse("A o-o B, B --> A")


def test_dot_is_deterministic():
    s = LatentStructure.build("STAB", [("S", "A"), ("T", "B")], [{"A", "B"}])
    first = to_dot(s, "lc")
    assert first == to_dot(LatentStructure.build("STAB", [("T", "B"), ("S", "A")], [{"B", "A"}]), "lc")
    assert '"L1" [style=dashed];' in first
    assert first.startswith('digraph "lc" {')
    p = to_dot(Pattern.parse("S o-> A, A <-> B"), "p")
    assert '"S" -> "A" [arrowtail=odot, dir=both];' in p
