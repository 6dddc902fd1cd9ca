import io
import random
from fractions import Fraction

import numpy as np
import pytest

from cheeger.graphs import (
    Graph,
    GraphFormatError,
    VertexSubset,
    brute_force_bisection,
    brute_force_h,
    brute_force_mincut,
    complete,
    cut_value,
    cycle,
    dump_graph,
    expansion,
    generate,
    gnp,
    hypercube,
    load_graph,
    path,
    sniff_format,
)


def star(leaves: int) -> Graph:
    return Graph.build(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


# --- construction and validation -------------------------------------------

def test_build_normalises_and_sorts_edges():
    g = Graph.build(4, [(2, 0), (3, 2), (1, 0), (2, 1)])
    assert g.edges == ((0, 1), (0, 2), (1, 2), (2, 3))
    assert g.m == 4
    assert g.degrees == (2, 2, 3, 1)


def test_build_rejects_bad_input():
    with pytest.raises(GraphFormatError):
        Graph.build(2, [(0, 1)])
    with pytest.raises(GraphFormatError):
        Graph.build(3, [(0, 0), (0, 1), (1, 2)])
    with pytest.raises(GraphFormatError):
        Graph.build(3, [(0, 1), (1, 0), (1, 2)])
    with pytest.raises(GraphFormatError):
        Graph.build(3, [(0, 3), (1, 2)])
    # triangle plus isolated vertex is disconnected
    with pytest.raises(GraphFormatError):
        Graph.build(4, [(0, 1), (1, 2), (0, 2)])


def test_vertex_subset_basics():
    s = VertexSubset.from_indices(5, [0, 3])
    assert s.size == 2
    assert s.indices() == (0, 3)
    assert s.membership() == (1, 0, 0, 1, 0)
    assert 3 in s and 1 not in s
    assert s.complement().indices() == (1, 2, 4)
    with pytest.raises(ValueError):
        VertexSubset.from_indices(5, [0, 0])
    with pytest.raises(ValueError):
        VertexSubset.from_indices(5, [5])


# --- cut values and Laplacian ----------------------------------------------

def test_cut_value_examples():
    p4 = path(4)
    assert cut_value(p4, VertexSubset.from_indices(4, [0])) == 1
    assert cut_value(p4, VertexSubset.from_indices(4, [0, 1])) == 1
    assert cut_value(p4, VertexSubset.from_indices(4, [1])) == 2
    c4 = cycle(4)
    assert cut_value(c4, VertexSubset.from_indices(4, [0, 1])) == 2
    assert cut_value(c4, VertexSubset.from_indices(4, [0, 2])) == 4


def test_cut_value_rejects_trivial_sides():
    g = cycle(4)
    with pytest.raises(ValueError):
        cut_value(g, VertexSubset(4, 0))
    with pytest.raises(ValueError):
        cut_value(g, VertexSubset.from_indices(4, [0, 1, 2, 3]))


def test_laplacian_p3_matrix():
    lap = path(3).laplacian()
    assert np.array_equal(lap, np.array([[1.0, -1, 0], [-1, 2, -1], [0, -1, 1]]))


def test_laplacian_row_sums_zero_and_c4_spectrum():
    lap = cycle(4).laplacian()
    assert np.allclose(lap.sum(axis=1), 0)
    assert np.allclose(np.linalg.eigvalsh(lap), [0, 2, 2, 4])


def test_cut_matches_laplacian_quadratic_form():
    rng = random.Random(7)
    for _ in range(25):
        g = gnp(8, 0.45, rng.randrange(10**6))
        lap = g.laplacian()
        mask = rng.randrange(1, (1 << 8) - 1)
        s = VertexSubset(8, mask)
        chi = np.array(s.membership(), dtype=float)
        assert cut_value(g, s) == round(chi @ lap @ chi)


def test_expansion_requires_small_side():
    g = cycle(6)
    with pytest.raises(ValueError):
        expansion(g, VertexSubset.from_indices(6, [0, 1, 2, 3]))
    assert expansion(g, VertexSubset.from_indices(6, [0, 1, 2])) == Fraction(2, 3)


# --- parsing ----------------------------------------------------------------

EDGE_LIST_C4 = """\
# four cycle
4 4
1 2
2 3
3 4
1 4
"""

DIMACS_C4 = """\
c four cycle
p edge 4 4
e 1 2
e 2 3
e 3 4
e 1 4
"""


def test_load_edge_list_and_dimacs_agree():
    g1 = load_graph(EDGE_LIST_C4)
    g2 = load_graph(DIMACS_C4, fmt="dimacs")
    assert g1.edges == g2.edges == cycle(4).edges


def test_load_accepts_stream_and_bytes():
    assert load_graph(io.StringIO(EDGE_LIST_C4)).n == 4
    assert load_graph(EDGE_LIST_C4.encode()).n == 4


def test_sniff_format():
    assert sniff_format(EDGE_LIST_C4) == "edge-list"
    assert sniff_format(DIMACS_C4) == "dimacs"


def test_parse_errors_carry_line_numbers():
    with pytest.raises(GraphFormatError, match="line 2"):
        load_graph("3 3\n1 x\n2 3\n1 3\n")
    with pytest.raises(GraphFormatError, match="line 3"):
        load_graph("3 3\n1 2\n2 5\n1 3\n")
    with pytest.raises(GraphFormatError, match="announces"):
        load_graph("3 3\n1 2\n2 3\n")
    with pytest.raises(GraphFormatError, match="line 3"):
        load_graph("c x\np edge 3 2\ne 1 2 3\ne 2 3\n", fmt="dimacs")
    with pytest.raises(GraphFormatError):
        load_graph("", fmt="edge-list")


def test_dump_round_trip():
    g = gnp(9, 0.4, 3)
    assert load_graph(dump_graph(g)).edges == g.edges


# --- generators -------------------------------------------------------------

def test_generator_shapes():
    assert complete(4).m == 6
    assert cycle(6).m == 6
    assert path(5).m == 4
    h3 = hypercube(3)
    assert (h3.n, h3.m) == (8, 12)
    assert set(h3.degrees) == {3}
    h2 = hypercube(2)
    assert (h2.n, h2.m) == (4, 4)
    assert set(h2.degrees) == {2}


def test_generate_dispatch():
    assert generate("complete", 5).m == 10
    assert generate("gnp", 8, 0.5, 1).n == 8
    with pytest.raises(ValueError):
        generate("wheel", 5)


def test_gnp_is_deterministic_and_connected():
    g1 = gnp(10, 0.4, seed=1)
    g2 = gnp(10, 0.4, seed=1)
    assert g1.edges == g2.edges
    assert g1.is_connected()
    assert gnp(10, 0.4, seed=2).edges != g1.edges


def test_gnp_gives_up_eventually():
    with pytest.raises(GraphFormatError):
        gnp(30, 0.01, seed=0)


# --- exhaustive solvers -----------------------------------------------------

def test_brute_force_h_known_values():
    assert brute_force_h(complete(4))[0] == 2
    assert brute_force_h(complete(5))[0] == 3
    assert brute_force_h(cycle(6))[0] == Fraction(2, 3)
    assert brute_force_h(cycle(5))[0] == 1
    assert brute_force_h(path(4))[0] == Fraction(1, 2)
    assert brute_force_h(star(5))[0] == 1
    assert brute_force_h(hypercube(3))[0] == 1


def test_brute_force_h_witness_is_consistent():
    for g in (cycle(6), path(5), star(4), gnp(9, 0.35, 11)):
        val, s = brute_force_h(g)
        assert expansion(g, s) == val


def test_brute_force_bisection_known_values():
    assert brute_force_bisection(complete(5), 2)[0] == 6
    assert brute_force_bisection(cycle(6), 2)[0] == 2
    assert brute_force_bisection(cycle(6), 3)[0] == 2
    assert brute_force_bisection(path(4), 2)[0] == 1
    assert brute_force_bisection(hypercube(3), 4)[0] == 4


def test_brute_force_bisection_rejects_bad_k():
    with pytest.raises(ValueError):
        brute_force_bisection(cycle(6), 0)
    with pytest.raises(ValueError):
        brute_force_bisection(cycle(6), 4)


def test_brute_force_mincut_known_values():
    assert brute_force_mincut(cycle(6))[0] == 2
    assert brute_force_mincut(path(5))[0] == 1
    assert brute_force_mincut(complete(4))[0] == 3


def test_h_is_min_over_bisection_ratios():
    for seed in range(5):
        g = gnp(9, 0.4, seed=seed + 100)
        h, _ = brute_force_h(g)
        per_k = min(
            Fraction(brute_force_bisection(g, k)[0], k) for k in range(1, g.n // 2 + 1)
        )
        assert h == per_k


def test_h_invariant_under_relabeling():
    rng = random.Random(5)
    g = gnp(9, 0.45, seed=17)
    perm = list(range(g.n))
    rng.shuffle(perm)
    relabeled = Graph.build(g.n, [(perm[u], perm[v]) for u, v in g.edges])
    assert brute_force_h(g)[0] == brute_force_h(relabeled)[0]


def test_enumeration_guard():
    g = cycle(10)
    with pytest.raises(ValueError):
        brute_force_h(g, guard=9)
    with pytest.raises(ValueError):
        brute_force_mincut(g, guard=9)
