"""Tests for the branch-and-bound max-cut solver."""

import random
from fractions import Fraction

import numpy as np

from cheeger.graphs import complete, cycle, path
from cheeger.maxcut import (
    contract_pair,
    enumerate_maxcut,
    gw_round,
    improve_cut,
    solve_maxcut,
)
from cheeger.transforms import (
    MaxCutInstance,
    bisection_to_maxcut,
    dinkelbach_to_maxcut,
)


def _instance_from_graph(g):
    w = [[0] * g.n for _ in range(g.n)]
    for u, v in g.edges:
        w[u][v] = w[v][u] = 1
    return MaxCutInstance.build(w)


def _random_instance(rng, n, lo=-10, hi=10, density=0.7):
    w = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                w[i][j] = w[j][i] = rng.randint(lo, hi)
    return MaxCutInstance.build(w)


def _brute_maxcut(inst):
    best = 0
    for mask in range(1 << (inst.n - 1)):
        best = max(best, inst.cut_weight(mask))
    return best


# -- local helpers ---------------------------------------------------------


def test_improve_cut_reaches_local_optimum():
    # Triangle with weights 3, 2, -1: the single vertex 0 gives cut 5,
    # which one steepest flip from the all-equal start already finds.
    w = ((0, 3, 2), (3, 0, -1), (2, -1, 0))
    value, signs = improve_cut(w, [1, 1, 1])
    assert value == 5
    assert signs[0] != signs[1] and signs[1] == signs[2]
    again, _ = improve_cut(w, signs)
    assert again == value


def test_improve_cut_all_negative_keeps_empty_side():
    w = ((0, -4), (-4, 0))
    value, _ = improve_cut(w, [1, 1])
    assert value == 0


def test_gw_round_recovers_rank_one_point():
    signs = np.array([1.0, -1.0, 1.0, -1.0, 1.0])
    x = np.outer(signs, signs)
    rng = np.random.default_rng(7)
    candidates = gw_round(x, rng)
    assert candidates
    for cand in candidates:
        assert list(cand) == list(signs)


def test_enumerate_matches_brute_force():
    rng = random.Random(11)
    for _ in range(10):
        n = rng.randint(3, 9)
        inst = _random_instance(rng, n)
        value, mask = enumerate_maxcut(inst.weights)
        assert value == _brute_maxcut(inst)
        assert inst.cut_weight(mask) == value
        assert not mask & 1


def test_contraction_preserves_maxcut():
    # Folding any vertex onto the anchor in both orientations splits the
    # assignment space in two, so the parent optimum is the better child.
    rng = random.Random(17)
    for _ in range(3):
        n = rng.randint(4, 8)
        inst = _random_instance(rng, n, density=0.9)
        parent, _ = enumerate_maxcut(inst.weights)
        pick = rng.randint(1, n - 1)
        best = None
        for rel in (1, -1):
            folded, shift = contract_pair(inst.weights, pick, rel)
            value, _ = enumerate_maxcut(folded)
            value += shift
            best = value if best is None else max(best, value)
        assert best == parent


def test_enumerate_wide_weights_agree_with_scaled_instance():
    # Scaling every weight by 2**50 overflows the vectorized path and
    # forces exact integer evaluation; the optimum must scale along.
    rng = random.Random(3)
    inst = _random_instance(rng, 8)
    value, mask = enumerate_maxcut(inst.weights)
    factor = 1 << 50
    wide = tuple(tuple(w * factor for w in row) for row in inst.weights)
    wide_value, wide_mask = enumerate_maxcut(wide)
    assert wide_value == value * factor
    assert wide_mask == mask


# -- exact solves ----------------------------------------------------------


def test_cycle_five_leaf_and_branching_paths():
    inst = _instance_from_graph(cycle(5))
    direct = solve_maxcut(inst)
    assert direct.value == 4
    assert direct.status == "optimal"
    assert inst.cut_weight(direct.mask) == 4
    forced = solve_maxcut(inst, leaf_size=2)
    assert forced.value == 4
    assert forced.status == "optimal"
    assert inst.cut_weight(forced.mask) == 4


def test_random_instances_match_enumeration():
    rng = random.Random(42)
    for trial in range(15):
        n = rng.randint(6, 13)
        inst = _random_instance(rng, n)
        reference, _ = enumerate_maxcut(inst.weights)
        res = solve_maxcut(inst, leaf_size=5, seed=trial)
        assert res.status == "optimal"
        assert res.value == reference
        assert inst.cut_weight(res.mask) == reference
        assert res.best_bound == res.value


def test_bisection_instance_of_path_graph():
    red = bisection_to_maxcut(path(3), 1, Fraction(1))
    res = solve_maxcut(red.instance)
    assert res.value == 19
    assert red.offset - res.value == 1
    subset = red.decode_subset(res.mask)
    assert subset.size == 1


def test_ratio_instance_certifies_cheeger_value():
    # At gamma = h(C14) = 2/7 the minimum penalized objective is zero.
    red = dinkelbach_to_maxcut(cycle(14), Fraction(2, 7))
    res = solve_maxcut(red.instance)
    assert res.status == "optimal"
    assert red.offset - res.value == 0


# -- injected thresholds ---------------------------------------------------


def test_injected_bound_semantics_on_enumeration_path():
    inst = _instance_from_graph(cycle(5))
    at_opt = solve_maxcut(inst, initial_lb=4)
    assert at_opt.status == "bound-stop"
    assert at_opt.value == 4
    assert at_opt.mask is None
    below = solve_maxcut(inst, initial_lb=3)
    assert below.status == "optimal"
    assert below.value == 4
    assert inst.cut_weight(below.mask) == 4
    above = solve_maxcut(inst, initial_lb=10)
    assert above.status == "bound-stop"
    assert above.value == 10
    assert above.mask is None


def test_injected_bound_prunes_at_root_on_sdp_path():
    inst = _instance_from_graph(cycle(5))
    res = solve_maxcut(inst, initial_lb=4, leaf_size=2)
    assert res.status == "bound-stop"
    assert res.nodes == 1


def test_bisection_root_prune_with_tight_bound():
    g = complete(12)
    red = bisection_to_maxcut(g, 6, Fraction(36))
    lb = red.offset - 36
    res = solve_maxcut(red.instance, initial_lb=int(lb))
    assert res.status == "bound-stop"
    assert res.nodes == 1


# -- resource limits -------------------------------------------------------


def test_node_limit_reports_partial_result():
    red = dinkelbach_to_maxcut(cycle(14), Fraction(2, 7))
    res = solve_maxcut(red.instance, node_limit=2)
    assert res.status == "limit"
    assert res.value <= 9948
    assert res.best_bound >= 9948


def test_time_limit_zero_stops_after_root():
    red = dinkelbach_to_maxcut(cycle(14), Fraction(2, 7))
    res = solve_maxcut(red.instance, time_limit=0.0)
    assert res.status == "limit"
    assert res.best_bound >= res.value


# -- reproducibility -------------------------------------------------------


def test_same_seed_same_search():
    rng = random.Random(5)
    inst = _random_instance(rng, 12)
    first = solve_maxcut(inst, leaf_size=6, seed=9)
    second = solve_maxcut(inst, leaf_size=6, seed=9)
    assert first.value == second.value
    assert first.mask == second.mask
    assert first.nodes == second.nodes


def test_worker_pool_agrees_with_serial():
    rng = random.Random(6)
    inst = _random_instance(rng, 12)
    serial = solve_maxcut(inst, leaf_size=6, seed=1)
    pooled = solve_maxcut(inst, leaf_size=6, seed=1, workers=2)
    assert pooled.status == "optimal"
    assert pooled.value == serial.value
    assert inst.cut_weight(pooled.mask) == pooled.value


def test_triangle_tightening_can_be_disabled():
    rng = random.Random(8)
    inst = _random_instance(rng, 11)
    with_tri = solve_maxcut(inst, leaf_size=5)
    without = solve_maxcut(inst, leaf_size=5, use_triangles=False)
    assert with_tri.value == without.value


def test_node_trace_records_every_node():
    rng = random.Random(4)
    inst = _random_instance(rng, 11)
    rows = []
    res = solve_maxcut(inst, leaf_size=5, trace=rows)
    assert len(rows) == res.nodes
    assert rows[0][0] == 0 and rows[0][1] == 0
    assert rows[0][2] >= res.value
    incumbents = [row[3] for row in rows]
    assert incumbents == sorted(incumbents)
    assert incumbents[-1] <= res.value
