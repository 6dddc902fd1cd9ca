"""Tests for the per-cardinality split and bound solver."""

import random
from fractions import Fraction

import pytest

from cheeger.graphs import (
    VertexSubset,
    brute_force_h,
    complete,
    cut_value,
    cycle,
    expansion,
    gnp,
    hypercube,
)
from cheeger.report import bounds_csv, canonical_json
from cheeger.sdp import SdpError
from cheeger.split_bound import (
    LimitExceeded,
    pre_eliminate,
    split_and_bound,
    verify_lower_bound,
)

LEGAL_STATUSES = {
    "eliminated-pre",
    "eliminated-update",
    "eliminated-root",
    "solved",
    "pending",
}


def _crude_heuristic(g, k, seed=0, restarts=1):
    """Deliberately weak stand-in: always proposes the first k vertices."""
    s = VertexSubset.from_indices(g.n, range(k))
    return cut_value(g, s), s


def test_pre_eliminate_complete_graph():
    table = pre_eliminate(complete(4))
    assert table.lower == {1: Fraction(3), 2: Fraction(2)}
    assert table.ustar == 2
    assert table.survivors() == []


def test_pre_eliminate_cycle_six():
    table = pre_eliminate(cycle(6))
    assert table.ustar == Fraction(2, 3)
    assert table.lower[3] == Fraction(2, 3)
    assert table.status[1] == "eliminated-pre"
    assert set(table.survivors()) <= {2, 3}


def test_cycle_six_report():
    g = cycle(6)
    rep = split_and_bound(g)
    assert rep.status == "solved"
    assert rep.upper == Fraction(2, 3)
    assert rep.lower == rep.upper
    witness = VertexSubset.from_indices(g.n, rep.witness)
    assert witness.size == 3
    assert expansion(g, witness) == Fraction(2, 3)
    text = bounds_csv(rep.table)
    assert text.splitlines()[0].startswith("k,lower_num")
    assert len(text.splitlines()) == 4


def test_reports_are_byte_stable():
    first = canonical_json(split_and_bound(cycle(6), seed=3))
    second = canonical_json(split_and_bound(cycle(6), seed=3))
    assert first == second


def test_hypercube_four():
    rep = split_and_bound(hypercube(4))
    assert rep.status == "solved"
    assert rep.upper == 1


def test_random_graphs_match_brute_force():
    rng = random.Random(0)
    for trial in range(10):
        n = rng.randint(6, 12)
        p = rng.choice([0.3, 0.5, 0.7])
        g = gnp(n, p, seed=100 + trial)
        rep = split_and_bound(g, seed=trial)
        expected, _ = brute_force_h(g)
        assert rep.status == "solved"
        assert rep.upper == expected
        witness = VertexSubset.from_indices(g.n, rep.witness)
        assert expansion(g, witness) == expected
        assert {row.status for row in rep.table} <= LEGAL_STATUSES
        for row in rep.table:
            assert row.lower <= row.upper


def test_exact_phase_recovers_from_weak_heuristic(monkeypatch):
    # With the heuristic crippled, the exact phase must still find h and
    # flip at least one cardinality to solved.
    monkeypatch.setattr("cheeger.split_bound.anneal_bisection", _crude_heuristic)
    for seed_g in (3, 4):
        g = gnp(10, 0.4, seed=seed_g)
        rep = split_and_bound(g, seed=0)
        expected, _ = brute_force_h(g)
        assert rep.upper == expected
        statuses = [row.status for row in rep.table]
        assert "solved" in statuses
        assert set(statuses) <= LEGAL_STATUSES


def test_processing_order_does_not_change_answer(monkeypatch):
    monkeypatch.setattr("cheeger.split_bound.anneal_bisection", _crude_heuristic)
    g = gnp(10, 0.4, seed=3)
    forward = split_and_bound(g, seed=0)
    backward = split_and_bound(g, seed=0, order=range(g.n // 2, 0, -1))
    assert forward.upper == backward.upper
    assert backward.status == "solved"


def test_incomplete_order_is_rejected(monkeypatch):
    monkeypatch.setattr("cheeger.split_bound.anneal_bisection", _crude_heuristic)
    g = gnp(10, 0.4, seed=3)
    with pytest.raises(ValueError, match="order"):
        split_and_bound(g, seed=0, order=[1])


def test_eigenvalue_fallback_when_relaxation_fails(monkeypatch, caplog):
    def broken(g, k, tol=1e-7):
        raise SdpError("forced failure")

    monkeypatch.setattr("cheeger.split_bound.cheap_bisection_bound", broken)
    with caplog.at_level("WARNING", logger="cheeger.split_bound"):
        rep = split_and_bound(cycle(6))
    assert rep.upper == Fraction(2, 3)
    assert "fallback" in caplog.text


def test_limit_status_brackets_the_answer():
    g = gnp(13, 0.4, seed=1)
    rep = split_and_bound(g, seed=1, time_limit=0.0)
    expected, _ = brute_force_h(g)
    assert rep.status == "limit"
    assert rep.lower < rep.upper
    assert rep.lower <= expected <= rep.upper
    assert any(row.status == "pending" for row in rep.table)


def test_verify_accepts_true_bounds_and_refutes_false_ones():
    g = cycle(6)
    assert verify_lower_bound(g, Fraction(2, 3)) == (True, None)
    assert verify_lower_bound(g, Fraction(0)) == (True, None)
    assert verify_lower_bound(g, Fraction(2, 3) - Fraction(1, 100))[0] is True
    ok, cert = verify_lower_bound(g, Fraction(7, 10))
    assert ok is False
    assert expansion(g, cert) < Fraction(7, 10)
    with pytest.raises(ValueError):
        verify_lower_bound(g, Fraction(-1, 2))


def test_verify_raises_when_budget_runs_out():
    g = gnp(13, 0.4, seed=1)
    with pytest.raises(LimitExceeded):
        verify_lower_bound(g, Fraction(5, 3), time_limit=0.0)
