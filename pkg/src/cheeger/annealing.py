"""Simulated annealing for fixed-cardinality bisection upper bounds.

The move set swaps one vertex out of the candidate subset for one outside,
so every state keeps cardinality k.  Accepted states are polished by a
steepest-descent swap search whose result only updates the incumbent; the
walk itself continues from the unpolished state so it can still climb out
of the basin it just probed.

All randomness flows from ``random.Random`` seeded per (seed, k, restart),
making every result reproducible bit for bit.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .graphs import Graph, VertexSubset, cut_value

# Cooling schedule: geometric with a floor, growing trial counts, and a
# patience of improvement-free cycles before giving up.
COOLING = 0.7
TRIAL_GROWTH = 1.15
TEMPERATURE_FLOOR_FACTOR = 1e-3
PATIENCE = 3


def _swap_delta(g: Graph, mask: int, u: int, v: int) -> int:
    """Cut change when u leaves the subset and v (outside) replaces it."""
    deg = g.degrees
    adj = g.adj_masks
    after_u = mask ^ (1 << u)
    return (
        2 * (adj[u] & mask).bit_count()
        - deg[u]
        + deg[v]
        - 2 * (adj[v] & after_u).bit_count()
    )


def local_search(g: Graph, subset: VertexSubset) -> tuple[int, VertexSubset]:
    """Steepest-descent swap search from subset; returns a local optimum."""
    mask = subset.mask
    value = cut_value(g, subset)
    n = g.n
    improved = True
    while improved:
        improved = False
        best_delta = 0
        best_pair = None
        inside = [u for u in range(n) if mask >> u & 1]
        outside = [v for v in range(n) if not mask >> v & 1]
        for u in inside:
            for v in outside:
                delta = _swap_delta(g, mask, u, v)
                if delta < best_delta:
                    best_delta = delta
                    best_pair = (u, v)
        if best_pair is not None:
            u, v = best_pair
            mask = mask ^ (1 << u) | (1 << v)
            value += best_delta
            improved = True
    return value, VertexSubset(g.n, mask)


def _anneal_once(g: Graph, k: int, rng: random.Random) -> tuple[int, int]:
    """One annealing run; returns (best value, best mask)."""
    n = g.n
    inside = rng.sample(range(n), k)
    outside = [v for v in range(n) if v not in set(inside)]
    mask = 0
    for u in inside:
        mask |= 1 << u
    value = cut_value(g, VertexSubset(n, mask))

    best_value, best_subset = local_search(g, VertexSubset(n, mask))
    best_mask = best_subset.mask

    t0 = (k * k / math.comb(n, 2)) * 2.0 * g.m
    t0 = max(t0, 1e-9)
    floor = TEMPERATURE_FLOOR_FACTOR * t0
    temp = t0
    trials = float(n)
    idle_cycles = 0

    while idle_cycles < PATIENCE:
        improved = False
        for _ in range(int(round(trials))):
            iu = rng.randrange(k)
            iv = rng.randrange(n - k)
            u = inside[iu]
            v = outside[iv]
            delta = _swap_delta(g, mask, u, v)
            if delta <= 0 or rng.random() < math.exp(-delta / temp):
                mask = mask ^ (1 << u) | (1 << v)
                value += delta
                inside[iu], outside[iv] = v, u
                polished, polished_subset = local_search(g, VertexSubset(n, mask))
                if polished < best_value:
                    best_value = polished
                    best_mask = polished_subset.mask
                    improved = True
        idle_cycles = 0 if improved else idle_cycles + 1
        temp = max(temp * COOLING, floor)
        trials *= TRIAL_GROWTH
    return best_value, best_mask


def anneal_bisection(
    g: Graph, k: int, seed: int = 0, restarts: int = 1
) -> tuple[int, VertexSubset]:
    """Best cut over subsets of size k found by annealing with restarts.

    Parameters
    ----------
    g : Graph
    k : int
        Subset cardinality, between 1 and n // 2.
    seed : int
        Base seed; each (k, restart) pair derives its own stream.
    restarts : int
        Independent runs; the best result wins, first found on ties.

    Returns
    -------
    (int, VertexSubset)
        Cut value and the subset achieving it.
    """
    if not 1 <= k <= g.n // 2:
        raise ValueError(f"cardinality {k} out of range for n={g.n}")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    best_value = None
    best_mask = 0
    for restart in range(restarts):
        rng = random.Random(seed * 1_000_003 + k * 1009 + restart)
        value, mask = _anneal_once(g, k, rng)
        if best_value is None or value < best_value:
            best_value = value
            best_mask = mask
    return best_value, VertexSubset(g.n, best_mask)


def best_expansion_witness(
    g: Graph, seed: int = 0, restarts: int = 1
) -> tuple[Fraction, VertexSubset]:
    """Cheapest expansion ratio cut(S)/|S| seen across all cardinalities."""
    best = None
    witness = None
    for k in range(1, g.n // 2 + 1):
        value, subset = anneal_bisection(g, k, seed=seed, restarts=restarts)
        ratio = Fraction(value, k)
        if best is None or ratio < best:
            best = ratio
            witness = subset
    return best, witness
