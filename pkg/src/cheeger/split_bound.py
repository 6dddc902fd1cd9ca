"""Exact edge expansion by per-cardinality splitting with certified bounds.

The expansion h(G) is the minimum over k of the cardinality-k bisection
ratio cut(S)/k.  The solver works the cardinalities instead of the whole
subset lattice:

1.  For every k up to n/2, compute a certified rational lower bound on
    the ratio (cheap relaxation) and a heuristic upper bound (annealing).
    Any k whose lower bound reaches the best upper bound anywhere cannot
    host the optimum and is eliminated before exact work starts.
2.  Survivors are re-annealed harder, re-eliminated, and then solved
    exactly in ascending order of their upper bounds.  Each exact solve
    runs the branch-and-bound engine on the penalized bisection instance
    with an injected threshold tied to the best ratio so far, so a
    subproblem that cannot improve the answer dies at its root node.
    Every improvement tightens the threshold for the remaining k.

A verification mode reuses the loop with the candidate bound installed
as the starting threshold: the candidate is a valid lower bound on h(G)
exactly when the run finishes without ever finding a better cut.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .annealing import anneal_bisection
from .bounds import cheap_bisection_bound, spectral_bound
from .graphs import Graph, VertexSubset, cut_value
from .maxcut import solve_maxcut
from .report import BoundRow, SolveReport
from .sdp import SdpError
from .transforms import bisection_to_maxcut

log = logging.getLogger(__name__)

# Annealing effort: light during pre-elimination, heavier for survivors.
PRE_RESTARTS = 1
EXACT_PHASE_RESTARTS = 30
# Safety slack when rationalizing the fallback eigenvalue bound.
SPECTRAL_SLACK = 1e-6

DEFAULT_NODE_LIMIT = 10**6
DEFAULT_TIME_LIMIT = 3600.0


class LimitExceeded(RuntimeError):
    """Raised by verification when resource limits end the run early."""


@dataclass
class BoundsTable:
    """Per-cardinality bounds plus the global incumbent ratio.

    ``lower[k]`` is a certified lower bound on cut(S)/k over size-k
    subsets; ``upper_cut[k]`` is the best known size-k cut value with
    its subset in ``witness[k]``.  ``ustar`` is the smallest ratio seen
    anywhere, always backed by a genuine cut.
    """

    n: int
    lower: dict = field(default_factory=dict)
    upper_cut: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)
    status: dict = field(default_factory=dict)
    ustar: Fraction | None = None
    ustar_witness: VertexSubset | None = None

    def upper(self, k: int) -> Fraction:
        return Fraction(self.upper_cut[k], k)

    def survivors(self) -> list:
        return [k for k in sorted(self.status) if self.status[k] == "pending"]

    def offer(self, ratio: Fraction, subset: VertexSubset) -> bool:
        """Install a genuine cut as the incumbent if it is better.

        Returns True only on a strict ratio improvement over an existing
        threshold.  Ties on the ratio prefer the lexicographically
        smaller vertex tuple so reported witnesses are reproducible.
        """
        improved = self.ustar is not None and ratio < self.ustar
        if self.ustar is None or ratio < self.ustar:
            self.ustar = ratio
            self.ustar_witness = subset
        elif ratio == self.ustar and (
            self.ustar_witness is None
            or subset.indices() < self.ustar_witness.indices()
        ):
            self.ustar_witness = subset
        return improved

    def rows(self) -> tuple:
        out = []
        for k in sorted(self.status):
            out.append(
                BoundRow(
                    k=k,
                    lower=self.lower[k],
                    upper=self.upper(k),
                    status=self.status[k],
                    witness=self.witness[k].indices(),
                )
            )
        return tuple(out)


def _fallback_lower(g: Graph, k: int, half_lambda: float) -> Fraction:
    """Eigenvalue bisection bound, rationalized safely: cuts are integers."""
    raw = 2.0 * half_lambda * k * (g.n - k) / g.n
    return Fraction(max(1, math.ceil(raw - SPECTRAL_SLACK)), k)


def cheap_lower_bound(g: Graph, k: int) -> Fraction:
    """Certified lower bound on the size-k bisection ratio.

    The semidefinite relaxation, with the eigenvalue bound as a fallback
    when the solver fails on an instance.  Always at least 1/k: the
    graph is connected, so every nonempty proper subset is cut.
    """
    try:
        return cheap_bisection_bound(g, k)
    except SdpError as exc:
        log.warning("relaxation failed for k=%d (%s); eigenvalue fallback", k, exc)
        return _fallback_lower(g, k, spectral_bound(g))


def pre_eliminate(g: Graph, seed: int = 0, initial_ustar: Fraction | None = None) -> BoundsTable:
    """Bound every cardinality and drop those that cannot host the optimum.

    Lower bounds come from the certified relaxation (with an eigenvalue
    fallback if the solver fails), upper bounds from one annealing run
    per k.  A cardinality survives only while its lower bound is
    strictly below the best ratio seen anywhere.  When ``initial_ustar``
    is given it acts as the starting threshold and annealing results
    only tighten it through genuine cuts.
    """
    table = BoundsTable(n=g.n)
    if initial_ustar is not None:
        table.ustar = initial_ustar
    for k in range(1, g.n // 2 + 1):
        table.lower[k] = cheap_lower_bound(g, k)
        cut, subset = anneal_bisection(g, k, seed=seed, restarts=PRE_RESTARTS)
        table.upper_cut[k] = cut
        table.witness[k] = subset
        table.offer(Fraction(cut, k), subset)
    for k in sorted(table.lower):
        if table.lower[k] < table.ustar:
            table.status[k] = "pending"
        else:
            table.status[k] = "eliminated-pre"
    return table


def _exact_order(table: BoundsTable, order) -> list:
    survivors = table.survivors()
    if order is None:
        return sorted(survivors, key=lambda k: (table.upper(k), k))
    chosen = [k for k in order if k in survivors]
    if sorted(chosen) != survivors:
        raise ValueError("order must cover every surviving cardinality")
    return chosen


def _ceil_threshold(ustar: Fraction, k: int) -> int:
    """Smallest integer cut NOT beating ratio ustar at cardinality k."""
    return math.ceil(ustar * k)


@dataclass
class _ExactPhase:
    nodes: int = 0
    attempts: int = 0
    root_solved: int = 0
    hit_limit: bool = False
    violation: VertexSubset | None = None


def _run_exact_phase(
    g: Graph,
    table: BoundsTable,
    seed: int,
    workers: int,
    node_limit: int,
    time_limit: float,
    started: float,
    order,
    stop_on_improvement: bool,
) -> _ExactPhase:
    """Solve surviving cardinalities against the moving threshold.

    Survivors are re-annealed first (their upper bounds feed both the
    processing order and the penalty weights), then each one is solved
    with the injected threshold ``offset - ceil(ustar * k)``.  With
    ``stop_on_improvement`` the phase returns at the first genuine cut
    below the starting threshold, which is the verification mode.
    """
    phase = _ExactPhase()
    for k in table.survivors():
        cut, subset = anneal_bisection(g, k, seed=seed, restarts=EXACT_PHASE_RESTARTS)
        if cut < table.upper_cut[k]:
            table.upper_cut[k] = cut
            table.witness[k] = subset
        improved = table.offer(Fraction(cut, k), subset)
        if improved and stop_on_improvement:
            phase.violation = subset
            return phase
    for k in _exact_order(table, order):
        if table.lower[k] >= table.ustar:
            table.status[k] = "eliminated-update"
            continue
        budget_nodes = node_limit - phase.nodes
        budget_time = time_limit - (time.monotonic() - started)
        if budget_nodes <= 0 or budget_time <= 0:
            phase.hit_limit = True
            return phase
        red = bisection_to_maxcut(g, k, table.upper_cut[k])
        threshold = _ceil_threshold(table.ustar, k)
        res = solve_maxcut(
            red.instance,
            initial_lb=red.offset - threshold,
            node_limit=budget_nodes,
            time_limit=budget_time,
            seed=seed * 131 + k,
            workers=workers,
        )
        phase.attempts += 1
        phase.nodes += res.nodes
        if res.nodes == 1:
            phase.root_solved += 1
        if res.status == "limit":
            phase.hit_limit = True
            return phase
        if res.status == "bound-stop":
            table.status[k] = "eliminated-root"
            continue
        exact_cut = red.offset - res.value
        subset = red.decode_subset(res.mask)
        if subset.size != k or cut_value(g, subset) != exact_cut:
            raise RuntimeError(
                f"decoded bisection witness inconsistent at k={k}; "
                "the reduction or the solver is broken"
            )
        table.status[k] = "solved"
        table.upper_cut[k] = exact_cut
        table.witness[k] = subset
        improved = table.offer(Fraction(exact_cut, k), subset)
        if improved and stop_on_improvement:
            phase.violation = subset
            return phase
    return phase


def split_and_bound(
    g: Graph,
    seed: int = 0,
    workers: int = 1,
    node_limit: int = DEFAULT_NODE_LIMIT,
    time_limit: float = DEFAULT_TIME_LIMIT,
    order=None,
) -> SolveReport:
    """Exact h(G) with witness, by elimination and per-k exact solves.

    Parameters
    ----------
    g : Graph
    seed : int
        Drives annealing and the inner engine; fixed seed with one
        worker reproduces the run bit for bit.
    workers : int
        Forwarded to the inner branch-and-bound engine.
    node_limit, time_limit : shared budget across all exact solves.
    order : iterable of int, optional
        Debug override for the exact-phase processing order; must cover
        the surviving cardinalities.  The answer does not depend on it.
    """
    started = time.monotonic()
    table = pre_eliminate(g, seed=seed)
    preelim_ms = (time.monotonic() - started) * 1000.0
    interesting = len(table.survivors())
    phase = _ExactPhase()
    if interesting:
        phase = _run_exact_phase(
            g, table, seed, workers, node_limit, time_limit,
            started, order, stop_on_improvement=False,
        )
    if phase.hit_limit:
        status = "limit"
        open_lowers = [table.lower[k] for k in table.survivors()]
        lower = min(open_lowers) if open_lowers else table.ustar
        lower = min(lower, table.ustar)
    else:
        status = "solved"
        lower = table.ustar
    return SolveReport(
        method="split-bound",
        n=g.n,
        m=g.m,
        status=status,
        lower=lower,
        upper=table.ustar,
        witness=table.ustar_witness.indices(),
        interesting=interesting,
        root_solved=phase.root_solved,
        nodes=phase.nodes,
        iterations=phase.attempts,
        seed=seed,
        workers=workers,
        preelim_ms=preelim_ms,
        total_ms=(time.monotonic() - started) * 1000.0,
        table=table.rows(),
    )


def verify_lower_bound(
    g: Graph,
    upsilon: Fraction,
    seed: int = 0,
    workers: int = 1,
    node_limit: int = DEFAULT_NODE_LIMIT,
    time_limit: float = DEFAULT_TIME_LIMIT,
):
    """Decide whether ``upsilon <= h(G)``, with a refuting cut on failure.

    Runs the split-and-bound loop with ``upsilon`` installed as the
    threshold.  The claim holds exactly when no genuine cut with ratio
    below ``upsilon`` turns up; the first such cut is returned as the
    certificate otherwise.

    Returns
    -------
    (bool, VertexSubset or None)
        ``(True, None)`` when the bound is valid, else ``(False, S)``
        with ratio(S) < upsilon.

    Raises
    ------
    LimitExceeded
        If the node or time budget runs out before the question is
        settled.
    """
    upsilon = Fraction(upsilon)
    if upsilon < 0:
        raise ValueError("a lower bound candidate must be nonnegative")
    if upsilon == 0:
        return True, None
    started = time.monotonic()
    table = pre_eliminate(g, seed=seed, initial_ustar=upsilon)
    if table.ustar < upsilon:
        return False, table.ustar_witness
    phase = _run_exact_phase(
        g, table, seed, workers, node_limit, time_limit,
        started, order=None, stop_on_improvement=True,
    )
    if phase.violation is not None:
        return False, phase.violation
    if phase.hit_limit:
        raise LimitExceeded(
            f"budget exhausted before verifying {upsilon} on n={g.n}"
        )
    return True, None
