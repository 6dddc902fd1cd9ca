"""Reductions from constrained cut problems to unconstrained max-cut.

The chain has two links.  First, a penalized binary quadratic program
(QUBO) captures the constrained problem exactly once the penalty weight
clears the best known feasible value.  Second, the standard anchor-vertex
construction turns any QUBO into a max-cut instance on one extra vertex,
with the identity

    scale * q(x) = offset - cut(z)        for every assignment x,

where z places variable i on the anchor's side exactly when x_i = 1.
Both links preserve exact integer arithmetic; rational inputs are lifted
by the least common denominator, which is only ever 1, 2, or 4 here.

Two penalized programs are built on top:

* a fixed-cardinality bisection, penalty on (sum x - k)^2, and
* the parametric objective gamma_d * cut - gamma_n * size whose sign at
  the optimum drives the ratio-search iteration, with binary slack
  counters encoding the size window 1 <= sum x <= floor(n/2).

The closed-form instance builders bypass the generic chain and write the
final weights directly; tests hold both routes to coefficient equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .graphs import Graph, VertexSubset


class TransformError(ValueError):
    """Raised when input coefficients fall outside the supported lattice."""


@dataclass(frozen=True)
class QuboProblem:
    """min x^T Q x + t^T x + c over binary x; Q symmetric, diagonal allowed."""

    quadratic: tuple[tuple[Fraction, ...], ...]
    linear: tuple[Fraction, ...]
    constant: Fraction

    @classmethod
    def build(cls, quadratic, linear, constant) -> "QuboProblem":
        q = tuple(tuple(Fraction(v) for v in row) for row in quadratic)
        t = tuple(Fraction(v) for v in linear)
        d = len(t)
        if len(q) != d or any(len(row) != d for row in q):
            raise TransformError("quadratic matrix shape does not match linear term")
        for i in range(d):
            for j in range(i):
                if q[i][j] != q[j][i]:
                    raise TransformError("quadratic matrix must be symmetric")
        return cls(quadratic=q, linear=t, constant=Fraction(constant))

    @property
    def dimension(self) -> int:
        return len(self.linear)

    def evaluate(self, x) -> Fraction:
        bits = tuple(x)
        if len(bits) != self.dimension or any(b not in (0, 1) for b in bits):
            raise ValueError("assignment must be a 0/1 vector of matching length")
        total = Fraction(self.constant)
        for i, bi in enumerate(bits):
            if not bi:
                continue
            total += self.linear[i] + self.quadratic[i][i]
            row = self.quadratic[i]
            for j in range(i + 1, self.dimension):
                if bits[j]:
                    total += 2 * row[j]
        return total


@dataclass(frozen=True)
class MaxCutInstance:
    """Complete weighted graph on n vertices; integer weights, zero diagonal."""

    n: int
    weights: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, weights) -> "MaxCutInstance":
        w = tuple(tuple(int(v) for v in row) for row in weights)
        n = len(w)
        if n < 2:
            raise ValueError("instance needs at least two vertices")
        for i in range(n):
            if len(w[i]) != n or w[i][i] != 0:
                raise ValueError("weights must be square with zero diagonal")
            for j in range(i):
                if w[i][j] != w[j][i]:
                    raise ValueError("weights must be symmetric")
        return cls(n=n, weights=w)

    def cut_weight(self, mask: int) -> int:
        """Total weight of edges between the mask side and its complement."""
        if not 0 <= mask < 1 << self.n:
            raise ValueError("mask out of range")
        total = 0
        for i in range(self.n):
            side_i = mask >> i & 1
            row = self.weights[i]
            for j in range(i + 1, self.n):
                if side_i != (mask >> j & 1):
                    total += row[j]
        return total

    def total_weight(self) -> int:
        return sum(self.weights[i][j] for i in range(self.n) for j in range(i + 1, self.n))


def dump_instance(inst: MaxCutInstance, comment: str | None = None) -> str:
    """Serialize an instance as ``n m`` then 1-based ``i j w`` rows.

    Only nonzero weights are written; the header's second field counts
    them.  The format mirrors the graph edge-list format with a weight
    column appended.
    """
    pairs = [
        (i, j, inst.weights[i][j])
        for i in range(inst.n)
        for j in range(i + 1, inst.n)
        if inst.weights[i][j]
    ]
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"{inst.n} {len(pairs)}")
    lines.extend(f"{i + 1} {j + 1} {w}" for i, j, w in pairs)
    return "\n".join(lines) + "\n"


def load_instance(source) -> MaxCutInstance:
    """Parse the :func:`dump_instance` format from text, bytes, or a stream."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    rows = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append((lineno, line.split()))
    if not rows:
        raise TransformError("empty input")
    lineno, head = rows[0]
    if len(head) != 2:
        raise TransformError(f"line {lineno}: expected header 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise TransformError(f"line {lineno}: bad header {head!r}") from None
    if n < 2:
        raise TransformError(f"line {lineno}: instance needs at least two vertices")
    weights = [[0] * n for _ in range(n)]
    for lineno, toks in rows[1:]:
        if len(toks) != 3:
            raise TransformError(f"line {lineno}: expected 'i j w'")
        try:
            u, v, w = int(toks[0]), int(toks[1]), int(toks[2])
        except ValueError:
            raise TransformError(f"line {lineno}: bad entry {toks!r}") from None
        if not (1 <= u <= n and 1 <= v <= n) or u == v:
            raise TransformError(f"line {lineno}: endpoints outside 1..{n} or equal")
        if weights[u - 1][v - 1]:
            raise TransformError(f"line {lineno}: duplicate pair {u} {v}")
        weights[u - 1][v - 1] = weights[v - 1][u - 1] = w
    if len(rows) - 1 != m:
        raise TransformError(f"header announces {m} entries, found {len(rows) - 1}")
    return MaxCutInstance.build(weights)


def _anchor_decode(mask: int, n: int) -> tuple[int, ...]:
    """Bits x_i = 1 when instance vertex i + 1 sits on the anchor's side."""
    anchor = mask & 1
    return tuple(1 if (mask >> (i + 1) & 1) == anchor else 0 for i in range(n))


@dataclass(frozen=True)
class QuboReduction:
    """Max-cut form of a QUBO: scale * q(x) = offset - cut for all x."""

    instance: MaxCutInstance
    offset: int
    scale: int

    def decode(self, mask: int) -> tuple[int, ...]:
        return _anchor_decode(mask, self.instance.n - 1)


def qubo_to_maxcut(qubo: QuboProblem) -> QuboReduction:
    """Anchor-vertex reduction of an arbitrary QUBO to max-cut.

    The diagonal is folded into the linear term first (x^2 = x on binary
    inputs).  Rational coefficients are cleared by their least common
    denominator, which must divide 4; larger denominators indicate a
    malformed penalty and raise TransformError.
    """
    d = qubo.dimension
    folded_linear = [qubo.linear[i] + qubo.quadratic[i][i] for i in range(d)]
    off_diag = [
        [qubo.quadratic[i][j] if i != j else Fraction(0) for j in range(d)]
        for i in range(d)
    ]

    denoms = [qubo.constant.denominator]
    denoms += [v.denominator for v in folded_linear]
    denoms += [off_diag[i][j].denominator for i in range(d) for j in range(i + 1, d)]
    scale = lcm(*denoms) if denoms else 1
    if 4 % scale:
        raise TransformError(f"coefficient denominators require scale {scale}, not in {{1, 2, 4}}")

    qs = [[int(scale * off_diag[i][j]) for j in range(d)] for i in range(d)]
    ts = [int(scale * v) for v in folded_linear]
    cs = int(scale * qubo.constant)

    weights = [[0] * (d + 1) for _ in range(d + 1)]
    for i in range(d):
        w = sum(qs[i]) + ts[i]
        weights[0][i + 1] = weights[i + 1][0] = w
        for j in range(i + 1, d):
            weights[i + 1][j + 1] = weights[j + 1][i + 1] = qs[i][j]
    pair_sum = sum(qs[i][j] for i in range(d) for j in range(i + 1, d))
    offset = 2 * pair_sum + sum(ts) + cs
    return QuboReduction(
        instance=MaxCutInstance.build(weights), offset=offset, scale=scale
    )


def bisection_to_qubo(g: Graph, k: int, cut_upper_bound: int) -> QuboProblem:
    """Penalized form of the cardinality-k minimum bisection.

    q(x) = x^T L x + (4u + 1)(sum x - k)^2 with u any upper bound on the
    optimal bisection.  The penalty exceeds every feasible value, so any
    assignment off the cardinality shell costs more than the worst
    feasible subset and minimizers are exactly the optimal bisections.
    """
    if not 1 <= k <= g.n // 2:
        raise ValueError(f"cardinality {k} out of range for n={g.n}")
    if cut_upper_bound < 1:
        raise ValueError("cut upper bound must be at least 1 on a connected graph")
    n = g.n
    penalty = 4 * cut_upper_bound + 1
    deg = g.degrees
    adj = g.adjacency_matrix()
    quad = [
        [
            Fraction(penalty - (1 if adj[i][j] else 0)) if i != j else Fraction(deg[i] + penalty)
            for j in range(n)
        ]
        for i in range(n)
    ]
    linear = [Fraction(-2 * penalty * k)] * n
    return QuboProblem.build(quad, linear, Fraction(penalty * k * k))


@dataclass(frozen=True)
class BisectionReduction:
    """Max-cut form of the k-bisection: bisection(S) = offset - cut exactly."""

    instance: MaxCutInstance
    offset: int
    k: int
    penalty: int

    def decode_subset(self, mask: int) -> VertexSubset:
        bits = _anchor_decode(mask, self.instance.n - 1)
        sub_mask = 0
        for i, b in enumerate(bits):
            sub_mask |= b << i
        return VertexSubset(self.instance.n - 1, sub_mask)


def bisection_to_maxcut(g: Graph, k: int, cut_upper_bound: int) -> BisectionReduction:
    """Closed-form max-cut instance for the cardinality-k bisection.

    Anchor weights are p(n - 2k) on every vertex, p - 1 across original
    edges and p across non-edges, with p = 4u + 1; the offset is
    p(n - k)^2.  Every optimal side containing the anchor holds exactly
    k + 1 vertices.
    """
    if not 1 <= k <= g.n // 2:
        raise ValueError(f"cardinality {k} out of range for n={g.n}")
    if cut_upper_bound < 1:
        raise ValueError("cut upper bound must be at least 1 on a connected graph")
    n = g.n
    p = 4 * cut_upper_bound + 1
    adj = g.adjacency_matrix()
    weights = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        weights[0][i + 1] = weights[i + 1][0] = p * (n - 2 * k)
        for j in range(i + 1, n):
            w = p - 1 if adj[i][j] else p
            weights[i + 1][j + 1] = weights[j + 1][i + 1] = w
    return BisectionReduction(
        instance=MaxCutInstance.build(weights),
        offset=p * (n - k) * (n - k),
        k=k,
        penalty=p,
    )


def slack_weights(n: int) -> tuple[int, ...]:
    """Binary counter weights (1, 2, 4, ...) covering sizes up to floor(n/2).

    The counter must reach s - 1 where s = floor(n/2); bit_length of s - 1
    gives the number of weights.  For s = 1 the window is the single point
    {1} and no counter bits are needed.
    """
    s = n // 2
    bits = (s - 1).bit_length()
    return tuple(1 << i for i in range(bits))


def _ratio_parts(gamma: Fraction) -> tuple[int, int]:
    if gamma < 0:
        raise ValueError("the ratio parameter must be nonnegative")
    return gamma.numerator, gamma.denominator


def penalty_weight(g: Graph, gamma: Fraction) -> int:
    """Sigma clearing every feasible objective value at ratio gamma.

    Any assignment violating a size constraint pays at least sigma, and
    sigma = gamma_n * n + gamma_d * min_degree + 1 puts that floor above
    gamma_d * mincut >= the feasible optimum, so the penalized minimum
    always equals the constrained one, for every nonnegative gamma.
    """
    gn, gd = _ratio_parts(gamma)
    return gn * g.n + gd * min(g.degrees) + 1


def dinkelbach_to_qubo(g: Graph, gamma: Fraction) -> QuboProblem:
    """Penalized QUBO whose minimum is min over F of gamma_d*cut - gamma_n*|S|.

    Variables are the n vertex indicators followed by two binary counters
    alpha and beta; the penalty sigma multiplies the squared residuals of
    sum x - alpha.v = 1 and sum x + beta.v = floor(n/2).
    """
    gn, gd = _ratio_parts(gamma)
    n = g.n
    s = n // 2
    v = slack_weights(n)
    nb = len(v)
    d = n + 2 * nb
    sigma = penalty_weight(g, gamma)

    quad = [[Fraction(0)] * d for _ in range(d)]
    linear = [Fraction(0)] * d
    constant = Fraction(0)

    adj = g.adjacency_matrix()
    deg = g.degrees
    for i in range(n):
        quad[i][i] += gd * deg[i]
        linear[i] += -gn
        for j in range(i + 1, n):
            if adj[i][j]:
                quad[i][j] -= gd
                quad[j][i] -= gd

    def add_square(coeffs, shift):
        # sigma * (sum coeffs[i] z_i + shift)^2
        nonlocal constant
        for a in range(d):
            ca = coeffs[a]
            if not ca:
                continue
            quad[a][a] += sigma * ca * ca
            linear[a] += 2 * sigma * ca * shift
            for bq in range(a + 1, d):
                cb = coeffs[bq]
                if cb:
                    quad[a][bq] += sigma * ca * cb
                    quad[bq][a] += sigma * ca * cb
        constant += sigma * shift * shift

    first = [1] * n + [-w for w in v] + [0] * nb
    second = [1] * n + [0] * nb + list(v)
    add_square(first, -1)
    add_square(second, -s)
    return QuboProblem.build(quad, linear, constant)


@dataclass(frozen=True)
class DinkelbachReduction:
    """Max-cut form of the ratio objective: value = offset - cut for all x."""

    instance: MaxCutInstance
    offset: int
    sigma: int
    n: int
    slack: tuple[int, ...]

    def decode_subset(self, mask: int) -> VertexSubset:
        bits = _anchor_decode(mask, self.instance.n - 1)
        sub_mask = 0
        for i in range(self.n):
            sub_mask |= bits[i] << i
        return VertexSubset(self.n, sub_mask)


def dinkelbach_to_maxcut(g: Graph, gamma: Fraction) -> DinkelbachReduction:
    """Closed-form max-cut instance for the ratio objective at gamma."""
    gn, gd = _ratio_parts(gamma)
    n = g.n
    s = n // 2
    v = slack_weights(n)
    nb = len(v)
    d = n + 2 * nb
    sigma = penalty_weight(g, gamma)
    cover = 1 << nb  # 2^(nb), one past the counter's reach

    adj = g.adjacency_matrix()
    weights = [[0] * (d + 1) for _ in range(d + 1)]

    def put(a, b, w):
        weights[a][b] = weights[b][a] = w

    for u in range(n):
        put(0, 1 + u, 2 * sigma * (n - 1 - s) - gn)
        for w_ in range(u + 1, n):
            put(1 + u, 1 + w_, 2 * sigma - (gd if adj[u][w_] else 0))
        for i, vi in enumerate(v):
            put(1 + u, 1 + n + i, -sigma * vi)
            put(1 + u, 1 + n + nb + i, sigma * vi)
    for i, vi in enumerate(v):
        put(0, 1 + n + i, sigma * vi * (cover - n + 1))
        put(0, 1 + n + nb + i, sigma * vi * (cover - 1 + n - 2 * s))
        for j in range(i + 1, nb):
            vj = v[j]
            put(1 + n + i, 1 + n + j, sigma * vi * vj)
            put(1 + n + nb + i, 1 + n + nb + j, sigma * vi * vj)

    offset = -gn * n + sigma * (
        2 * cover * (cover - s - 1)
        + 2 * n * n
        - 2 * n
        + 1
        + s * s
        - 2 * s * n
        + 2 * s
    )
    return DinkelbachReduction(
        instance=MaxCutInstance.build(weights),
        offset=offset,
        sigma=sigma,
        n=n,
        slack=v,
    )
