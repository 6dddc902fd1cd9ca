"""Dense semidefinite programming kernel.

Solves   min <C, X>  s.t.  <A_i, X> = b_i,  X >= 0 (PSD)
by an infeasible-start primal-dual path-following method with
Nesterov-Todd scaling and a Mehrotra-style adaptive centering parameter.
Inequality rows are handled by appending nonnegative slack variables as
extra diagonal entries of the (single, dense) PSD block; see SdpBuilder.

Everything downstream consumes *certified* bounds: for any dual vector y,
    <C, X> >= b.y + lambda_min(C - A^T y) * trace_bound
holds for every primal-feasible X whose trace is at most trace_bound, so
a valid bound survives loose convergence or outright solver failure.

The kernel is dense and meant for blocks up to a few hundred rows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cholesky, eigh, solve_triangular

log = logging.getLogger(__name__)

# Hard cap on the (slack-extended) block dimension.
DIMENSION_CAP = 600


class SdpError(RuntimeError):
    """Unrecoverable numerical failure inside the kernel."""


@dataclass
class Constraint:
    """One equality row <A, X> = rhs.

    Sparse rows store the symmetric matrix in COO triplets with both (i, j)
    and (j, i) present; dense rows keep the matrix itself.  The ``entries``
    accepted by ``from_entries`` are ``(i, j, c)`` meaning "coefficient c on
    X_ij", counting each unordered pair once, which is what constraint
    authors actually write.
    """

    rhs: float
    dense: np.ndarray | None = None
    rows: np.ndarray | None = None
    cols: np.ndarray | None = None
    vals: np.ndarray | None = None

    @classmethod
    def from_entries(cls, entries, rhs: float) -> "Constraint":
        r, c, v = [], [], []
        for i, j, coeff in entries:
            if i == j:
                r.append(i)
                c.append(j)
                v.append(float(coeff))
            else:
                r.extend((i, j))
                c.extend((j, i))
                v.extend((coeff / 2.0, coeff / 2.0))
        return cls(
            rhs=float(rhs),
            rows=np.asarray(r, dtype=np.intp),
            cols=np.asarray(c, dtype=np.intp),
            vals=np.asarray(v, dtype=float),
        )

    @classmethod
    def from_dense(cls, mat: np.ndarray, rhs: float) -> "Constraint":
        return cls(rhs=float(rhs), dense=_sym(np.asarray(mat, dtype=float)))

    def inner(self, x: np.ndarray) -> float:
        if self.dense is not None:
            return float(np.tensordot(self.dense, x))
        return float(np.dot(self.vals, x[self.rows, self.cols]))

    def add_into(self, out: np.ndarray, scale: float):
        if self.dense is not None:
            out += scale * self.dense
        else:
            np.add.at(out, (self.rows, self.cols), scale * self.vals)

    def congruence(self, w: np.ndarray) -> np.ndarray:
        """W A W, the building block of the NT-scaled Schur complement."""
        if self.dense is not None:
            return w @ self.dense @ w
        return (w[:, self.rows] * self.vals) @ w[self.cols, :]

    def norm(self) -> float:
        if self.dense is not None:
            return float(np.linalg.norm(self.dense))
        return float(np.linalg.norm(self.vals))


@dataclass
class SdpProblem:
    dim: int
    c: np.ndarray
    constraints: list[Constraint]

    def op_a(self, x: np.ndarray) -> np.ndarray:
        return np.array([con.inner(x) for con in self.constraints])

    def op_at(self, y: np.ndarray) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        for yi, con in zip(y, self.constraints):
            if yi != 0.0:
                con.add_into(out, yi)
        return out

    @property
    def rhs(self) -> np.ndarray:
        return np.array([con.rhs for con in self.constraints])


class SdpBuilder:
    """Assemble a problem over an n x n block plus scalar slack entries.

    ``add_upper``/``add_lower`` turn <G, X> <= r (resp. >=) into an equality
    with a fresh slack slot appended on the diagonal of the extended block.
    Off-diagonal coupling between slacks and the block is left free, which
    is harmless: the objective and every row ignore those entries, and any
    principal sub-block of a PSD matrix is PSD, so projecting them away
    never changes feasibility or value.
    """

    def __init__(self, base_dim: int):
        self.base_dim = base_dim
        self._eqs: list[tuple[object, float]] = []
        self._ineqs: list[tuple[object, float, float]] = []

    def add_eq(self, lhs, rhs: float):
        self._eqs.append((lhs, rhs))

    def add_upper(self, lhs, rhs: float):
        """<lhs, X> <= rhs via a +1 slack."""
        self._ineqs.append((lhs, rhs, 1.0))

    def add_lower(self, lhs, rhs: float):
        """<lhs, X> >= rhs via a -1 slack."""
        self._ineqs.append((lhs, rhs, -1.0))

    @property
    def extended_dim(self) -> int:
        return self.base_dim + len(self._ineqs)

    def build(self, objective: np.ndarray) -> SdpProblem:
        dim = self.extended_dim
        if dim > DIMENSION_CAP:
            raise SdpError(f"extended block dimension {dim} exceeds cap {DIMENSION_CAP}")
        c = np.zeros((dim, dim))
        c[: self.base_dim, : self.base_dim] = objective
        cons = []
        for lhs, rhs in self._eqs:
            cons.append(self._make(lhs, rhs, dim, None, 0.0))
        for slot, (lhs, rhs, sign) in enumerate(self._ineqs):
            cons.append(self._make(lhs, rhs, dim, self.base_dim + slot, sign))
        return SdpProblem(dim=dim, c=c, constraints=cons)

    def _make(self, lhs, rhs, dim, slack_idx, sign) -> Constraint:
        if isinstance(lhs, np.ndarray):
            mat = np.zeros((dim, dim))
            mat[: self.base_dim, : self.base_dim] = lhs
            if slack_idx is not None:
                mat[slack_idx, slack_idx] = sign
            return Constraint.from_dense(mat, rhs)
        entries = list(lhs)
        if slack_idx is not None:
            entries.append((slack_idx, slack_idx, sign))
        return Constraint.from_entries(entries, rhs)


@dataclass
class SdpSolution:
    problem: SdpProblem
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    primal_obj: float
    dual_obj: float
    status: str  # optimal | max_iterations | numerical_failure
    rel_gap: float
    primal_res: float
    dual_res: float
    iterations: int
    dual_slack_min_eig: float = field(default=0.0)

    def certified_lower_bound(self, trace_bound: float) -> float:
        """Bound valid for every primal-feasible point, whatever the status.

        Uses the exactly recomputed dual slack C - A^T y, never the iterate Z.
        """
        return self.dual_obj + min(0.0, self.dual_slack_min_eig) * trace_bound


def _sym(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def _nt_scaling(x: np.ndarray, z: np.ndarray):
    """Return (W, Z^-1) where W is the scaling point with W Z W = X."""
    dz, uz = eigh(z)
    dz = np.maximum(dz, 1e-300)
    sq = np.sqrt(dz)
    z_half = (uz * sq) @ uz.T
    z_ihalf = (uz / sq) @ uz.T
    z_inv = (uz / dz) @ uz.T
    t = _sym(z_half @ x @ z_half)
    dt, ut = eigh(t)
    dt = np.maximum(dt, 1e-300)
    t_half = (ut * np.sqrt(dt)) @ ut.T
    w = _sym(z_ihalf @ t_half @ z_ihalf)
    return w, _sym(z_inv)


def _max_step(s: np.ndarray, d: np.ndarray) -> float:
    """Largest alpha keeping S + alpha D positive semidefinite."""
    n = s.shape[0]
    jitter = 1e-12 * max(1.0, float(np.trace(s)) / n)
    for _ in range(5):
        try:
            l = cholesky(s + jitter * np.eye(n), lower=True)
            break
        except np.linalg.LinAlgError:
            jitter *= 100.0
    else:
        return 0.0
    a = solve_triangular(l, d, lower=True)
    a = solve_triangular(l, a.T, lower=True)
    lam = float(np.min(eigh(_sym(a), eigvals_only=True)))
    if lam >= -1e-14:
        return np.inf
    return -1.0 / lam


class _SchurAssembler:
    """Vectorized <A_i, W A_j W> assembly.

    Sparse rows are padded into rectangular gather tables once, so each
    Schur column costs one congruence plus one fancy gather over all rows
    instead of a Python-level loop of inner products.
    """

    def __init__(self, constraints: list[Constraint]):
        self.constraints = constraints
        self.sparse_idx = [k for k, c in enumerate(constraints) if c.dense is None]
        self.dense_idx = [k for k, c in enumerate(constraints) if c.dense is not None]
        if self.sparse_idx:
            width = max(len(constraints[k].vals) for k in self.sparse_idx)
            ms = len(self.sparse_idx)
            self.rows = np.zeros((ms, width), dtype=np.intp)
            self.cols = np.zeros((ms, width), dtype=np.intp)
            self.vals = np.zeros((ms, width))
            for slot, k in enumerate(self.sparse_idx):
                con = constraints[k]
                nnz = len(con.vals)
                self.rows[slot, :nnz] = con.rows
                self.cols[slot, :nnz] = con.cols
                self.vals[slot, :nnz] = con.vals

    def build(self, w: np.ndarray) -> np.ndarray:
        m = len(self.constraints)
        mat = np.empty((m, m))
        for j, con in enumerate(self.constraints):
            waw = con.congruence(w)
            if self.sparse_idx:
                mat[self.sparse_idx, j] = np.einsum(
                    "ik,ik->i", self.vals, waw[self.rows, self.cols]
                )
            for k in self.dense_idx:
                mat[k, j] = self.constraints[k].inner(waw)
        return _sym(mat)


def sdp_solve(prob: SdpProblem, tol: float = 1e-8, max_iterations: int = 100) -> SdpSolution:
    """Run the interior-point iteration; always returns a usable solution.

    The status is honest: "optimal" only when the relative gap and both
    residuals fall below tol.  Callers needing safe bounds should go
    through SdpSolution.certified_lower_bound regardless of status.
    """
    n = prob.dim
    m = len(prob.constraints)
    if n > DIMENSION_CAP:
        raise SdpError(f"dimension {n} exceeds cap {DIMENSION_CAP}")
    if m == 0:
        raise SdpError("problem has no constraints")

    b = prob.rhs
    # Internal objective scaling keeps iterations well conditioned when
    # weights span many orders of magnitude; results are reported unscaled.
    scale = max(1.0, float(np.linalg.norm(prob.c)))
    c = prob.c / scale

    norm_b = 1.0 + float(np.linalg.norm(b))
    norm_c = 1.0 + float(np.linalg.norm(c))
    con_norms = [con.norm() for con in prob.constraints]
    xi = n * max(1.0, max((1.0 + abs(bi)) / (1.0 + nm) for bi, nm in zip(b, con_norms)))
    eta = max(1.0, max(con_norms, default=1.0), float(np.linalg.norm(c)))

    x = xi * np.eye(n)
    z = eta * np.eye(n)
    y = np.zeros(m)
    assembler = _SchurAssembler(prob.constraints)

    best = None
    status = "max_iterations"
    it = 0
    rel_gap = pres = dres = np.inf
    # Problems lacking a strictly feasible point can send the dual running
    # away; overflow is silenced here, detected by the finiteness guard or
    # the except clause, and answered by falling back to the best iterate,
    # whose certificate is valid for any dual vector.
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for it in range(1, max_iterations + 1):
            rp = b - prob.op_a(x)
            rd = c - prob.op_at(y) - z

            pobj = float(np.tensordot(c, x))
            dobj = float(b @ y)
            gap = float(np.tensordot(x, z))
            rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
            pres = float(np.linalg.norm(rp)) / norm_b
            dres = float(np.linalg.norm(rd)) / norm_c

            worst = max(rel_gap, pres, dres)
            if not np.isfinite(pobj) or not np.isfinite(gap) or not np.isfinite(worst):
                status = "numerical_failure"
                break

            if best is None or worst < best[0]:
                best = (worst, x.copy(), y.copy(), z.copy(), rel_gap, pres, dres)

            if worst <= tol:
                status = "optimal"
                break

            mu = gap / n
            try:
                w, z_inv = _nt_scaling(x, z)
                fact = _robust_cho_factor(assembler.build(w))
                a_wrdw = prob.op_a(w @ rd @ w)

                def direction(rc):
                    dy = cho_solve(fact, rp - prob.op_a(rc) + a_wrdw)
                    dz = _sym(rd - prob.op_at(dy))
                    dx = _sym(rc + w @ (prob.op_at(dy) - rd) @ w)
                    return dy, dx, dz

                dy_a, dx_a, dz_a = direction(-x)
                ap = min(1.0, _max_step(x, dx_a))
                ad = min(1.0, _max_step(z, dz_a))
                mu_aff = float(np.tensordot(x + ap * dx_a, z + ad * dz_a)) / n
                sigma = min(1.0, max((max(mu_aff, 0.0) / mu) ** 3, 1e-8))

                dy, dx, dz = direction(sigma * mu * z_inv - x)
                tau = 0.95 if it <= 3 else 0.98
                ap = min(1.0, tau * _max_step(x, dx))
                ad = min(1.0, tau * _max_step(z, dz))
                if ap <= 1e-10 and ad <= 1e-10:
                    status = "numerical_failure"
                    break
                x = _sym(x + ap * dx)
                y = y + ad * dy
                z = _sym(z + ad * dz)
            except (np.linalg.LinAlgError, SdpError, ValueError):
                status = "numerical_failure"
                break

    if best is None:
        raise SdpError("iteration produced no usable point")

    if status == "optimal":
        rel_out, pres_out, dres_out = rel_gap, pres, dres
    else:
        _, x, y, z, rel_out, pres_out, dres_out = best
        log.info("sdp_solve: %s after %d iterations (relgap %.2e)", status, it, rel_out)

    # Undo the objective scaling: y pairs with C = scale * c, so the dual
    # certificate for the original data is scale * y.
    y_orig = scale * y
    slack = prob.c - prob.op_at(y_orig)
    min_eig = float(np.min(eigh(_sym(slack), eigvals_only=True)))

    return SdpSolution(
        problem=prob,
        x=x,
        y=y_orig,
        z=scale * z,
        primal_obj=float(np.tensordot(prob.c, x)),
        dual_obj=float(b @ y_orig),
        status=status,
        rel_gap=rel_out,
        primal_res=pres_out,
        dual_res=dres_out,
        iterations=it,
        dual_slack_min_eig=min_eig,
    )


def _robust_cho_factor(mat: np.ndarray):
    bump = 1e-13 * max(1.0, float(np.trace(mat)) / max(1, mat.shape[0]))
    for _ in range(6):
        try:
            return cho_factor(mat + bump * np.eye(mat.shape[0]), lower=True)
        except np.linalg.LinAlgError:
            bump *= 100.0
    raise SdpError("Schur complement not positive definite")


def dump_problem(prob: SdpProblem) -> str:
    """Plain-text triplet dump, for debugging by eye or by diff."""
    lines = [f"dim {prob.dim} constraints {len(prob.constraints)}"]
    ii, jj = np.nonzero(prob.c)
    pairs = [(i, j) for i, j in zip(ii, jj) if i <= j]
    lines.append(f"objective nnz {len(pairs)}")
    for i, j in pairs:
        lines.append(f"  0 {i} {j} {prob.c[i, j]:.17g}")
    for idx, con in enumerate(prob.constraints, start=1):
        if con.dense is not None:
            ii, jj = np.nonzero(con.dense)
            trip = [(i, j, con.dense[i, j]) for i, j in zip(ii, jj) if i <= j]
        else:
            trip = [
                (i, j, v if i == j else 2 * v)
                for i, j, v in zip(con.rows, con.cols, con.vals)
                if i <= j
            ]
        lines.append(f"constraint {idx} rhs {con.rhs:.17g} nnz {len(trip)}")
        lines.extend(f"  {idx} {i} {j} {v:.17g}" for i, j, v in trip)
    return "\n".join(lines) + "\n"
