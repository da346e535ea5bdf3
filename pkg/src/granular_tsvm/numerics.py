"""Dense linear algebra and box-constrained QP kernels.

All QPs are in the canonical minimization form

    min  0.5 x'Qx + c'x   subject to   lower <= x <= upper,

where bounds may be infinite.  :func:`solve_box_qp` is the production
solver (projected Gauss-Seidel / SOR); :func:`active_set_oracle` is an
exhaustive reference used only to check it on small instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np
from scipy import linalg

from .errors import IndefiniteDiagonalError, NotPositiveDefiniteError, SolverConvergenceError


@dataclass(frozen=True)
class BoxQP:
    Q: np.ndarray
    c: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        c = np.asarray(self.c, dtype=float).ravel()
        k = c.size
        lo = np.broadcast_to(np.asarray(self.lower, dtype=float), (k,)).copy()
        hi = np.broadcast_to(np.asarray(self.upper, dtype=float), (k,)).copy()
        if Q.shape != (k, k):
            raise ValueError(f"Q has shape {Q.shape}, expected {(k, k)}")
        scale = max(1.0, float(np.max(np.abs(Q)))) if k else 1.0
        if not np.allclose(Q, Q.T, rtol=0.0, atol=1e-10 * scale):
            raise ValueError("Q must be symmetric")
        if np.any(lo > hi):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def k(self):
        return self.c.size

    def objective(self, x):
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.Q @ x + self.c @ x)

    def with_jitter(self, rel=1e-10):
        """Copy with ``rel * trace(Q) / k`` added to the diagonal."""
        eps = rel * float(np.trace(self.Q)) / max(self.k, 1)
        Q = self.Q + eps * np.eye(self.k)
        return BoxQP(Q, self.c, self.lower, self.upper), eps


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-8
    max_sweeps: int = 10_000
    omega: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.omega < 2.0:
            raise ValueError("omega must lie in (0, 2)")
        if self.tolerance <= 0 or self.max_sweeps < 1:
            raise ValueError("tolerance and max_sweeps must be positive")


@dataclass
class QPSolution:
    x: np.ndarray
    objective: float
    iterations: int
    kkt_residual: float
    jitter: float = 0.0
    history: Optional[list] = field(default=None, repr=False)


def solve_spd(A, B):
    """Solve ``A X = B`` for symmetric positive definite ``A`` by Cholesky."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    try:
        factor = linalg.cho_factor(A, lower=True, check_finite=True)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"matrix is not positive definite: {exc}") from None
    return linalg.cho_solve(factor, B)


def kkt_residual(p: BoxQP, x, g=None) -> float:
    """Largest violation of the box-QP optimality conditions at ``x``.

    Interior coordinates contribute ``|g_i|``; coordinates at the lower bound
    ``max(0, -g_i)``; at the upper bound ``max(0, g_i)``, with ``g = Qx + c``.
    """
    x = np.asarray(x, dtype=float)
    if g is None:
        g = p.Q @ x + p.c
    at_lo = x <= p.lower
    at_hi = x >= p.upper
    r = np.abs(g)
    r = np.where(at_lo, np.maximum(0.0, -g), r)
    r = np.where(at_hi, np.maximum(0.0, g), r)
    # degenerate box lower == upper: any gradient is fine
    r = np.where(at_lo & at_hi, 0.0, r)
    return float(np.max(r)) if r.size else 0.0


@numba.njit(cache=True)
def _sor_sweep(Q, lower, upper, x, g, order, omega):
    biggest = 0.0
    k = x.shape[0]
    for t in range(order.shape[0]):
        i = order[t]
        xi = x[i]
        new = xi - omega * g[i] / Q[i, i]
        if new < lower[i]:
            new = lower[i]
        elif new > upper[i]:
            new = upper[i]
        step = new - xi
        if step != 0.0:
            x[i] = new
            for j in range(k):
                g[j] += Q[j, i] * step
            if abs(step) > biggest:
                biggest = abs(step)
    return biggest


def solve_box_qp(p: BoxQP, cfg: SolverConfig = SolverConfig(), x0=None, order="cyclic",
                 seed=0, record_history=False) -> QPSolution:
    """Projected SOR for a box-constrained convex QP.

    Each sweep updates coordinate ``i`` to
    ``clip(x_i - omega * (Qx + c)_i / Q_ii, lower_i, upper_i)``.  Iteration
    stops once the largest coordinate change in a sweep is at most
    ``cfg.tolerance`` and the KKT residual is at most ``10 * cfg.tolerance``,
    or as soon as the KKT residual alone drops to ``cfg.tolerance``.

    ``order="cyclic"`` visits coordinates in index order; ``"random"``
    reshuffles every sweep (seeded).
    """
    Q = np.ascontiguousarray(p.Q)
    k = p.k
    diag = np.diag(Q)
    if k and np.any(diag <= 0):
        raise IndefiniteDiagonalError(
            f"nonpositive diagonal entry at index {int(np.argmin(diag))}")
    if x0 is None:
        x = np.clip(np.zeros(k), p.lower, p.upper)
    else:
        x = np.clip(np.asarray(x0, dtype=float).copy(), p.lower, p.upper)
    g = Q @ x + p.c
    rng = np.random.default_rng(seed)
    cyc = np.arange(k, dtype=np.int64)
    history = [p.objective(x)] if record_history else None
    for sweep in range(1, cfg.max_sweeps + 1):
        perm = cyc if order == "cyclic" else rng.permutation(k).astype(np.int64)
        change = _sor_sweep(Q, p.lower, p.upper, x, g, perm, cfg.omega)
        if record_history:
            history.append(p.objective(x))
        # on nearly flat directions steps can stay above tolerance while the
        # iterate is already optimal, so a tight KKT residual also stops
        if change <= cfg.tolerance or kkt_residual(p, x, g) <= cfg.tolerance:
            g = Q @ x + p.c  # refresh accumulated round-off
            res = kkt_residual(p, x, g)
            if res <= 10 * cfg.tolerance:
                return QPSolution(x, p.objective(x), sweep, res, history=history)
    res = kkt_residual(p, x)
    best = QPSolution(x, p.objective(x), cfg.max_sweeps, res, history=history)
    raise SolverConvergenceError(
        f"box QP not converged after {cfg.max_sweeps} sweeps (kkt residual {res:.3g})", best)


def active_set_oracle(p: BoxQP, max_k=12) -> QPSolution:
    """Exhaustive reference solver for tiny box QPs.

    Every coordinate is tried at its lower bound, its upper bound, or free;
    each assignment gives a linear system for the free block.  The feasible
    stationary candidate with the lowest objective is returned.
    """
    k = p.k
    if k > max_k:
        raise ValueError(f"active_set_oracle refuses k={k} > {max_k}")
    choices = []
    for i in range(k):
        opts = ["free"]
        if np.isfinite(p.lower[i]):
            opts.append("lo")
        if np.isfinite(p.upper[i]) and p.upper[i] != p.lower[i]:
            opts.append("hi")
        choices.append(opts)
    scale = max(1.0, float(np.max(np.abs(p.Q))) if k else 1.0, float(np.max(np.abs(p.c))) if k else 1.0)
    best_x, best_f = None, np.inf
    for combo in itertools.product(*choices):
        x = np.zeros(k)
        free = np.array([c == "free" for c in combo], dtype=bool)
        for i, c in enumerate(combo):
            if c == "lo":
                x[i] = p.lower[i]
            elif c == "hi":
                x[i] = p.upper[i]
        if free.any():
            fixed = ~free
            rhs = -(p.c[free] + p.Q[np.ix_(free, fixed)] @ x[fixed])
            Qff = p.Q[np.ix_(free, free)]
            sol, *_ = np.linalg.lstsq(Qff, rhs, rcond=None)
            if np.linalg.norm(Qff @ sol - rhs) > 1e-9 * scale * max(1.0, np.linalg.norm(sol)):
                continue
            x[free] = sol
        slack = 1e-12 * max(1.0, float(np.max(np.abs(x))) if k else 1.0)
        if np.any(x < p.lower - slack) or np.any(x > p.upper + slack):
            continue
        x = np.clip(x, p.lower, p.upper)
        f = p.objective(x)
        if f < best_f:
            best_x, best_f = x, f
    if best_x is None:
        raise ValueError("no feasible stationary candidate (problem unbounded?)")
    return QPSolution(best_x, best_f, 0, kkt_residual(p, best_x))


def largest_eigenvalue(A, tol=1e-10, max_iter=20_000, seed=0) -> float:
    """Algebraically largest eigenvalue of a symmetric matrix by power iteration.

    Plain power iteration finds the eigenvalue of largest magnitude.  If that
    turns out negative, or the iteration stalls (two eigenvalues of equal
    magnitude and opposite sign), the matrix is shifted to be positive
    semidefinite and the iteration restarts.
    """
    A = np.asarray(A, dtype=float)
    k = A.shape[0]
    if k == 0:
        raise ValueError("empty matrix")
    if k == 1:
        return float(A[0, 0])
    scale = float(np.linalg.norm(A))
    if scale == 0.0:
        return 0.0
    rng = np.random.default_rng(seed)

    def power(M):
        v = rng.standard_normal(k)
        v /= np.linalg.norm(v)
        rho = float(v @ M @ v)
        for _ in range(max_iter):
            w = M @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return 0.0, True
            v = w / nw
            new = float(v @ M @ v)
            resid = np.linalg.norm(M @ v - new * v)
            if abs(new - rho) <= tol * max(abs(new), 1e-300) and resid <= np.sqrt(tol) * scale:
                return new, True
            rho = new
        return rho, False

    lam, ok = power(A)
    if ok and lam >= 0:
        return lam
    # Gershgorin: A + s I is positive semidefinite
    s = max(0.0, float(np.max(np.sum(np.abs(A), axis=1) - 2 * np.diag(A))),
            -lam if ok else 0.0)
    lam_s, _ = power(A + s * np.eye(k))
    return lam_s - s
