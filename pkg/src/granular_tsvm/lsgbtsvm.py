"""LS-GBTSVM: regularized twin planes whose duals need no matrix inverse.

Adding ``0.5 * d3 * (||w1||^2 + b1^2)`` to the first problem and turning the
proximity term into an equality constraint gives a dual over
``(alpha1, beta1)`` with Hessian

    P = [[C1 C1' + d3 I, C1 C2'], [C2 C1', C2 C2']] + ones,

``alpha1`` free and ``0 <= beta1 <= d1``.  The plane is read off directly:
``w1 = -(C1' alpha1 + C2' beta1) / d3``, ``b1 = -(sum alpha1 + sum beta1) / d3``.
The second problem mirrors this with the classes swapped and the opposite
sign in the recovery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError
from .gbtsvm import _split_by_label
from .granulation import GranulationResult
from .kernels import KernelSpec, gram
from .model import TwinModel
from .numerics import BoxQP, SolverConfig, solve_box_qp

SOLVER_KINDS = ("sor", "generic")
STATIONARITY_TOL = 1e-8


@dataclass(frozen=True)
class LSHyper:
    d1: float = 1.0
    d2: float = 1.0
    d3: float = 1.0
    d4: float = 1.0
    solver: SolverConfig = SolverConfig()
    kernel: KernelSpec = KernelSpec()
    solver_kind: str = "sor"
    seed: int = 0

    def __post_init__(self):
        if min(self.d1, self.d2, self.d3, self.d4) <= 0:
            raise ValueError("d1..d4 must be positive")
        if self.solver_kind not in SOLVER_KINDS:
            raise ValueError(f"solver_kind must be one of {SOLVER_KINDS}")

    def to_dict(self):
        return {"d1": self.d1, "d2": self.d2, "d3": self.d3, "d4": self.d4,
                "kernel": self.kernel.to_dict(), "solver_kind": self.solver_kind}


@dataclass(frozen=True)
class LSDual:
    """One LS dual: the box QP plus the sizes of its free and boxed blocks."""

    qp: BoxQP
    n_alpha: int
    n_beta: int


def _block_gram(kernel, A, B):
    return A @ B.T if kernel.kind == "linear" else gram(kernel, A, B)


def _assemble(own, other, r_other, reg, box, kernel):
    """Dual for the plane that hugs ``own`` and pushes ``other`` away."""
    na, nb = own.shape[0], other.shape[0]
    Koo = _block_gram(kernel, own, own)
    Kot = _block_gram(kernel, own, other)
    Ktt = _block_gram(kernel, other, other)
    P = np.block([[Koo + reg * np.eye(na), Kot], [Kot.T, Ktt]]) + 1.0
    P = 0.5 * (P + P.T)
    c = np.concatenate([np.zeros(na), -reg * (1.0 + r_other)])
    lower = np.concatenate([np.full(na, -np.inf), np.zeros(nb)])
    upper = np.concatenate([np.full(na, np.inf), np.full(nb, box)])
    return LSDual(BoxQP(P, c, lower, upper), na, nb)


def assemble_dual_pos(balls: GranulationResult, hyper: LSHyper = LSHyper()) -> LSDual:
    """Dual of the +1-class plane: variables ``(alpha1, beta1)``."""
    C1, C2, R1, R2 = _split_by_label(balls)
    return _assemble(C1, C2, R2, hyper.d3, hyper.d1, hyper.kernel)


def assemble_dual_neg(balls: GranulationResult, hyper: LSHyper = LSHyper()) -> LSDual:
    """Dual of the -1-class plane: variables ``(alpha2, beta2)``."""
    C1, C2, R1, R2 = _split_by_label(balls)
    return _assemble(C2, C1, R1, hyper.d4, hyper.d2, hyper.kernel)


def _solve(dual: LSDual, hyper: LSHyper):
    # the other-class Gram block plus the ones matrix can be singular
    qp, eps = dual.qp.with_jitter()
    order = "cyclic" if hyper.solver_kind == "sor" else "random"
    sol = solve_box_qp(qp, hyper.solver, order=order, seed=hyper.seed)
    sol.jitter = eps
    return sol.x[:dual.n_alpha], sol.x[dual.n_alpha:], sol


def fit(balls: GranulationResult, hyper: LSHyper = LSHyper(), label_map=None) -> TwinModel:
    """Fit both LS duals and recover the planes; no linear system is solved."""
    C1, C2, R1, R2 = _split_by_label(balls)
    a1, b1v, sol1 = _solve(assemble_dual_pos(balls, hyper), hyper)
    a2, b2v, sol2 = _solve(assemble_dual_neg(balls, hyper), hyper)

    bias1 = -(a1.sum() + b1v.sum()) / hyper.d3
    bias2 = (a2.sum() + b2v.sum()) / hyper.d4
    info = {"alpha1": a1, "beta1": b1v, "alpha2": a2, "beta2": b2v,
            "iterations": (sol1.iterations, sol2.iterations),
            "kkt_residuals": (sol1.kkt_residual, sol2.kkt_residual),
            "jitter": (sol1.jitter, sol2.jitter)}

    if hyper.kernel.kind == "linear":
        w1 = -(C1.T @ a1 + C2.T @ b1v) / hyper.d3
        w2 = (C2.T @ a2 + C1.T @ b2v) / hyper.d4
        res1 = float(np.linalg.norm(hyper.d3 * w1 + C1.T @ a1 + C2.T @ b1v))
        res2 = float(np.linalg.norm(hyper.d4 * w2 - C2.T @ a2 - C1.T @ b2v))
        if max(res1, res2) > STATIONARITY_TOL:
            raise SolverError(f"stationarity residual {max(res1, res2):.3g} too large")
        info["stationarity_residuals"] = (res1, res2)
        return TwinModel("ls-linear", w1, bias1, w2, bias2, kernel=hyper.kernel,
                         hyper=hyper.to_dict(), label_map=label_map, info=info)

    # coefficients over Z = [C1; C2]
    Z = np.vstack([C1, C2])
    coef1 = -np.concatenate([a1, b1v]) / hyper.d3
    coef2 = np.concatenate([b2v, a2]) / hyper.d4
    return TwinModel("ls-kernel", coef1, bias1, coef2, bias2, kernel=hyper.kernel,
                     reference_centers=Z, hyper=hyper.to_dict(), label_map=label_map,
                     info=info)
