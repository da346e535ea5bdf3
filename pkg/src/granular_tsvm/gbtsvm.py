"""GBTSVM: twin hyperplanes fitted to granular-ball centers.

Plane 1 stays close to the +1 ball centers and keeps every -1 ball at least
one unit plus its radius away; plane 2 mirrors this.  Both are found from
their Wolfe duals, which are box QPs over one multiplier per ball of the
opposite class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, UnsupportedError
from .granulation import GranulationResult
from .kernels import KernelSpec, gram
from .model import TwinModel
from .numerics import BoxQP, SolverConfig, solve_box_qp, solve_spd


@dataclass(frozen=True)
class GBTSVMHyper:
    d1: float = 1.0
    d2: float = 1.0
    delta: float = 1e-6
    solver: SolverConfig = SolverConfig()
    kernel: KernelSpec = KernelSpec()

    def __post_init__(self):
        if min(self.d1, self.d2, self.delta) <= 0:
            raise ValueError("d1, d2 and delta must be positive")

    def to_dict(self):
        return {"d1": self.d1, "d2": self.d2, "delta": self.delta,
                "kernel": self.kernel.to_dict()}


def _split_by_label(balls: GranulationResult):
    if balls.p1 == 0 or balls.p2 == 0:
        raise DegenerateDataError("granular balls cover only one class")
    C1, C2 = balls.centers(1), balls.centers(-1)
    R1, R2 = balls.radii(1), balls.radii(-1)
    return C1, C2, R1, R2


def _augment(C):
    return np.hstack([C, np.ones((C.shape[0], 1))])


def assemble_linear(balls: GranulationResult):
    """``H = [C1 e]``, ``G = [C2 e]`` and the radius vectors in matching order."""
    C1, C2, R1, R2 = _split_by_label(balls)
    return _augment(C1), _augment(C2), R1, R2


def _solve_twin_duals(H, G, R1, R2, hyper: GBTSVMHyper):
    """Solve both duals for augmented class matrices; returns u1, u2 and the raw solutions."""
    k = H.shape[1]
    reg = hyper.delta * np.eye(k)

    # plane 1: max a'(e+R2) - 0.5 a' G (H'H + dI)^-1 G' a, 0 <= a <= d1
    Y1 = solve_spd(H.T @ H + reg, G.T)
    Q1 = G @ Y1
    qp1 = BoxQP(0.5 * (Q1 + Q1.T), -(1.0 + R2), 0.0, hyper.d1)
    sol1 = solve_box_qp(qp1, hyper.solver)
    u1 = -Y1 @ sol1.x

    # plane 2: max g'(e+R1) - 0.5 g' H (G'G + dI)^-1 H' g, 0 <= g <= d2
    Y2 = solve_spd(G.T @ G + reg, H.T)
    Q2 = H @ Y2
    qp2 = BoxQP(0.5 * (Q2 + Q2.T), -(1.0 + R1), 0.0, hyper.d2)
    sol2 = solve_box_qp(qp2, hyper.solver)
    u2 = Y2 @ sol2.x
    return u1, u2, sol1, sol2


def _info(sol1, sol2):
    return {"alpha": sol1.x, "gamma": sol2.x,
            # dual optima in the original maximization sense
            "dual_objectives": (-sol1.objective, -sol2.objective),
            "iterations": (sol1.iterations, sol2.iterations),
            "kkt_residuals": (sol1.kkt_residual, sol2.kkt_residual)}


def fit_linear(balls: GranulationResult, hyper: GBTSVMHyper = GBTSVMHyper(), label_map=None):
    H, G, R1, R2 = assemble_linear(balls)
    u1, u2, sol1, sol2 = _solve_twin_duals(H, G, R1, R2, hyper)
    return TwinModel("linear", u1[:-1], u1[-1], u2[:-1], u2[-1],
                     kernel=KernelSpec("linear"), hyper=hyper.to_dict(),
                     label_map=label_map, info=_info(sol1, sol2))


def fit_kernel(balls: GranulationResult, hyper: GBTSVMHyper, label_map=None):
    """Kernel GBTSVM over the stacked centers ``Z = [C1; C2]``.

    The class matrices become ``F = [K(C1, Z) e]`` and ``E = [K(C2, Z) e]``;
    each plane is a coefficient vector over ``Z`` plus a bias.
    """
    C1, C2, R1, R2 = _split_by_label(balls)
    Z = np.vstack([C1, C2])
    F = _augment(gram(hyper.kernel, C1, Z))
    E = _augment(gram(hyper.kernel, C2, Z))
    u1, u2, sol1, sol2 = _solve_twin_duals(F, E, R1, R2, hyper)
    return TwinModel("kernel", u1[:-1], u1[-1], u2[:-1], u2[-1],
                     kernel=hyper.kernel, reference_centers=Z, hyper=hyper.to_dict(),
                     label_map=label_map, info=_info(sol1, sol2))


def fit(balls: GranulationResult, hyper: GBTSVMHyper = GBTSVMHyper(), label_map=None):
    if hyper.kernel.kind == "linear":
        return fit_linear(balls, hyper, label_map)
    return fit_kernel(balls, hyper, label_map)


def slacks(model: TwinModel, balls: GranulationResult):
    """Hinge slacks of the ball constraints at the fitted planes.

    ``xi2 = max(0, 1 + R2 + (C2 w1 + b1))`` for the -1 balls and
    ``xi1 = max(0, 1 + R1 - (C1 w2 + b2))`` for the +1 balls.
    """
    if model.is_kernel:
        raise UnsupportedError("slacks are only defined for linear models")
    C1, C2, R1, R2 = _split_by_label(balls)
    xi2 = np.maximum(0.0, 1.0 + R2 + (C2 @ model.w1 + model.b1))
    xi1 = np.maximum(0.0, 1.0 + R1 - (C1 @ model.w2 + model.b2))
    return xi1, xi2
