"""Violation tolerance upper bounds for linear GBTSVM slacks.

For two balls of the same class the difference between their fitted slacks
is bounded by a constant times the cube of the distance between their
centers.  For a pair of -1 balls (slacks of the first plane)

    |xi_i - xi_j| <= Delta^2 (delta + tau1)(delta + tau1 + tau2) sqrt(kappa) ||G||_F d_ij^3

with ``tau1 = lambda_max(H'H)``, ``tau2 = lambda_max(G'G)`` and
``kappa = sum_s (1 + r_s)^2`` over the -1 radii.  The +1 bound swaps the
roles of ``H`` and ``G``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedError
from .gbtsvm import assemble_linear, slacks
from .granulation import GranulationResult
from .model import TwinModel
from .numerics import largest_eigenvalue

HOLD_SLACK = 1e-9


@dataclass(frozen=True)
class VTUBParams:
    Delta: float = 1e3
    delta: float = 1e-6

    def __post_init__(self):
        if not (self.Delta > 0 and self.delta > 0):
            raise ValueError("Delta and delta must be positive")


@dataclass
class VTUBReport:
    """Pairwise slack differences against their bounds, for both classes."""

    pairs: list
    tau1: float
    tau2: float
    kappa: dict
    frobenius_norm: dict
    params: VTUBParams = field(default_factory=VTUBParams)

    @property
    def violations(self):
        return [r for r in self.pairs if not r["holds"]]

    @property
    def max_ratio(self):
        """Largest lhs/rhs over pairs with a positive bound (0 when there are none)."""
        ratios = [r["lhs"] / r["rhs"] for r in self.pairs if r["rhs"] > 0]
        return max(ratios, default=0.0)

    def to_json_obj(self):
        return {"Delta": self.params.Delta, "delta": self.params.delta,
                "tau1": self.tau1, "tau2": self.tau2, "kappa": self.kappa,
                "frobenius_norm": self.frobenius_norm,
                "n_pairs": len(self.pairs), "n_violations": len(self.violations),
                "max_ratio": self.max_ratio, "pairs": self.pairs}


def _taus(H, G):
    return largest_eigenvalue(H.T @ H), largest_eigenvalue(G.T @ G)


def _bound(own_tau, tau1, tau2, radii, other_frob, dist, params):
    kappa = float(np.sum((1.0 + np.asarray(radii, dtype=float)) ** 2))
    return (params.Delta ** 2 * (params.delta + own_tau) * (params.delta + tau1 + tau2)
            * math.sqrt(kappa) * other_frob * dist ** 3)


def bound_positive(H, G, radii2, params: VTUBParams, i, j, taus=None) -> float:
    """Bound on ``|xi2_i - xi2_j|`` for -1 balls ``i`` and ``j`` (rows of ``G``)."""
    H = np.asarray(H, dtype=float)
    G = np.asarray(G, dtype=float)
    tau1, tau2 = taus if taus is not None else _taus(H, G)
    dist = float(np.linalg.norm(G[i] - G[j]))
    return _bound(tau1, tau1, tau2, radii2, float(np.linalg.norm(G)), dist, params)


def bound_negative(H, G, radii1, params: VTUBParams, i, j, taus=None) -> float:
    """Bound on ``|xi1_i - xi1_j|`` for +1 balls ``i`` and ``j`` (rows of ``H``)."""
    H = np.asarray(H, dtype=float)
    G = np.asarray(G, dtype=float)
    tau1, tau2 = taus if taus is not None else _taus(H, G)
    dist = float(np.linalg.norm(H[i] - H[j]))
    return _bound(tau2, tau1, tau2, radii1, float(np.linalg.norm(H)), dist, params)


def verify(model: TwinModel, balls: GranulationResult, params: VTUBParams = VTUBParams()) -> VTUBReport:
    """Check both bounds on every same-class pair of balls."""
    if model.is_kernel:
        raise UnsupportedError("violation bounds are only defined for linear models")
    H, G, R1, R2 = assemble_linear(balls)
    xi1, xi2 = slacks(model, balls)
    taus = _taus(H, G)
    pairs = []
    for cls, M, xi, radii, fn in ((-1, G, xi2, R2, bound_positive),
                                  (1, H, xi1, R1, bound_negative)):
        for i in range(M.shape[0]):
            for j in range(i, M.shape[0]):
                rhs = fn(H, G, radii, params, i, j, taus=taus)
                lhs = float(abs(xi[i] - xi[j]))
                pairs.append({"class": cls, "i": i, "j": j, "lhs": lhs, "rhs": rhs,
                              "d_ij": float(np.linalg.norm(M[i] - M[j])),
                              "holds": bool(lhs <= rhs + HOLD_SLACK)})
    kappa = {"-1": float(np.sum((1.0 + R2) ** 2)), "+1": float(np.sum((1.0 + R1) ** 2))}
    frob = {"H": float(np.linalg.norm(H)), "G": float(np.linalg.norm(G))}
    return VTUBReport(pairs, taus[0], taus[1], kappa, frob, params)
