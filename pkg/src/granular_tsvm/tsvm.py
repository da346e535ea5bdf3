"""Point-based twin SVM baseline.

Each plane is fitted to the raw samples of one class while keeping the other
class at unit distance; no granulation and no radii.  Used as a comparison
model and as the reference that GBTSVM must reduce to on singleton balls.
"""

from __future__ import annotations

import numpy as np

from .dataset import Dataset, require_both_classes
from .gbtsvm import GBTSVMHyper
from .kernels import KernelSpec
from .model import TwinModel
from .numerics import BoxQP, solve_box_qp, solve_spd


def fit_tsvm(d: Dataset, hyper: GBTSVMHyper = GBTSVMHyper()) -> TwinModel:
    """Linear TSVM on the samples of ``d`` (``hyper.kernel`` is ignored)."""
    require_both_classes(d, "training set")
    A = np.hstack([d.positive, np.ones((int(np.sum(d.labels == 1)), 1))])
    B = np.hstack([d.negative, np.ones((int(np.sum(d.labels == -1)), 1))])
    reg = hyper.delta * np.eye(A.shape[1])

    AtA_inv_Bt = solve_spd(A.T @ A + reg, B.T)
    Qa = B @ AtA_inv_Bt
    sa = solve_box_qp(BoxQP(0.5 * (Qa + Qa.T), -np.ones(B.shape[0]), 0.0, hyper.d1),
                      hyper.solver)
    z1 = -AtA_inv_Bt @ sa.x

    BtB_inv_At = solve_spd(B.T @ B + reg, A.T)
    Qg = A @ BtB_inv_At
    sg = solve_box_qp(BoxQP(0.5 * (Qg + Qg.T), -np.ones(A.shape[0]), 0.0, hyper.d2),
                      hyper.solver)
    z2 = BtB_inv_At @ sg.x

    return TwinModel("linear", z1[:-1], z1[-1], z2[:-1], z2[-1], kernel=KernelSpec("linear"),
                     hyper=dict(hyper.to_dict(), model="tsvm"), label_map=d.meta.get("label_map"),
                     info={"alpha": sa.x, "gamma": sg.x,
                           "dual_objectives": (-sa.objective, -sg.objective)})
