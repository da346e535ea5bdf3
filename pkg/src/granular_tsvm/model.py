"""Fitted twin-hyperplane models, prediction and JSON persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .kernels import KernelSpec, gram

MODES = ("linear", "kernel", "ls-linear", "ls-kernel")
DEGENERATE_NORM = 1e-12


@dataclass
class TwinModel:
    """Two hyperplanes ``w1'x + b1 = 0`` (near +1) and ``w2'x + b2 = 0`` (near -1).

    In kernel modes ``w1``/``w2`` are coefficient vectors over
    ``reference_centers`` and the planes live in the kernel feature space.
    ``normalization`` optionally records the min-max scaling the training
    data went through; callers apply it to new samples before predicting.
    """

    mode: str
    w1: np.ndarray
    b1: float
    w2: np.ndarray
    b2: float
    kernel: KernelSpec = KernelSpec()
    reference_centers: Optional[np.ndarray] = None
    norms: tuple = None
    hyper: dict = field(default_factory=dict)
    label_map: Optional[dict] = None
    normalization: Optional[dict] = None
    info: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.w1 = np.asarray(self.w1, dtype=float)
        self.w2 = np.asarray(self.w2, dtype=float)
        self.b1 = float(self.b1)
        self.b2 = float(self.b2)
        if self.is_kernel:
            if self.reference_centers is None:
                raise ValueError("kernel models need reference centers")
            self.reference_centers = np.asarray(self.reference_centers, dtype=float)
        if self.norms is None:
            self.norms = self._compute_norms()
        self.norms = (float(self.norms[0]), float(self.norms[1]))

    @property
    def is_kernel(self):
        return self.mode in ("kernel", "ls-kernel")

    def _compute_norms(self):
        if not self.is_kernel:
            return float(np.linalg.norm(self.w1)), float(np.linalg.norm(self.w2))
        K = gram(self.kernel, self.reference_centers, self.reference_centers)
        return tuple(float(np.sqrt(max(v @ K @ v, 0.0))) for v in (self.w1, self.w2))

    @property
    def degenerate(self):
        """Per plane: normal vector too short to normalize a distance."""
        return tuple(nv < DEGENERATE_NORM for nv in self.norms)

    def plane_values(self, X):
        """Raw values ``w_i'x + b_i`` for both planes."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.is_kernel:
            Kx = gram(self.kernel, X, self.reference_centers)
            return Kx @ self.w1 + self.b1, Kx @ self.w2 + self.b2
        return X @ self.w1 + self.b1, X @ self.w2 + self.b2

    # -- persistence ---------------------------------------------------------

    def to_json_obj(self):
        obj = {
            "mode": self.mode,
            "w1": self.w1.tolist(), "b1": self.b1,
            "w2": self.w2.tolist(), "b2": self.b2,
            "kernel": self.kernel.to_dict(),
            "hyper": self.hyper,
            "label_map": self.label_map,
            "norms": list(self.norms),
        }
        if self.is_kernel:
            obj["centers"] = self.reference_centers.tolist()
        if self.normalization is not None:
            obj["normalization"] = self.normalization
        return obj

    @classmethod
    def from_json_obj(cls, obj):
        return cls(
            mode=obj["mode"],
            w1=np.array(obj["w1"], dtype=float), b1=obj["b1"],
            w2=np.array(obj["w2"], dtype=float), b2=obj["b2"],
            kernel=KernelSpec.from_dict(obj["kernel"]),
            reference_centers=(np.array(obj["centers"], dtype=float)
                               if obj.get("centers") is not None else None),
            norms=tuple(obj["norms"]),
            hyper=obj.get("hyper", {}),
            label_map=obj.get("label_map"),
            normalization=obj.get("normalization"),
        )


def decision(model: TwinModel, X):
    """Normalized distances ``|w_i'x + b_i| / ||w_i||`` to both planes.

    A plane whose normal is shorter than 1e-12 reports ``|b_i|`` instead
    (see ``model.degenerate``).  Accepts one sample or a matrix of rows and
    returns a pair of arrays.
    """
    f1, f2 = model.plane_values(X)
    out = []
    for f, b, nv, bad in zip((f1, f2), (model.b1, model.b2), model.norms, model.degenerate):
        out.append(np.full_like(f, abs(b)) if bad else np.abs(f) / nv)
    return out[0], out[1]


def predict(model: TwinModel, X):
    """+1 when closer to the first plane; ties go to +1."""
    d1, d2 = decision(model, X)
    return np.where(d1 <= d2, 1, -1)


def predict_raw(model: TwinModel, X):
    """Predictions translated back to the original label values."""
    labels = predict(model, X)
    if not model.label_map:
        return labels.tolist()
    return [model.label_map["+1"] if v == 1 else model.label_map["-1"] for v in labels]


def save_model(model: TwinModel, path):
    Path(path).write_text(json.dumps(model.to_json_obj(), sort_keys=True) + "\n")


def load_model(path) -> TwinModel:
    return TwinModel.from_json_obj(json.loads(Path(path).read_text()))
