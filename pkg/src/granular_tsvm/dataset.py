"""Binary-classification datasets: loading, preprocessing, corruption, synthesis.

Labels are always stored as ``+1`` / ``-1``.  When a dataset is read from a
file the original label values are kept in ``meta["label_map"]`` so that
predictions can be translated back.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateDataError, ParseError, SchemaError, SingleClassError

SYNTH_KINDS = ("linear-margin", "crossplane", "checkerboard")


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Labeled sample matrix with labels in {+1, -1}.

    Parameters
    ----------
    features : (n, m) array
    labels : (n,) array of +1/-1
    feature_names : optional sequence of m names
    meta : free-form metadata (label map, normalization record)
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: Optional[tuple] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise SchemaError(f"features must be 2-D, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise SchemaError(
                f"labels shape {y.shape} does not match {X.shape[0]} samples")
        if not np.all(np.isin(y, (-1, 1))):
            raise SchemaError("labels must be exactly +1 or -1")
        if not np.all(np.isfinite(X)):
            raise SchemaError("features contain non-finite values")
        names = self.feature_names
        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != X.shape[1]:
                raise SchemaError("feature_names length does not match m")
        object.__setattr__(self, "features", _readonly(X))
        object.__setattr__(self, "labels", _readonly(y.astype(np.int64)))
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    @property
    def positive(self) -> np.ndarray:
        """Rows labeled +1."""
        return self.features[self.labels == 1]

    @property
    def negative(self) -> np.ndarray:
        """Rows labeled -1."""
        return self.features[self.labels == -1]

    def has_both_classes(self) -> bool:
        return bool(np.any(self.labels == 1) and np.any(self.labels == -1))

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.features[idx], self.labels[idx], self.feature_names, self.meta)

    def with_labels(self, labels) -> "Dataset":
        return Dataset(self.features, labels, self.feature_names, self.meta)

    def raw_labels(self, labels=None):
        """Map +1/-1 labels back to the values read from file, if known."""
        labels = self.labels if labels is None else np.asarray(labels)
        lm = self.meta.get("label_map")
        if not lm:
            return labels.tolist()
        return [lm["+1"] if v == 1 else lm["-1"] for v in labels]


def require_both_classes(d: Dataset, what="dataset"):
    if d.n < 2 or not d.has_both_classes():
        raise DegenerateDataError(f"{what} must contain both classes")


# ---------------------------------------------------------------------------
# CSV I/O
# ---------------------------------------------------------------------------

def _as_number(s):
    try:
        return float(s)
    except ValueError:
        return None


def label_order(values):
    """Return ``(negative, positive)`` for two distinct raw label strings.

    Numeric comparison is used when both parse as numbers, otherwise
    lexicographic.  The greater value becomes +1.
    """
    a, b = values
    na, nb = _as_number(a), _as_number(b)
    if na is not None and nb is not None:
        greater = a if na > nb else b
    else:
        greater = a if a > b else b
    lesser = b if greater == a else a
    return lesser, greater


def load_csv(path, label_column="last", header=False, delimiter=",") -> Dataset:
    """Read a CSV file with one sample per row.

    Parameters
    ----------
    path : file path
    label_column : int index or ``"last"``
    header : whether the first row holds column names
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter) if r and any(c.strip() for c in r)]
    if header:
        if not rows:
            raise ParseError("empty file")
        head, rows = rows[0], rows[1:]
    else:
        head = None
    if not rows:
        raise ParseError("no data rows")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            line = i + 1 + int(header)
            raise ParseError(f"row {line}: expected {width} fields, found {len(r)}")
    if width < 2:
        raise ParseError("need at least one feature column and a label column")
    lc = width - 1 if label_column == "last" else int(label_column)
    if not -width <= lc < width:
        raise ParseError(f"label column {label_column} out of range")
    lc %= width
    feat_cols = [j for j in range(width) if j != lc]

    raw = [r[lc].strip() for r in rows]
    distinct = sorted(set(raw))
    if len(distinct) == 1:
        raise SingleClassError(f"label column holds a single value {distinct[0]!r}")
    if len(distinct) != 2:
        raise SchemaError(
            f"label column must hold exactly two distinct values, found {len(distinct)}")
    neg, pos = label_order(distinct)

    X = np.empty((len(rows), len(feat_cols)))
    for i, r in enumerate(rows):
        for k, j in enumerate(feat_cols):
            try:
                X[i, k] = float(r[j])
            except ValueError:
                raise ParseError(
                    f"row {i + 1 + int(header)}: non-numeric feature {r[j]!r}") from None
    if not np.all(np.isfinite(X)):
        raise ParseError("non-finite feature value")
    y = np.where(np.asarray(raw) == pos, 1, -1)
    names = [head[j] for j in feat_cols] if head else None
    meta = {"label_map": {"+1": pos, "-1": neg}, "source": str(path)}
    return Dataset(X, y, names, meta)


def save_csv(d: Dataset, path, header=False, sidecar=True):
    """Write ``d`` in the format :func:`load_csv` reads.

    Raw labels are written when a label map is known.  With ``sidecar`` the
    metadata goes to ``<path>.meta.json``.
    """
    path = Path(path)
    labels = d.raw_labels()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            names = d.feature_names or [f"x{j}" for j in range(d.m)]
            w.writerow(list(names) + ["label"])
        for row, lab in zip(d.features, labels):
            w.writerow([repr(float(v)) for v in row] + [lab])
    if sidecar:
        meta_path = path.with_name(path.name + ".meta.json")
        meta_path.write_text(json.dumps(d.meta, indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# preprocessing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinMaxRecord:
    """Per-feature minima and maxima seen at fit time."""

    mins: np.ndarray
    maxs: np.ndarray

    def apply(self, X):
        X = np.asarray(X, dtype=float)
        span = self.maxs - self.mins
        out = np.zeros_like(X, dtype=float)
        ok = span > 0
        out[..., ok] = (X[..., ok] - self.mins[ok]) / span[ok]
        return out

    def to_dict(self):
        return {"min": self.mins.tolist(), "max": self.maxs.tolist()}

    @classmethod
    def from_dict(cls, obj):
        return cls(np.asarray(obj["min"], float), np.asarray(obj["max"], float))


def minmax_normalize(d: Dataset, record: Optional[MinMaxRecord] = None):
    """Map each feature affinely onto [0, 1]; constant columns become 0.

    Pass the ``record`` from the training split to transform test data
    identically.  Returns ``(dataset, record)``.
    """
    if record is None:
        record = MinMaxRecord(d.features.min(axis=0), d.features.max(axis=0))
    meta = dict(d.meta, normalization=record.to_dict())
    return Dataset(record.apply(d.features), d.labels, d.feature_names, meta), record


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def train_test_split(d: Dataset, train_fraction=0.7, seed=0):
    """Random partition into train/test of sizes round(f*n) and the rest."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(d.n)
    k = _round_half_up(train_fraction * d.n)
    train, test = d.subset(np.sort(perm[:k])), d.subset(np.sort(perm[k:]))
    if not train.has_both_classes():
        raise DegenerateDataError("training split is missing a class")
    return train, test


# ---------------------------------------------------------------------------
# label noise
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseSpec:
    rate: float
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.rate <= 0.5:
            raise ValueError("noise rate must lie in [0, 0.5]")


def noise_indices(n, spec: NoiseSpec):
    k = _round_half_up(spec.rate * n)
    rng = np.random.default_rng(spec.seed)
    return np.sort(rng.choice(n, size=k, replace=False))


def inject_label_noise(d: Dataset, spec: NoiseSpec) -> Dataset:
    """Negate exactly round(rate*n) labels chosen without replacement."""
    idx = noise_indices(d.n, spec)
    y = np.array(d.labels)
    y[idx] = -y[idx]
    meta = dict(d.meta, noise={"rate": spec.rate, "seed": spec.seed, "flipped": idx.tolist()})
    return Dataset(d.features, y, d.feature_names, meta)


# ---------------------------------------------------------------------------
# synthetic data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynthSpec:
    """Parameters of :func:`generate_synthetic`.

    ``separation`` means the margin width for ``linear-margin``; for
    ``crossplane`` it shrinks the scatter around the two crossing segments
    (std = 0.05 / (1 + separation)); for ``checkerboard`` it is the blank gap
    around cell boundaries as a fraction of the cell width.
    """

    n: int
    m: int = 2
    kind: str = "linear-margin"
    class_balance: float = 0.5
    separation: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.m < 1:
            raise ValueError("need n >= 2 and m >= 1")
        if not 0 < self.class_balance < 1:
            raise ValueError("class_balance must lie in (0, 1)")
        if self.separation < 0:
            raise ValueError("separation must be nonnegative")
        if self.kind not in SYNTH_KINDS:
            raise ValueError(f"kind must be one of {SYNTH_KINDS}")


def _class_counts(spec):
    n_pos = min(max(_round_half_up(spec.class_balance * spec.n), 1), spec.n - 1)
    return n_pos, spec.n - n_pos


def _linear_margin(spec, rng):
    n_pos, n_neg = _class_counts(spec)
    normal = rng.standard_normal(spec.m)
    normal /= np.linalg.norm(normal)
    offset = rng.standard_normal(spec.m)
    Z = rng.standard_normal((spec.n, spec.m))
    # replace the component along the normal by a half-normal pushed past the margin
    along = Z @ normal
    Z -= np.outer(along, normal)
    t = np.abs(along) + spec.separation / 2.0
    y = np.concatenate([np.ones(n_pos, int), -np.ones(n_neg, int)])
    Z += np.outer(y * t, normal)
    return Z + offset, y


def _crossplane(spec, rng, offset=0.5):
    """Two noisy line segments of length 2 that cross off-center.

    The +1 band runs along (1, 1) and the -1 band along (1, -1); they meet at
    parameter ``+offset`` on the first and ``-offset`` on the second.  Band
    width shrinks as ``separation`` grows.
    """
    n_pos, n_neg = _class_counts(spec)
    noise = 0.05 / (1.0 + spec.separation)
    dirs = {1: np.array([1.0, 1.0]) / math.sqrt(2), -1: np.array([1.0, -1.0]) / math.sqrt(2)}
    y = np.concatenate([np.ones(n_pos, int), -np.ones(n_neg, int)])
    t = rng.uniform(-1.0, 1.0, spec.n)
    X = noise * rng.standard_normal((spec.n, spec.m))
    plane = np.stack([dirs[v] for v in y])
    # shift each band so the crossing sits at t = +offset (class +1), -offset (class -1)
    shift = np.where(y == 1, -offset, offset)
    if spec.m == 1:
        X[:, 0] += (t + shift) * plane[:, 0] * y
    else:
        X[:, :2] += (t + shift)[:, None] * plane
    return X, y


def _checkerboard(spec, rng, cells=4):
    n_pos, n_neg = _class_counts(spec)
    gap = min(spec.separation, 0.9) / 2.0
    need = {1: n_pos, -1: n_neg}
    got = {1: [], -1: []}
    dims = min(spec.m, 2)
    while need[1] > 0 or need[-1] > 0:
        P = rng.uniform(0.0, 1.0, (4 * spec.n, spec.m))
        frac = (P[:, :dims] * cells) % 1.0
        keep = np.all((frac >= gap) & (frac <= 1.0 - gap), axis=1)
        P = P[keep]
        parity = np.floor(P[:, :dims] * cells).astype(int).sum(axis=1) % 2
        lab = np.where(parity == 0, 1, -1)
        for v in (1, -1):
            take = P[lab == v][: need[v]]
            got[v].append(take)
            need[v] -= len(take)
    X = np.vstack(got[1] + got[-1])
    y = np.concatenate([np.ones(n_pos, int), -np.ones(n_neg, int)])
    return X, y


def generate_synthetic(spec: SynthSpec) -> Dataset:
    """Draw a seeded synthetic binary dataset of the requested kind."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "linear-margin":
        X, y = _linear_margin(spec, rng)
    elif spec.kind == "crossplane":
        X, y = _crossplane(spec, rng)
    else:
        X, y = _checkerboard(spec, rng)
    perm = rng.permutation(spec.n)
    meta = {"synthetic": {"kind": spec.kind, "n": spec.n, "m": spec.m,
                          "class_balance": spec.class_balance,
                          "separation": spec.separation, "seed": spec.seed}}
    return Dataset(X[perm], y[perm], None, meta)


def concat(datasets: Sequence[Dataset]) -> Dataset:
    X = np.vstack([d.features for d in datasets])
    y = np.concatenate([d.labels for d in datasets])
    return Dataset(X, y, datasets[0].feature_names, datasets[0].meta)
