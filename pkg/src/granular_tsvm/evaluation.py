"""Accuracy, cross-validated grid search and rank-based model comparison."""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.stats import rankdata

from . import gbtsvm, lsgbtsvm
from .dataset import Dataset
from .errors import DegenerateDataError, GranularTSVMError
from .granulation import GranulationConfig, granulate
from .kernels import KernelSpec
from .model import TwinModel, predict
from .numerics import SolverConfig
from .tsvm import fit_tsvm

MODEL_KINDS = ("gbtsvm", "lsgbtsvm", "tsvm")


def accuracy(pred, truth) -> float:
    """Percentage of matching labels."""
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.size} predictions, {truth.size} labels")
    if truth.size == 0:
        raise ValueError("accuracy of an empty set")
    return 100.0 * float(np.mean(pred == truth))


def _predict_with(model, X):
    if isinstance(model, TwinModel):
        return predict(model, X)
    return np.asarray(model(X))


def fold_indices(n, k, seed=0):
    """Seeded assignment of ``range(n)`` to ``k`` near-equal folds."""
    if k < 2 or k > n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, k)]


def kfold_cv(train: Dataset, k, trainer, seed=0) -> float:
    """Mean held-out accuracy over ``k`` folds.

    ``trainer`` maps a training Dataset to either a TwinModel or a callable
    that labels a feature matrix.
    """
    folds = fold_indices(train.n, k, seed)
    scores = []
    for i, test_idx in enumerate(folds):
        mask = np.ones(train.n, dtype=bool)
        mask[test_idx] = False
        part = train.subset(np.flatnonzero(mask))
        if not part.has_both_classes():
            raise DegenerateDataError(f"fold {i}: training part holds a single class")
        model = trainer(part)
        held = train.subset(test_idx)
        scores.append(accuracy(_predict_with(model, held.features), held.labels))
    return float(np.mean(scores))


# -- grid search ---------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Search lattice; tied parameters share one axis (``d2 = d1``, ``d4 = d3``)."""

    d_range: tuple = tuple(10.0 ** e for e in range(-5, 6))
    sigma_range: tuple = tuple(2.0 ** e for e in range(-5, 6))
    tie_d12: bool = True
    tie_d34: bool = True

    def __post_init__(self):
        if not self.d_range or not self.sigma_range:
            raise ValueError("grid ranges must be nonempty")
        object.__setattr__(self, "d_range", tuple(float(v) for v in self.d_range))
        object.__setattr__(self, "sigma_range", tuple(float(v) for v in self.sigma_range))

    def to_dict(self):
        return {"d_range": list(self.d_range), "sigma_range": list(self.sigma_range),
                "tie_d12": self.tie_d12, "tie_d34": self.tie_d34}


@dataclass(frozen=True)
class ModelFamily:
    """A trainable model kind: which fit path, which kernel, how to granulate."""

    model: str = "gbtsvm"
    kernel: str = "linear"
    purity: float = 1.0
    min_balls: int = 2
    seed: int = 0
    solver: SolverConfig = SolverConfig()
    solver_kind: str = "sor"

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ValueError(f"model must be one of {MODEL_KINDS}")
        if self.model == "tsvm" and self.kernel != "linear":
            raise ValueError("the TSVM baseline is linear only")

    @property
    def name(self):
        return self.model if self.kernel == "linear" else f"{self.model}-{self.kernel}"

    def axes(self, grid: GridSpec):
        """Ordered (name, values) pairs spanning the lattice for this family."""
        axes = [("d1", grid.d_range)]
        if not grid.tie_d12:
            axes.append(("d2", grid.d_range))
        if self.model == "lsgbtsvm":
            axes.append(("d3", grid.d_range))
            if not grid.tie_d34:
                axes.append(("d4", grid.d_range))
        if self.kernel == "gaussian":
            axes.append(("sigma", grid.sigma_range))
        return axes

    def cells(self, grid: GridSpec):
        axes = self.axes(grid)
        return [dict(zip([a for a, _ in axes], vals))
                for vals in itertools.product(*[v for _, v in axes])]

    def full_params(self, cell):
        p = dict(cell)
        p.setdefault("d2", p["d1"])
        if self.model == "lsgbtsvm":
            p.setdefault("d3", 1.0)
            p.setdefault("d4", p["d3"])
        if self.kernel == "gaussian":
            p.setdefault("sigma", 1.0)
        return p

    def fit(self, train: Dataset, cell) -> TwinModel:
        p = self.full_params(cell)
        kernel = KernelSpec(self.kernel, p.get("sigma", 1.0))
        label_map = train.meta.get("label_map")
        if self.model == "tsvm":
            return fit_tsvm(train, gbtsvm.GBTSVMHyper(p["d1"], p["d2"], solver=self.solver))
        balls = granulate(train, GranulationConfig(self.purity, self.min_balls, seed=self.seed))
        if self.model == "gbtsvm":
            hyper = gbtsvm.GBTSVMHyper(p["d1"], p["d2"], solver=self.solver, kernel=kernel)
            return gbtsvm.fit(balls, hyper, label_map)
        hyper = lsgbtsvm.LSHyper(p["d1"], p["d2"], p["d3"], p["d4"], solver=self.solver,
                                 kernel=kernel, solver_kind=self.solver_kind, seed=self.seed)
        return lsgbtsvm.fit(balls, hyper, label_map)

    def trainer(self, cell):
        return lambda train: self.fit(train, cell)


def _cell_key(cell):
    return tuple(cell.values())


def _score_cell(args):
    train, family, cell, k, seed = args
    try:
        return kfold_cv(train, k, family.trainer(cell), seed)
    except GranularTSVMError:
        return None


@dataclass
class GridResult:
    best: dict
    cv_accuracy: float
    scores: list = field(default_factory=list)  # (cell, accuracy or None), lattice order


def grid_search(train: Dataset, grid: GridSpec, k, family: ModelFamily, seed=0, jobs=1) -> GridResult:
    """Exhaustive k-fold search; ties go to the lexicographically smallest cell.

    Cells whose fit fails (degenerate fold, solver failure) are skipped; if
    every cell fails the search raises.
    """
    cells = family.cells(grid)
    if not cells:
        raise ValueError("empty grid")
    work = [(train, family, c, k, seed) for c in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            accs = list(pool.map(_score_cell, work))
    else:
        accs = [_score_cell(w) for w in work]
    scored = [(c, a) for c, a in zip(cells, accs) if a is not None]
    if not scored:
        raise GranularTSVMError(f"all {len(cells)} grid cells failed")
    best_cell, best_acc = min(scored, key=lambda ca: (-ca[1], _cell_key(ca[0])))
    return GridResult(best_cell, best_acc, list(zip(cells, accs)))


# -- rank statistics -----------------------------------------------------------


@dataclass(frozen=True)
class RankTable:
    """Accuracies in percent, one row per dataset and one column per model."""

    accuracies: np.ndarray
    model_names: tuple
    dataset_names: tuple

    def __post_init__(self):
        A = np.asarray(self.accuracies, dtype=float)
        if A.ndim != 2 or A.shape[0] < 2 or A.shape[1] < 2:
            raise ValueError("need at least 2 datasets and 2 models")
        if np.any(A < 0) or np.any(A > 100):
            raise ValueError("accuracies must lie in [0, 100]")
        if len(self.model_names) != A.shape[1] or len(self.dataset_names) != A.shape[0]:
            raise ValueError("name lists do not match the table shape")
        object.__setattr__(self, "accuracies", A)
        object.__setattr__(self, "model_names", tuple(self.model_names))
        object.__setattr__(self, "dataset_names", tuple(self.dataset_names))

    @property
    def N(self):
        return self.accuracies.shape[0]

    @property
    def q(self):
        return self.accuracies.shape[1]


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def _table_from_rows(rows):
    header, body = rows[0], [r for r in rows[1:] if r]
    cols = [j for j in range(1, len(header)) if all(_is_number(r[j]) for r in body)]
    A = np.array([[float(r[j]) for j in cols] for r in body])
    return RankTable(A, tuple(header[j] for j in cols), tuple(r[0] for r in body))


def load_accuracy_csv(path) -> RankTable:
    """Read a table whose first column names datasets; numeric columns are models."""
    with open(path, newline="") as f:
        return _table_from_rows(list(csv.reader(f)))


def published_linear_table() -> RankTable:
    """Per-dataset linear-kernel accuracies of six models on 36 benchmark sets (0% noise)."""
    text = resources.files("granular_tsvm.data").joinpath(
        "published_linear_accuracies.csv").read_text()
    return _table_from_rows(list(csv.reader(text.splitlines())))


def average_ranks(t: RankTable) -> np.ndarray:
    """Mean rank per model; 1 is the best accuracy and ties share midranks."""
    return rankdata(-t.accuracies, axis=1).mean(axis=0)


def friedman_chi2(avg_ranks, N, q) -> float:
    """Friedman chi-square statistic from average ranks."""
    if N < 2 or q < 2:
        raise ValueError("need N >= 2 and q >= 2")
    R = np.asarray(avg_ranks, dtype=float)
    return 12.0 * N / (q * (q + 1)) * (float(np.sum(R ** 2)) - q * (q + 1) ** 2 / 4.0)


def friedman(avg_ranks, N, q):
    """Friedman chi-square and the Iman-Davenport F statistic from average ranks.

    Raises ZeroDivisionError when every dataset ranks the models identically
    (``chi2 = N(q-1)``); :func:`friedman_chi2` still gives the chi-square.
    """
    chi2 = friedman_chi2(avg_ranks, N, q)
    denom = N * (q - 1) - chi2
    if denom == 0:
        raise ZeroDivisionError("N(q-1) equals chi2_F; F_F is undefined")
    return chi2, (N - 1) * chi2 / denom


def nemenyi_cd(q, N, q_alpha=2.850) -> float:
    """Critical difference of average ranks for the Nemenyi post-hoc test."""
    return q_alpha * math.sqrt(q * (q + 1) / (6.0 * N))


def win_tie_loss(t: RankTable):
    """Pairwise counts and the sign-test threshold.

    ``counts[i, j] = [wins, ties, losses]`` of model ``i`` against model ``j``
    over the datasets.  The threshold is ``N/2 + 1.96 sqrt(N)/2``.
    """
    A = t.accuracies
    counts = np.zeros((t.q, t.q, 3), dtype=int)
    for i in range(t.q):
        for j in range(t.q):
            if i != j:
                counts[i, j] = [np.sum(A[:, i] > A[:, j]), np.sum(A[:, i] == A[:, j]),
                                np.sum(A[:, i] < A[:, j])]
    return counts, t.N / 2.0 + 1.96 * math.sqrt(t.N) / 2.0


def adjusted_wins(wins, ties) -> float:
    """Wins after sharing ties: an odd tie is dropped, the rest split evenly."""
    return wins + (ties - ties % 2) / 2.0


def stats_summary(t: RankTable, q_alpha=2.850) -> dict:
    ranks = average_ranks(t)
    try:
        chi2, ff = friedman(ranks, t.N, t.q)
    except ZeroDivisionError:
        # unanimous ranking: F_F is unbounded, reported as null
        chi2, ff = friedman_chi2(ranks, t.N, t.q), None
    counts, threshold = win_tie_loss(t)
    wtl = {}
    for i, a in enumerate(t.model_names):
        for j, b in enumerate(t.model_names):
            if i != j:
                w, ti, lo = (int(v) for v in counts[i, j])
                wtl[f"{a} vs {b}"] = {"win": w, "tie": ti, "loss": lo,
                                      "significant": adjusted_wins(w, ti) >= threshold}
    return {"models": list(t.model_names), "N": t.N, "q": t.q,
            "mean_accuracy": [float(v) for v in t.accuracies.mean(axis=0)],
            "avg_ranks": [float(v) for v in ranks], "chi2F": chi2, "FF": ff,
            "CD": nemenyi_cd(t.q, t.N, q_alpha), "q_alpha": q_alpha,
            "wtl_threshold": threshold, "wtl": wtl}
