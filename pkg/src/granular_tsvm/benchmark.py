"""Benchmark protocol: split, normalize, corrupt, tune, refit, score.

Each (dataset, noise level, model) cell uses a seeded 70:30 split, optional
min-max scaling fitted on the training part, label noise on the training
labels only, k-fold grid search on the training part and a final refit with the
winning hyperparameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, NoiseSpec, inject_label_noise, minmax_normalize, train_test_split
from .errors import GranularTSVMError
from .evaluation import GridSpec, ModelFamily, RankTable, accuracy, grid_search, stats_summary
from .model import predict


@dataclass(frozen=True)
class BenchmarkConfig:
    noise_levels: tuple = (0.0,)
    grid: GridSpec = GridSpec()
    folds: int = 5
    train_fraction: float = 0.7
    seed: int = 0
    jobs: int = 1
    normalize: bool = False


def prepare(d: Dataset, noise, cfg: BenchmarkConfig):
    """Split, optionally scale, and corrupt one dataset; returns (train, test)."""
    train, test = train_test_split(d, cfg.train_fraction, cfg.seed)
    if cfg.normalize:
        train, rec = minmax_normalize(train)
        test, _ = minmax_normalize(test, rec)
    if noise > 0:
        train = inject_label_noise(train, NoiseSpec(noise, cfg.seed))
    return train, test


def run_cell(train: Dataset, test: Dataset, family: ModelFamily, cfg: BenchmarkConfig) -> dict:
    """Tune on ``train``, refit, score on ``test``.

    If the refit on the full training part fails to converge, the next-best
    cell in the search ranking is tried; ``refit_rank`` records how far down
    the ranking the final model came from.
    """
    try:
        gs = grid_search(train, cfg.grid, cfg.folds, family, cfg.seed, cfg.jobs)
    except GranularTSVMError as exc:
        return {"accuracy": None, "cv_accuracy": None, "params": None, "error": str(exc)}
    ranked = sorted(((c, a) for c, a in gs.scores if a is not None),
                    key=lambda ca: (-ca[1], tuple(ca[0].values())))
    last = None
    for rank, (cell, cv_acc) in enumerate(ranked):
        try:
            model = family.fit(train, cell)
        except GranularTSVMError as exc:
            last = exc
            continue
        acc = accuracy(predict(model, test.features), test.labels)
        return {"accuracy": acc, "cv_accuracy": cv_acc, "params": cell, "refit_rank": rank}
    return {"accuracy": None, "cv_accuracy": None, "params": None, "error": str(last)}


def run_benchmark(datasets, families, cfg: BenchmarkConfig = BenchmarkConfig()) -> list:
    """Evaluate every family on every named dataset at every noise level.

    ``datasets`` is a sequence of ``(name, Dataset)``.  Rows come back in
    (dataset, noise, family) order regardless of ``cfg.jobs``.
    """
    rows = []
    for name, d in datasets:
        for noise in cfg.noise_levels:
            train, test = prepare(d, noise, cfg)
            for fam in families:
                row = {"dataset": name, "noise": noise, "model": fam.name}
                row.update(run_cell(train, test, fam, cfg))
                rows.append(row)
    return rows


def accuracy_table(rows, noise=0.0) -> RankTable:
    """Pivot benchmark rows at one noise level into a RankTable (failed cells score 0)."""
    sel = [r for r in rows if r["noise"] == noise]
    names = list(dict.fromkeys(r["dataset"] for r in sel))
    models = list(dict.fromkeys(r["model"] for r in sel))
    A = np.zeros((len(names), len(models)))
    for r in sel:
        A[names.index(r["dataset"]), models.index(r["model"])] = r["accuracy"] or 0.0
    return RankTable(A, tuple(models), tuple(names))


def summarize(rows, noise=0.0) -> dict:
    return stats_summary(accuracy_table(rows, noise))
