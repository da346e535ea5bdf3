"""Granular-ball generation by purity-driven 2-means splitting.

A ball summarizes its member samples by their mean (center), the mean
Euclidean distance to that mean (radius) and the majority label.  Balls whose
purity falls below the threshold are split with 2-means until every ball is
pure enough or down to a single sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .dataset import Dataset
from .errors import ConvergenceError, DegenerateDataError

# exact farthest-pair search is quadratic; above this size use a double sweep
EXACT_FARTHEST_PAIR_MAX = 2048


@dataclass(frozen=True)
class GranularBall:
    center: np.ndarray
    radius: float
    label: int
    count: int
    purity: float

    def to_dict(self):
        return {"center": [float(v) for v in self.center], "radius": float(self.radius),
                "label": int(self.label), "count": int(self.count),
                "purity": float(self.purity)}


@dataclass(frozen=True)
class GranulationConfig:
    purity_threshold: float = 1.0
    min_balls: int = 2
    max_iterations: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not 0.5 < self.purity_threshold <= 1.0:
            raise ValueError("purity_threshold must lie in (0.5, 1]")
        if self.min_balls < 2:
            raise ValueError("min_balls must be at least 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass
class GranulationResult:
    balls: List[GranularBall]
    iterations: int
    membership: List[np.ndarray] = field(repr=False)

    @property
    def p(self):
        return len(self.balls)

    def _by_label(self, lab):
        return [b for b in self.balls if b.label == lab]

    def centers(self, label=None):
        balls = self.balls if label is None else self._by_label(label)
        if not balls:
            return np.empty((0, self.balls[0].center.shape[0]))
        return np.vstack([b.center for b in balls])

    def radii(self, label=None):
        balls = self.balls if label is None else self._by_label(label)
        return np.array([b.radius for b in balls], dtype=float)

    @property
    def labels(self):
        return np.array([b.label for b in self.balls], dtype=int)

    @property
    def p1(self):
        return int(np.sum(self.labels == 1))

    @property
    def p2(self):
        return int(np.sum(self.labels == -1))

    def to_json_obj(self):
        return {"p": self.p, "p1": self.p1, "p2": self.p2, "iterations": int(self.iterations),
                "balls": [b.to_dict() for b in self.balls],
                "membership": [[int(i) for i in idx] for idx in self.membership]}

    @classmethod
    def from_json_obj(cls, obj):
        balls = [GranularBall(np.array(b["center"], dtype=float), float(b["radius"]),
                              int(b["label"]), int(b["count"]), float(b["purity"]))
                 for b in obj["balls"]]
        membership = [np.array(m, dtype=np.int64) for m in obj.get("membership", [])]
        return cls(balls, int(obj.get("iterations", 0)), membership)


def purity(labels) -> float:
    """Share of the majority label, ``max(#+1, #-1) / total``."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("purity of an empty ball is undefined")
    pos = int(np.sum(labels == 1))
    return max(pos, labels.size - pos) / labels.size


def ball_summary(points, labels) -> GranularBall:
    """Center, mean-distance radius, majority label (ties go to +1)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    labels = np.asarray(labels)
    if points.shape[0] == 0:
        raise ValueError("cannot summarize an empty ball")
    center = points.mean(axis=0)
    radius = float(np.linalg.norm(points - center, axis=1).mean())
    pos = int(np.sum(labels == 1))
    label = 1 if 2 * pos >= labels.size else -1
    return GranularBall(center, radius, label, int(labels.size), purity(labels))


def _farthest_pair(points, rng):
    k = points.shape[0]
    if k <= EXACT_FARTHEST_PAIR_MAX:
        sq = np.einsum("ij,ij->i", points, points)
        best, pair = -1.0, (0, 1)
        # row blocks keep memory at O(block * k)
        block = max(1, 2**22 // max(k, 1))
        for s in range(0, k, block):
            G = sq[s:s + block, None] + sq[None, :] - 2.0 * points[s:s + block] @ points.T
            i, j = np.unravel_index(np.argmax(G), G.shape)
            if G[i, j] > best:
                best, pair = G[i, j], (s + i, j)
        i, j = pair
        return (i, j) if i < j else (j, i)
    # double sweep from a seeded start: far from start, then far from that
    start = int(rng.integers(k))
    a = int(np.argmax(np.sum((points - points[start]) ** 2, axis=1)))
    b = int(np.argmax(np.sum((points - points[a]) ** 2, axis=1)))
    return (a, b) if a < b else (b, a)


def two_means_split(points, seed=0, max_rounds=100, tol=1e-8):
    """Split ``points`` into two nonempty clusters with Lloyd's algorithm.

    Centroids start at the farthest pair of points.  Returns two sorted index
    arrays.
    """
    points = np.asarray(points, dtype=float)
    k = points.shape[0]
    if k < 2:
        raise ValueError("two_means_split needs at least two points")
    if k == 2:
        return np.array([0]), np.array([1])
    rng = np.random.default_rng(seed)
    i, j = _farthest_pair(points, rng)
    cent = points[[i, j]].copy()
    assign = np.zeros(k, dtype=np.int8)
    for _ in range(max_rounds):
        d0 = np.sum((points - cent[0]) ** 2, axis=1)
        d1 = np.sum((points - cent[1]) ** 2, axis=1)
        assign = (d1 < d0).astype(np.int8)
        for c in (0, 1):
            if not np.any(assign == c):
                # empty cluster: take the point farthest from its own centroid
                own = np.where(assign == 0, d0, d1)
                assign[int(np.argmax(own))] = c
        new = np.vstack([points[assign == 0].mean(axis=0), points[assign == 1].mean(axis=0)])
        moved = float(np.max(np.linalg.norm(new - cent, axis=1)))
        cent = new
        if moved < tol:
            break
    return np.flatnonzero(assign == 0), np.flatnonzero(assign == 1)


def _split_seed(seed, path):
    # derived from the position in the split tree, so a ball's split does not
    # depend on which other balls were split before it
    return np.random.SeedSequence(entropy=seed, spawn_key=path)


def granulate(d: Dataset, cfg: GranulationConfig = GranulationConfig()) -> GranulationResult:
    """Cover ``d`` with granular balls of purity >= ``cfg.purity_threshold``.

    Starts from one ball holding every sample and repeatedly splits impure
    balls with :func:`two_means_split`.  Singleton balls are accepted as they
    are.  If fewer than ``cfg.min_balls`` balls result, the lowest-purity ball
    with at least two members is split (and its children refined again) until
    the minimum is met.
    """
    if d.n < cfg.min_balls:
        raise DegenerateDataError(f"need at least {cfg.min_balls} samples, got {d.n}")
    X, y = d.features, d.labels

    # (member indices, tree path)
    done = []
    iterations = _refine([(np.arange(d.n), ())], done, X, y, cfg, 0)

    while len(done) < cfg.min_balls:
        cands = [(purity(y[idx]), -idx.size, path, pos) for pos, (idx, path) in enumerate(done)
                 if idx.size >= 2]
        if not cands:
            break
        pos = min(cands)[-1]
        idx, path = done.pop(pos)
        a, b = two_means_split(X[idx], _split_seed(cfg.seed, path))
        iterations += 1
        # a forced split can leave a child below the threshold
        iterations = _refine([(idx[a], path + (0,)), (idx[b], path + (1,))], done, X, y, cfg,
                             iterations)

    return _result(X, y, done, iterations)


def _refine(pending, done, X, y, cfg, iterations):
    """Split pending balls level by level until each is pure enough or a singleton."""
    while pending:
        if iterations >= cfg.max_iterations:
            partial = _result(X, y, done + pending, iterations)
            raise ConvergenceError(
                f"granulation did not finish within {cfg.max_iterations} iterations", partial)
        iterations += 1
        nxt = []
        for idx, path in pending:
            if idx.size >= 2 and purity(y[idx]) < cfg.purity_threshold:
                a, b = two_means_split(X[idx], _split_seed(cfg.seed, path))
                nxt.append((idx[a], path + (0,)))
                nxt.append((idx[b], path + (1,)))
            else:
                done.append((idx, path))
        pending = nxt
    return iterations


def _result(X, y, groups, iterations):
    # canonical order: by tree path, which is independent of processing order
    groups = sorted(groups, key=lambda g: g[1])
    balls = [ball_summary(X[idx], y[idx]) for idx, _ in groups]
    return GranulationResult(balls, iterations, [np.sort(idx) for idx, _ in groups])


def singleton_balls(d: Dataset) -> GranulationResult:
    """One radius-0 ball per sample; turns a ball-based fit into a point-based one."""
    balls = [GranularBall(x.copy(), 0.0, int(t), 1, 1.0) for x, t in zip(d.features, d.labels)]
    return GranulationResult(balls, 0, [np.array([i]) for i in range(d.n)])


def plot_balls(result: GranulationResult, X=None, y=None, ax=None):
    """Draw 2-D balls as circles (and optionally the samples)."""
    import matplotlib.pyplot as plt

    if ax is None:
        _, ax = plt.subplots(figsize=(5, 4))
    color = {1: "tab:red", -1: "tab:blue"}
    if X is not None:
        X = np.asarray(X)
        for lab in (1, -1):
            pts = X[np.asarray(y) == lab]
            ax.plot(pts[:, 0], pts[:, 1], ".", color=color[lab], markersize=3)
    theta = np.linspace(0, 2 * np.pi, 200)
    for b in result.balls:
        ax.plot(b.center[0] + b.radius * np.cos(theta), b.center[1] + b.radius * np.sin(theta),
                color=color[b.label], linewidth=0.8)
        ax.plot(b.center[0], b.center[1], "x", color=color[b.label])
    ax.set_aspect("equal", adjustable="datalim")
    return ax
