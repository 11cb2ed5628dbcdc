"""Isolation forest for one-class scoring.

Standard construction: each tree isolates a subsample with uniformly random
axis-aligned splits up to depth ceil(log2(subsample)); the anomaly score is
2^(-E[path length]/c(subsample)). Genuineness = 1 - anomaly, min-max
normalized against the training rows and clamped to [0, 1].
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import TooFewSamples
from .base import (ClassifierSpec, Standardizer, TrainedModel,
                   check_training_inputs, register_model)

_EULER = 0.5772156649015329


def average_path_length(n: int) -> float:
    """c(n): expected unsuccessful-search path length in a BST of n nodes."""
    if n <= 1:
        return 0.0
    if n == 2:
        return 1.0
    h = math.log(n - 1.0) + _EULER
    return 2.0 * h - 2.0 * (n - 1.0) / n


class IsolationTree:
    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.size: list[int] = []

    def _add(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.size.append(0)
        return len(self.feature) - 1

    @classmethod
    def grow(cls, Z: np.ndarray, rng: np.random.Generator,
             depth_limit: int) -> "IsolationTree":
        tree = cls()
        root = tree._add()
        stack = [(root, np.arange(len(Z)), 0)]
        while stack:
            node, idx, depth = stack.pop()
            tree.size[node] = len(idx)
            if len(idx) <= 1 or depth >= depth_limit:
                continue
            block = Z[idx]
            lo = block.min(axis=0)
            hi = block.max(axis=0)
            usable = np.flatnonzero(hi > lo)
            if usable.size == 0:
                continue
            f = int(usable[rng.integers(len(usable))])
            thr = float(rng.uniform(lo[f], hi[f]))
            go_left = block[:, f] <= thr
            if not go_left.any() or go_left.all():
                continue
            tree.feature[node] = f
            tree.threshold[node] = thr
            left = tree._add()
            right = tree._add()
            tree.left[node] = left
            tree.right[node] = right
            stack.append((left, idx[go_left], depth + 1))
            stack.append((right, idx[~go_left], depth + 1))
        return tree

    def path_lengths(self, Z: np.ndarray) -> np.ndarray:
        out = np.empty(len(Z))
        stack = [(0, np.arange(len(Z)), 0)]
        while stack:
            node, idx, depth = stack.pop()
            if idx.size == 0:
                continue
            f = self.feature[node]
            if f < 0:
                out[idx] = depth + average_path_length(self.size[node])
            else:
                go_left = Z[idx, f] <= self.threshold[node]
                stack.append((self.left[node], idx[go_left], depth + 1))
                stack.append((self.right[node], idx[~go_left], depth + 1))
        return out

    def as_dict(self) -> dict:
        return {"feature": self.feature, "threshold": self.threshold,
                "left": self.left, "right": self.right, "size": self.size}

    @classmethod
    def from_dict(cls, d: dict) -> "IsolationTree":
        t = cls()
        t.feature = [int(v) for v in d["feature"]]
        t.threshold = [float(v) for v in d["threshold"]]
        t.left = [int(v) for v in d["left"]]
        t.right = [int(v) for v in d["right"]]
        t.size = [int(v) for v in d["size"]]
        return t


@register_model("isolation_forest")
class IsolationForestModel(TrainedModel):
    def __init__(self, spec, standardizer, n_features, trees, psi, lo, hi):
        super().__init__(spec, standardizer, n_features)
        self.trees = trees
        self.psi = psi
        self.lo = lo
        self.hi = hi

    @classmethod
    def train(cls, spec: ClassifierSpec, X, y=None, defined=None
              ) -> "IsolationForestModel":
        X, y = check_training_inputs(spec, X, y)
        if y is not None:
            keep = y == 1
            X = X[keep]
            defined = defined[keep] if defined is not None else None
        if X.shape[0] < 2:
            raise TooFewSamples("one-class training needs >= 2 genuine rows")
        std = Standardizer.fit(X, defined)
        Z = std.transform(X, defined)
        p = spec.params
        n = len(Z)
        psi = min(int(p["subsample"]), n)
        depth_limit = max(1, math.ceil(math.log2(max(psi, 2))))
        seeds = np.random.SeedSequence(spec.seed).spawn(int(p["n_trees"]))
        trees = []
        for ss in seeds:
            rng = np.random.Generator(np.random.PCG64(ss))
            sub = rng.choice(n, size=psi, replace=False)
            trees.append(IsolationTree.grow(Z[sub], rng, depth_limit))
        model = cls(spec, std, X.shape[1], trees, psi, 0.0, 1.0)
        raw = model._genuineness(Z)
        model.lo = float(raw.min())
        model.hi = float(raw.max())
        return model

    def _genuineness(self, Z: np.ndarray) -> np.ndarray:
        depths = np.zeros(len(Z))
        for tree in self.trees:
            depths += tree.path_lengths(Z)
        mean_depth = depths / len(self.trees)
        anomaly = np.power(2.0, -mean_depth / average_path_length(self.psi))
        return 1.0 - anomaly

    def _score_std(self, Z: np.ndarray) -> np.ndarray:
        raw = self._genuineness(Z)
        if self.hi == self.lo:
            return np.full(len(raw), 0.5)
        return np.clip((raw - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def _payload(self) -> dict:
        return {"trees": [t.as_dict() for t in self.trees], "psi": self.psi,
                "lo": self.lo, "hi": self.hi}

    @classmethod
    def _from_payload(cls, spec, standardizer, n_features, payload):
        return cls(spec, standardizer, n_features,
                   [IsolationTree.from_dict(t) for t in payload["trees"]],
                   int(payload["psi"]), payload["lo"], payload["hi"])
