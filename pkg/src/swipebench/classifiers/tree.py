"""CART decision trees (gini splits) for the binary genuine/impostor task.

Split search is exhaustive over midpoints between distinct sorted values.
Ties resolve deterministically: candidate features are visited in ascending
index order and only strict improvements replace the incumbent, so the
lowest feature index (and within a feature the lowest threshold) wins.
Leaves predict their genuine-class fraction.
"""

from __future__ import annotations

import numpy as np

from .base import (ClassifierSpec, Standardizer, TrainedModel,
                   check_training_inputs, register_model, rng_from_seed)


class TreeArrays:
    """Flat node storage: feature == -1 marks a leaf."""

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def predict(self, Z: np.ndarray) -> np.ndarray:
        out = np.empty(len(Z))
        if not self.feature:
            out[:] = 0.5
            return out
        stack = [(0, np.arange(len(Z)))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            f = self.feature[node]
            if f < 0:
                out[idx] = self.value[node]
            else:
                go_left = Z[idx, f] <= self.threshold[node]
                stack.append((self.left[node], idx[go_left]))
                stack.append((self.right[node], idx[~go_left]))
        return out

    def as_dict(self) -> dict:
        return {"feature": self.feature, "threshold": self.threshold,
                "left": self.left, "right": self.right, "value": self.value}

    @classmethod
    def from_dict(cls, d: dict) -> "TreeArrays":
        t = cls()
        t.feature = [int(v) for v in d["feature"]]
        t.threshold = [float(v) for v in d["threshold"]]
        t.left = [int(v) for v in d["left"]]
        t.right = [int(v) for v in d["right"]]
        t.value = [float(v) for v in d["value"]]
        return t


def _best_split(Z: np.ndarray, y: np.ndarray, candidates) -> tuple[int, float] | None:
    """Lowest weighted child gini over candidate features; None when no
    feature admits a split."""
    n = len(y)
    total1 = float(y.sum())
    best_imp = np.inf
    best: tuple[int, float] | None = None
    left_n = np.arange(1, n, dtype=float)
    right_n = n - left_n
    for f in candidates:
        order = np.argsort(Z[:, f], kind="stable")
        xs = Z[order, f]
        valid = xs[1:] != xs[:-1]
        if not valid.any():
            continue
        c1 = np.cumsum(y[order])[:-1].astype(float)
        l1 = c1 / left_n
        r1 = (total1 - c1) / right_n
        gini_l = 1.0 - l1 ** 2 - (1.0 - l1) ** 2
        gini_r = 1.0 - r1 ** 2 - (1.0 - r1) ** 2
        weighted = (left_n * gini_l + right_n * gini_r) / n
        weighted[~valid] = np.inf
        k = int(np.argmin(weighted))
        if weighted[k] < best_imp:
            best_imp = float(weighted[k])
            best = (int(f), float((xs[k] + xs[k + 1]) / 2.0))
    return best


def grow_tree(Z: np.ndarray, y: np.ndarray, max_depth: int | None,
              max_features: int | None,
              rng: np.random.Generator | None) -> TreeArrays:
    d = Z.shape[1]
    tree = TreeArrays()
    root = tree.add()
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        yn = y[idx]
        mean = float(yn.mean())
        tree.value[node] = mean
        if (mean == 0.0 or mean == 1.0 or len(idx) < 2
                or (max_depth is not None and depth >= max_depth)):
            continue
        if max_features is not None and max_features < d:
            candidates = np.sort(rng.choice(d, size=max_features, replace=False))
        else:
            candidates = np.arange(d)
        found = _best_split(Z[idx], yn, candidates)
        if found is None:
            continue
        f, thr = found
        go_left = Z[idx, f] <= thr
        if not go_left.any() or go_left.all():
            continue
        tree.feature[node] = f
        tree.threshold[node] = thr
        left = tree.add()
        right = tree.add()
        tree.left[node] = left
        tree.right[node] = right
        stack.append((left, idx[go_left], depth + 1))
        stack.append((right, idx[~go_left], depth + 1))
    return tree


@register_model("decision_tree")
class DecisionTreeModel(TrainedModel):
    def __init__(self, spec, standardizer, n_features, tree: TreeArrays):
        super().__init__(spec, standardizer, n_features)
        self.tree = tree

    @classmethod
    def train(cls, spec: ClassifierSpec, X, y, defined=None) -> "DecisionTreeModel":
        X, y = check_training_inputs(spec, X, y)
        std = Standardizer.fit(X, defined)
        Z = std.transform(X, defined)
        tree = grow_tree(Z, y, spec.params["max_depth"], None, None)
        return cls(spec, std, X.shape[1], tree)

    def _score_std(self, Z: np.ndarray) -> np.ndarray:
        return self.tree.predict(Z)

    def _payload(self) -> dict:
        return {"tree": self.tree.as_dict()}

    @classmethod
    def _from_payload(cls, spec, standardizer, n_features, payload):
        return cls(spec, standardizer, n_features,
                   TreeArrays.from_dict(payload["tree"]))


@register_model("random_forest")
class RandomForestModel(TrainedModel):
    def __init__(self, spec, standardizer, n_features, trees: list[TreeArrays]):
        super().__init__(spec, standardizer, n_features)
        self.trees = trees

    @classmethod
    def train(cls, spec: ClassifierSpec, X, y, defined=None) -> "RandomForestModel":
        X, y = check_training_inputs(spec, X, y)
        std = Standardizer.fit(X, defined)
        Z = std.transform(X, defined)
        p = spec.params
        d = Z.shape[1]
        if p["max_features"] == "sqrt":
            m = max(1, int(np.sqrt(d)))
        elif p["max_features"] is None:
            m = d
        else:
            m = max(1, min(d, int(p["max_features"])))
        n = len(y)
        seeds = np.random.SeedSequence(spec.seed).spawn(int(p["n_trees"]))
        trees = []
        for ss in seeds:
            rng = np.random.Generator(np.random.PCG64(ss))
            boot = rng.integers(0, n, size=n)
            trees.append(grow_tree(Z[boot], y[boot], p["max_depth"], m, rng))
        return cls(spec, std, X.shape[1], trees)

    def _score_std(self, Z: np.ndarray) -> np.ndarray:
        acc = np.zeros(len(Z))
        for tree in self.trees:
            acc += tree.predict(Z)
        return acc / len(self.trees)

    def _payload(self) -> dict:
        return {"trees": [t.as_dict() for t in self.trees]}

    @classmethod
    def _from_payload(cls, spec, standardizer, n_features, payload):
        return cls(spec, standardizer, n_features,
                   [TreeArrays.from_dict(t) for t in payload["trees"]])


# rng_from_seed is re-exported for the isolation forest, which shares the
# per-tree seeding pattern.
__all__ = ["TreeArrays", "grow_tree", "DecisionTreeModel", "RandomForestModel",
           "rng_from_seed"]
