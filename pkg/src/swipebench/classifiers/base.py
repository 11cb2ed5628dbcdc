"""Shared classifier machinery: specs, standardization, serialization.

All models consume a feature matrix plus an optional defined-mask. Feature
standardization is fitted per model on mask-defined training entries;
masked entries become 0 after standardization, i.e. the training mean.
Scores are always in [0, 1], higher = more genuine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import (ConfigError, DimensionMismatch,
                      SingleClassForBinarySpec, TooFewSamples)

KIND_ALIASES = {
    "svm": "svm_rbf",
    "rf": "random_forest",
    "nn": "neural_net",
    "nb": "gaussian_nb",
    "dt": "decision_tree",
    "lr": "logistic_regression",
    "oc-svm": "oc_svm_rbf",
    "ocsvm": "oc_svm_rbf",
    "oc_svm": "oc_svm_rbf",
    "if": "isolation_forest",
    "ens": "ensemble",
}

DEFAULT_PARAMS: dict[str, dict] = {
    "svm_rbf": {"C": 1.0, "gamma": "scale", "tol": 1e-3, "max_iter": 100_000,
                "platt_folds": 3},
    "random_forest": {"n_trees": 100, "max_depth": 20, "max_features": "sqrt"},
    "neural_net": {"hidden": (150, 150, 75), "dropout": 0.3, "lr": 1e-3,
                   "beta1": 0.9, "beta2": 0.999, "adam_eps": 1e-8,
                   "batch_size": 20, "epochs": 50,
                   "bn_momentum": 0.99, "bn_eps": 1e-3},
    "gaussian_nb": {"var_smoothing": 1e-9},
    "knn": {"k": 18},
    "decision_tree": {"max_depth": None},
    "logistic_regression": {"C": 1.0, "max_iter": 1000},
    "oc_svm_rbf": {"nu": 0.5, "gamma": "scale", "tol": 1e-3, "max_iter": 100_000},
    "isolation_forest": {"n_trees": 100, "subsample": 256},
    "ensemble": {"members": ("svm_rbf", "random_forest", "neural_net")},
}

ONE_CLASS_KINDS = frozenset({"oc_svm_rbf", "isolation_forest"})


def canonical_kind(kind: str) -> str:
    k = kind.strip().lower()
    k = KIND_ALIASES.get(k, k)
    if k not in DEFAULT_PARAMS:
        raise ConfigError(f"unknown classifier kind {kind!r}; "
                          f"known: {sorted(DEFAULT_PARAMS)}")
    return k


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        defaults = DEFAULT_PARAMS[self.kind]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ConfigError(
                f"unknown params for {self.kind}: {sorted(unknown)}")
        merged = dict(defaults)
        merged.update(self.params)
        object.__setattr__(self, "params", merged)
        object.__setattr__(self, "seed", int(self.seed) % 2 ** 32)

    def with_seed(self, seed: int) -> "ClassifierSpec":
        return ClassifierSpec(kind=self.kind,
                              params={k: v for k, v in self.params.items()},
                              seed=seed)

    @property
    def is_one_class(self) -> bool:
        return self.kind in ONE_CLASS_KINDS

    def as_dict(self) -> dict:
        params = {k: (list(v) if isinstance(v, tuple) else v)
                  for k, v in self.params.items()}
        return {"kind": self.kind, "params": params, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierSpec":
        params = {k: (tuple(v) if isinstance(v, list) else v)
                  for k, v in d.get("params", {}).items()}
        return cls(kind=d["kind"], params=params, seed=d.get("seed", 0))


@dataclass
class Standardizer:
    """Per-feature (x - mean) / std with stats from defined training entries.
    Zero-variance (or never-defined) columns map to 0; masked entries map to
    0 after the transform."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray, defined: np.ndarray | None = None) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        n, d = X.shape
        if defined is None:
            mean = X.mean(axis=0)
            std = X.std(axis=0)
        else:
            mean = np.zeros(d)
            std = np.zeros(d)
            for j in range(d):
                col = X[defined[:, j], j]
                if col.size:
                    mean[j] = col.mean()
                    std[j] = col.std()
        return cls(mean=mean, std=std)

    def transform(self, X: np.ndarray, defined: np.ndarray | None = None) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        safe = np.where(self.std > 0.0, self.std, 1.0)
        Z = (X - self.mean) / safe
        Z[:, self.std == 0.0] = 0.0
        if defined is not None:
            Z = np.where(defined, Z, 0.0)
        return Z

    def as_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardizer":
        return cls(mean=np.array(d["mean"], dtype=float),
                   std=np.array(d["std"], dtype=float))


class TrainedModel:
    """A fitted scorer. Subclasses implement _score_std on standardized
    features and payload (de)serialization."""

    def __init__(self, spec: ClassifierSpec, standardizer: Standardizer, n_features: int):
        self.spec = spec
        self.standardizer = standardizer
        self.n_features = n_features

    def score(self, X, defined: np.ndarray | None = None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"model expects {self.n_features} features, got {X.shape[1]}")
        Z = self.standardizer.transform(X, defined)
        s = np.asarray(self._score_std(Z), dtype=float)
        return np.clip(s, 0.0, 1.0)

    def _score_std(self, Z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _payload(self) -> dict:
        raise NotImplementedError

    @classmethod
    def _from_payload(cls, spec: ClassifierSpec, standardizer: Standardizer,
                      n_features: int, payload: dict) -> "TrainedModel":
        raise NotImplementedError


_MODEL_CLASSES: dict[str, type] = {}


def register_model(kind: str):
    def wrap(cls):
        _MODEL_CLASSES[kind] = cls
        return cls
    return wrap


def model_class(kind: str) -> type:
    return _MODEL_CLASSES[canonical_kind(kind)]


def to_blob(model: TrainedModel) -> bytes:
    doc = {
        "format": "swipebench-model",
        "version": 1,
        "spec": model.spec.as_dict(),
        "n_features": model.n_features,
        "standardizer": model.standardizer.as_dict(),
        "model": model._payload(),
    }
    return json.dumps(doc, sort_keys=True).encode()


def from_blob(blob: bytes) -> TrainedModel:
    doc = json.loads(blob.decode())
    if doc.get("format") != "swipebench-model":
        raise ConfigError("not a model blob")
    spec = ClassifierSpec.from_dict(doc["spec"])
    standardizer = Standardizer.from_dict(doc["standardizer"])
    cls = model_class(spec.kind)
    return cls._from_payload(spec, standardizer, doc["n_features"], doc["model"])


def check_training_inputs(spec: ClassifierSpec, X: np.ndarray,
                          y: np.ndarray | None) -> tuple[np.ndarray, np.ndarray | None]:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise TooFewSamples(f"training matrix must be 2-d, got shape {X.shape}")
    if X.shape[0] < 2:
        raise TooFewSamples(f"need >= 2 training rows, got {X.shape[0]}")
    if y is None:
        if not spec.is_one_class:
            raise SingleClassForBinarySpec(
                f"{spec.kind} needs labels for both classes")
        return X, None
    y = np.asarray(y).astype(int)
    if len(y) != X.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} rows but {len(y)} labels")
    if set(np.unique(y)) - {0, 1}:
        raise ValueError("labels must be 0 (impostor) or 1 (genuine)")
    if not spec.is_one_class and len(np.unique(y)) < 2:
        raise SingleClassForBinarySpec(
            f"{spec.kind} needs both classes in training data")
    return X, y


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
