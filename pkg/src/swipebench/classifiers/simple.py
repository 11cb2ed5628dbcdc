"""Gaussian naive Bayes, k-nearest-neighbours, and logistic regression."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .base import (ClassifierSpec, Standardizer, TrainedModel,
                   check_training_inputs, register_model)


@register_model("gaussian_nb")
class GaussianNbModel(TrainedModel):
    def __init__(self, spec, standardizer, n_features, theta, var, log_prior):
        super().__init__(spec, standardizer, n_features)
        self.theta = theta          # (2, d) per-class means
        self.var = var              # (2, d) smoothed variances
        self.log_prior = log_prior  # (2,)

    @classmethod
    def train(cls, spec: ClassifierSpec, X, y, defined=None) -> "GaussianNbModel":
        X, y = check_training_inputs(spec, X, y)
        std = Standardizer.fit(X, defined)
        Z = std.transform(X, defined)
        d = Z.shape[1]
        theta = np.zeros((2, d))
        var = np.zeros((2, d))
        prior = np.zeros(2)
        eps = spec.params["var_smoothing"] * float(Z.var(axis=0).max())
        for c in (0, 1):
            block = Z[y == c]
            theta[c] = block.mean(axis=0)
            var[c] = block.var(axis=0) + eps
            prior[c] = len(block) / len(y)
        var[var <= 0.0] = spec.params["var_smoothing"]
        return cls(spec, std, X.shape[1], theta, var, np.log(prior))

    def _score_std(self, Z: np.ndarray) -> np.ndarray:
        jll = np.empty((len(Z), 2))
        for c in (0, 1):
            jll[:, c] = self.log_prior[c] - 0.5 * np.sum(
                np.log(2.0 * np.pi * self.var[c])
                + (Z - self.theta[c]) ** 2 / self.var[c], axis=1)
        m = jll.max(axis=1, keepdims=True)
        p = np.exp(jll - m)
        return p[:, 1] / p.sum(axis=1)

    def _payload(self) -> dict:
        return {"theta": self.theta.tolist(), "var": self.var.tolist(),
                "log_prior": self.log_prior.tolist()}

    @classmethod
    def _from_payload(cls, spec, standardizer, n_features, payload):
        return cls(spec, standardizer, n_features,
                   np.array(payload["theta"], dtype=float),
                   np.array(payload["var"], dtype=float),
                   np.array(payload["log_prior"], dtype=float))


@register_model("knn")
class KnnModel(TrainedModel):
    """Score = genuine fraction among the k nearest training rows
    (euclidean, standardized space). k is clipped to the training size, so
    an oversized k degrades to the global genuine fraction. Distance ties
    resolve toward the lower training-row index."""

    def __init__(self, spec, standardizer, n_features, Z_train, y_train):
        super().__init__(spec, standardizer, n_features)
        self.Z_train = Z_train
        self.y_train = y_train

    @classmethod
    def train(cls, spec: ClassifierSpec, X, y, defined=None) -> "KnnModel":
        X, y = check_training_inputs(spec, X, y)
        std = Standardizer.fit(X, defined)
        return cls(spec, std, X.shape[1], std.transform(X, defined),
                   y.astype(float))

    def _score_std(self, Z: np.ndarray) -> np.ndarray:
        k = min(int(self.spec.params["k"]), len(self.y_train))
        sq = (np.sum(Z * Z, axis=1)[:, None]
              + np.sum(self.Z_train * self.Z_train, axis=1)[None, :]
              - 2.0 * Z @ self.Z_train.T)
        order = np.argsort(sq, axis=1, kind="stable")[:, :k]
        return self.y_train[order].mean(axis=1)

    def _payload(self) -> dict:
        return {"Z_train": self.Z_train.tolist(),
                "y_train": self.y_train.tolist()}

    @classmethod
    def _from_payload(cls, spec, standardizer, n_features, payload):
        return cls(spec, standardizer, n_features,
                   np.array(payload["Z_train"], dtype=float),
                   np.array(payload["y_train"], dtype=float))


@register_model("logistic_regression")
class LogisticRegressionModel(TrainedModel):
    """L2-regularized logistic regression fitted with L-BFGS:
    minimize 0.5 w'w + C * sum log(1 + exp(-z f)), intercept unpenalized."""

    def __init__(self, spec, standardizer, n_features, w, b):
        super().__init__(spec, standardizer, n_features)
        self.w = w
        self.b = b

    @classmethod
    def train(cls, spec: ClassifierSpec, X, y, defined=None
              ) -> "LogisticRegressionModel":
        X, y = check_training_inputs(spec, X, y)
        std = Standardizer.fit(X, defined)
        Z = std.transform(X, defined)
        zpm = np.where(y == 1, 1.0, -1.0)
        C = float(spec.params["C"])
        d = Z.shape[1]

        def objective(wb):
            w, b = wb[:d], wb[d]
            f = Z @ w + b
            zf = zpm * f
            # log(1 + exp(-zf)) without overflow
            loss = np.where(zf > 0, np.log1p(np.exp(-zf)),
                            -zf + np.log1p(np.exp(zf)))
            sig = 1.0 / (1.0 + np.exp(np.clip(zf, -500, 500)))
            g_f = -zpm * sig
            grad_w = w + C * (Z.T @ g_f)
            grad_b = C * g_f.sum()
            return (0.5 * w @ w + C * loss.sum(),
                    np.concatenate([grad_w, [grad_b]]))

        res = minimize(objective, np.zeros(d + 1), jac=True, method="L-BFGS-B",
                       options={"maxiter": int(spec.params["max_iter"])})
        wb = res.x
        return cls(spec, std, X.shape[1], wb[:d].copy(), float(wb[d]))

    def _score_std(self, Z: np.ndarray) -> np.ndarray:
        f = np.clip(Z @ self.w + self.b, -500, 500)
        return 1.0 / (1.0 + np.exp(-f))

    def _payload(self) -> dict:
        return {"w": self.w.tolist(), "b": self.b}

    @classmethod
    def _from_payload(cls, spec, standardizer, n_features, payload):
        return cls(spec, standardizer, n_features,
                   np.array(payload["w"], dtype=float), payload["b"])
