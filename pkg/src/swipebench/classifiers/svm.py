"""RBF-kernel SVMs trained by sequential minimal optimization.

The solver is the classic maximal-violating-pair scheme: pick the steepest
feasible ascent/descent pair, take the clipped Newton step on it, repeat
until the KKT gap falls below tol. The binary machine calibrates its
decision values into probabilities with a sigmoid fitted on 3-fold
cross-validated decision values; the one-class machine min-max normalizes
its decision values against the training range.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import TooFewSamples
from .base import (ClassifierSpec, Standardizer, TrainedModel,
                   check_training_inputs, register_model, rng_from_seed)


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :]
          - 2.0 * A @ B.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def gamma_value(gamma, X: np.ndarray) -> float:
    """'scale' resolves to 1 / (d * var(X)) over the training matrix."""
    if gamma == "scale":
        var = float(X.var())
        return 1.0 / (X.shape[1] * var) if var > 0.0 else 1.0
    return float(gamma)


def smo_solve_binary(K: np.ndarray, y: np.ndarray, C: float,
                     tol: float = 1e-3, max_iter: int = 100_000,
                     ) -> tuple[np.ndarray, float]:
    """Solve the C-SVC dual for labels y in {-1, +1}: minimize
    0.5 a'Qa - e'a with Q = yy' * K, subject to 0 <= a <= C, y'a = 0.
    Returns (alpha, b) with decision f(x) = sum a_i y_i K(x_i, x) + b.
    """
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)          # Q alpha - e at alpha = 0

    for _ in range(max_iter):
        neg_yg = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            break
        up_idx = np.flatnonzero(up)
        low_idx = np.flatnonzero(low)
        i = up_idx[np.argmax(neg_yg[up_idx])]
        j = low_idx[np.argmin(neg_yg[low_idx])]
        m, M = neg_yg[i], neg_yg[j]
        if m - M < tol:
            break
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 1e-12:
            quad = 1e-12
        t = (m - M) / quad
        # Box limits along the direction a_i += y_i t, a_j -= y_j t.
        t_max_i = (C - alpha[i]) if y[i] > 0 else alpha[i]
        t_max_j = alpha[j] if y[j] > 0 else (C - alpha[j])
        t = min(t, t_max_i, t_max_j)
        if t <= 0.0:
            break
        alpha[i] += y[i] * t
        alpha[j] -= y[j] * t
        grad += t * y * (K[:, i] - K[:, j])

    neg_yg = -y * grad
    free = (alpha > 1e-12) & (alpha < C - 1e-12)
    if free.any():
        b = float(np.mean(neg_yg[free]))
    else:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        hi = neg_yg[up].max() if up.any() else 0.0
        lo = neg_yg[low].min() if low.any() else 0.0
        b = float((hi + lo) / 2.0)
    return alpha, b


def fit_platt_sigmoid(decision: np.ndarray, y01: np.ndarray,
                      max_iter: int = 100) -> tuple[float, float]:
    """Fit P(genuine | f) = 1 / (1 + exp(A f + B)) by penalized maximum
    likelihood (Newton with backtracking, the standard robust recipe)."""
    prior1 = float(np.sum(y01 == 1))
    prior0 = float(np.sum(y01 == 0))
    hi_t = (prior1 + 1.0) / (prior1 + 2.0)
    lo_t = 1.0 / (prior0 + 2.0)
    t = np.where(y01 == 1, hi_t, lo_t)

    A = 0.0
    B = math.log((prior0 + 1.0) / (prior1 + 1.0))
    sigma = 1e-12
    min_step = 1e-10

    def objective(a: float, b: float) -> float:
        fApB = decision * a + b
        pos = fApB >= 0
        out = np.where(pos,
                       t * fApB + np.log1p(np.exp(-fApB)),
                       (t - 1.0) * fApB + np.log1p(np.exp(fApB)))
        return float(out.sum())

    fval = objective(A, B)
    for _ in range(max_iter):
        fApB = decision * A + B
        pos = fApB >= 0
        p = np.where(pos, np.exp(-fApB) / (1.0 + np.exp(-fApB)),
                     1.0 / (1.0 + np.exp(fApB)))
        q = 1.0 - p
        d1 = t - p
        d2 = p * q
        g1 = float(np.sum(decision * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        h11 = float(np.sum(decision * decision * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.sum(decision * d2))
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= min_step:
            newA, newB = A + step * dA, B + step * dB
            newf = objective(newA, newB)
            if newf < fval + 1e-4 * step * gd:
                A, B, fval = newA, newB, newf
                break
            step /= 2.0
        else:
            break
    return A, B


def _stratified_folds(y01: np.ndarray, n_folds: int,
                      rng: np.random.Generator) -> list[np.ndarray]:
    """Shuffled per-class round-robin assignment into n_folds folds."""
    folds: list[list[int]] = [[] for _ in range(n_folds)]
    for cls in (0, 1):
        idx = np.flatnonzero(y01 == cls)
        idx = idx[rng.permutation(len(idx))]
        for pos, row in enumerate(idx):
            folds[pos % n_folds].append(int(row))
    return [np.array(sorted(f), dtype=int) for f in folds]


@register_model("svm_rbf")
class SvmModel(TrainedModel):
    def __init__(self, spec, standardizer, n_features, sv, sv_coef, b,
                 gamma, platt_a, platt_b):
        super().__init__(spec, standardizer, n_features)
        self.sv = sv                # support vectors (standardized space)
        self.sv_coef = sv_coef      # alpha_i * y_i
        self.b = b
        self.gamma = gamma
        self.platt_a = platt_a
        self.platt_b = platt_b

    @classmethod
    def train(cls, spec: ClassifierSpec, X, y, defined=None) -> "SvmModel":
        X, y = check_training_inputs(spec, X, y)
        std = Standardizer.fit(X, defined)
        Z = std.transform(X, defined)
        p = spec.params
        gamma = gamma_value(p["gamma"], Z)
        ypm = np.where(y == 1, 1.0, -1.0)

        def decisions(train_idx, eval_idx):
            Ksub = rbf_kernel(Z[train_idx], Z[train_idx], gamma)
            a, b = smo_solve_binary(Ksub, ypm[train_idx], p["C"],
                                    tol=p["tol"], max_iter=p["max_iter"])
            coef = a * ypm[train_idx]
            Keval = rbf_kernel(Z[eval_idx], Z[train_idx], gamma)
            return Keval @ coef + b

        # Calibration decision values come from internal cross-validation so
        # the sigmoid does not see resubstitution optimism.
        rng = rng_from_seed(spec.seed)
        n_folds = int(p["platt_folds"])
        counts = np.bincount(y, minlength=2)
        all_idx = np.arange(len(y))
        if counts.min() >= n_folds:
            dec = np.empty(len(y))
            for fold in _stratified_folds(y, n_folds, rng):
                train_idx = np.setdiff1d(all_idx, fold)
                dec[fold] = decisions(train_idx, fold)
        else:
            dec = None  # too small to fold; fit on in-sample values below

        K = rbf_kernel(Z, Z, gamma)
        alpha, b = smo_solve_binary(K, ypm, p["C"], tol=p["tol"],
                                    max_iter=p["max_iter"])
        coef = alpha * ypm
        if dec is None:
            dec = K @ coef + b
        A, B = fit_platt_sigmoid(dec, y)

        keep = alpha > 1e-12
        if not keep.any():
            keep = np.ones(len(alpha), dtype=bool)
        return cls(spec, std, X.shape[1], Z[keep].copy(), coef[keep].copy(),
                   float(b), float(gamma), float(A), float(B))

    def decision_values(self, Z: np.ndarray) -> np.ndarray:
        return rbf_kernel(Z, self.sv, self.gamma) @ self.sv_coef + self.b

    def _score_std(self, Z: np.ndarray) -> np.ndarray:
        f = self.decision_values(Z)
        fApB = f * self.platt_a + self.platt_b
        return np.where(fApB >= 0,
                        np.exp(-fApB) / (1.0 + np.exp(-fApB)),
                        1.0 / (1.0 + np.exp(fApB)))

    def _payload(self) -> dict:
        return {"sv": self.sv.tolist(), "sv_coef": self.sv_coef.tolist(),
                "b": self.b, "gamma": self.gamma,
                "platt_a": self.platt_a, "platt_b": self.platt_b}

    @classmethod
    def _from_payload(cls, spec, standardizer, n_features, payload):
        return cls(spec, standardizer, n_features,
                   np.array(payload["sv"], dtype=float),
                   np.array(payload["sv_coef"], dtype=float),
                   payload["b"], payload["gamma"],
                   payload["platt_a"], payload["platt_b"])


def smo_solve_one_class(K: np.ndarray, nu: float, tol: float = 1e-3,
                        max_iter: int = 100_000) -> np.ndarray:
    """Solve the one-class dual: minimize 0.5 a'Ka subject to
    0 <= a_i <= 1/(nu n), sum a = 1."""
    n = K.shape[0]
    box = 1.0 / (nu * n)
    alpha = np.zeros(n)
    # Fill boxes from the front until the mass reaches 1.
    full = int(math.floor(nu * n))
    alpha[:full] = box
    if full < n:
        alpha[full] = 1.0 - box * full
    grad = K @ alpha

    for _ in range(max_iter):
        can_up = alpha < box - 1e-15
        can_down = alpha > 1e-15
        if not can_up.any() or not can_down.any():
            break
        up_idx = np.flatnonzero(can_up)
        down_idx = np.flatnonzero(can_down)
        i = up_idx[np.argmin(grad[up_idx])]
        j = down_idx[np.argmax(grad[down_idx])]
        if grad[j] - grad[i] < tol:
            break
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 1e-12:
            quad = 1e-12
        t = (grad[j] - grad[i]) / quad
        t = min(t, box - alpha[i], alpha[j])
        if t <= 0.0:
            break
        alpha[i] += t
        alpha[j] -= t
        grad += t * (K[:, i] - K[:, j])
    return alpha


@register_model("oc_svm_rbf")
class OneClassSvmModel(TrainedModel):
    def __init__(self, spec, standardizer, n_features, sv, sv_alpha, rho,
                 gamma, lo, hi):
        super().__init__(spec, standardizer, n_features)
        self.sv = sv
        self.sv_alpha = sv_alpha
        self.rho = rho
        self.gamma = gamma
        self.lo = lo    # training decision-value range for normalization
        self.hi = hi

    @classmethod
    def train(cls, spec: ClassifierSpec, X, y=None, defined=None) -> "OneClassSvmModel":
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
        gamma = gamma_value(p["gamma"], Z)
        K = rbf_kernel(Z, Z, gamma)
        alpha = smo_solve_one_class(K, p["nu"], tol=p["tol"],
                                    max_iter=p["max_iter"])
        g = K @ alpha
        box = 1.0 / (p["nu"] * len(alpha))
        free = (alpha > 1e-12) & (alpha < box - 1e-12)
        rho = float(np.mean(g[free])) if free.any() else float(np.mean(g[alpha > 1e-12]))

        keep = alpha > 1e-12
        dec_train = g - rho
        lo, hi = float(dec_train.min()), float(dec_train.max())
        return cls(spec, std, X.shape[1], Z[keep].copy(), alpha[keep].copy(),
                   rho, float(gamma), lo, hi)

    def decision_values(self, Z: np.ndarray) -> np.ndarray:
        return rbf_kernel(Z, self.sv, self.gamma) @ self.sv_alpha - self.rho

    def _score_std(self, Z: np.ndarray) -> np.ndarray:
        d = self.decision_values(Z)
        if self.hi == self.lo:
            return np.full(len(d), 0.5)
        return np.clip((d - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def _payload(self) -> dict:
        return {"sv": self.sv.tolist(), "sv_alpha": self.sv_alpha.tolist(),
                "rho": self.rho, "gamma": self.gamma,
                "lo": self.lo, "hi": self.hi}

    @classmethod
    def _from_payload(cls, spec, standardizer, n_features, payload):
        return cls(spec, standardizer, n_features,
                   np.array(payload["sv"], dtype=float),
                   np.array(payload["sv_alpha"], dtype=float),
                   payload["rho"], payload["gamma"],
                   payload["lo"], payload["hi"])
