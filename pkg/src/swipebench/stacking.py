"""LSTM score stacker: aggregates a window of per-swipe scores.

Single-feature input sequence, one LSTM layer (sigmoid gates, tanh cell),
dense sigmoid head on the final hidden state. Trained with Adam on binary
cross-entropy via full backpropagation through time. Parameters are
exposed as a flat vector for finite-difference gradient checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifiers.base import rng_from_seed
from .classifiers.neural import AdamState, _sigmoid, _softplus
from .errors import InconsistentSequenceLength, TooFewSamples


@dataclass(frozen=True)
class StackerSpec:
    hidden: int = 20
    epochs: int = 50
    batch_size: int = 20
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0

    def with_seed(self, seed: int) -> "StackerSpec":
        return StackerSpec(hidden=self.hidden, epochs=self.epochs,
                           batch_size=self.batch_size, lr=self.lr,
                           beta1=self.beta1, beta2=self.beta2,
                           adam_eps=self.adam_eps, seed=int(seed) % 2 ** 32)

    def as_dict(self) -> dict:
        return {"hidden": self.hidden, "epochs": self.epochs,
                "batch_size": self.batch_size, "lr": self.lr,
                "beta1": self.beta1, "beta2": self.beta2,
                "adam_eps": self.adam_eps, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "StackerSpec":
        return cls(**d)


class LstmStacker:
    """Gate order in the packed weights: input, forget, cell, output."""

    def __init__(self, hidden: int, rng: np.random.Generator | None = None):
        self.hidden = hidden
        H = hidden
        if rng is not None:
            lim_x = np.sqrt(6.0 / (1 + 4 * H))
            lim_h = np.sqrt(6.0 / (H + 4 * H))
            lim_d = np.sqrt(6.0 / (H + 1))
            self.Wx = rng.uniform(-lim_x, lim_x, size=4 * H)
            self.Wh = rng.uniform(-lim_h, lim_h, size=(H, 4 * H))
            self.w_out = rng.uniform(-lim_d, lim_d, size=H)
        else:
            self.Wx = np.zeros(4 * H)
            self.Wh = np.zeros((H, 4 * H))
            self.w_out = np.zeros(H)
        self.bias = np.zeros(4 * H)
        self.bias[H:2 * H] = 1.0   # forget gate opens by default
        self.b_out = 0.0

    # -- flat parameter vector ----------------------------------------------

    def param_vector(self) -> np.ndarray:
        return np.concatenate([self.Wx, self.Wh.ravel(), self.bias,
                               self.w_out, [self.b_out]])

    def set_param_vector(self, v: np.ndarray) -> None:
        H = self.hidden
        pos = 0
        self.Wx = v[pos:pos + 4 * H].copy(); pos += 4 * H
        self.Wh = v[pos:pos + 4 * H * H].reshape(H, 4 * H).copy(); pos += 4 * H * H
        self.bias = v[pos:pos + 4 * H].copy(); pos += 4 * H
        self.w_out = v[pos:pos + H].copy(); pos += H
        self.b_out = float(v[pos]); pos += 1
        assert pos == len(v)

    # -- forward / backward --------------------------------------------------

    def forward(self, X: np.ndarray) -> tuple[np.ndarray, list[dict]]:
        """X: (batch, T) score sequences. Returns (logits, caches)."""
        B, T = X.shape
        H = self.hidden
        h = np.zeros((B, H))
        c = np.zeros((B, H))
        caches = []
        for t in range(T):
            pre = X[:, t, None] * self.Wx[None, :] + h @ self.Wh + self.bias
            i = _sigmoid(pre[:, :H])
            f = _sigmoid(pre[:, H:2 * H])
            g = np.tanh(pre[:, 2 * H:3 * H])
            o = _sigmoid(pre[:, 3 * H:])
            c_new = f * c + i * g
            tanh_c = np.tanh(c_new)
            h_new = o * tanh_c
            caches.append({"x": X[:, t], "h_prev": h, "c_prev": c,
                           "i": i, "f": f, "g": g, "o": o,
                           "c": c_new, "tanh_c": tanh_c})
            h, c = h_new, c_new
        z = h @ self.w_out + self.b_out
        caches.append({"h_final": h})
        return z, caches

    def backward(self, caches: list[dict], z: np.ndarray, y: np.ndarray
                 ) -> np.ndarray:
        """Flat gradient of mean BCE over the batch."""
        B = len(y)
        H = self.hidden
        dz = (_sigmoid(z) - y) / B
        h_final = caches[-1]["h_final"]
        d_w_out = h_final.T @ dz
        d_b_out = float(dz.sum())
        dh = dz[:, None] * self.w_out[None, :]
        dc = np.zeros((B, H))
        dWx = np.zeros(4 * H)
        dWh = np.zeros((H, 4 * H))
        dbias = np.zeros(4 * H)
        for cache in reversed(caches[:-1]):
            i, f, g, o = cache["i"], cache["f"], cache["g"], cache["o"]
            tanh_c = cache["tanh_c"]
            do = dh * tanh_c
            dc = dc + dh * o * (1.0 - tanh_c ** 2)
            di = dc * g
            df = dc * cache["c_prev"]
            dg = dc * i
            dpre = np.concatenate([
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g ** 2),
                do * o * (1.0 - o)], axis=1)
            dWx += cache["x"] @ dpre
            dWh += cache["h_prev"].T @ dpre
            dbias += dpre.sum(axis=0)
            dh = dpre @ self.Wh.T
            dc = dc * f
        return np.concatenate([dWx, dWh.ravel(), dbias, d_w_out, [d_b_out]])

    def loss_and_grad(self, X: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
        z, caches = self.forward(X)
        loss = float(np.mean(_softplus(z) - y * z))
        return loss, self.backward(caches, z, y)

    def predict(self, X: np.ndarray) -> np.ndarray:
        z, _ = self.forward(X)
        return _sigmoid(z)

    def state_dict(self) -> dict:
        return {"hidden": self.hidden, "Wx": self.Wx.tolist(),
                "Wh": self.Wh.tolist(), "bias": self.bias.tolist(),
                "w_out": self.w_out.tolist(), "b_out": self.b_out}

    @classmethod
    def from_state(cls, state: dict) -> "LstmStacker":
        net = cls(int(state["hidden"]), rng=None)
        net.Wx = np.array(state["Wx"], dtype=float)
        net.Wh = np.array(state["Wh"], dtype=float)
        net.bias = np.array(state["bias"], dtype=float)
        net.w_out = np.array(state["w_out"], dtype=float)
        net.b_out = float(state["b_out"])
        return net


def _as_sequence_matrix(sequences) -> np.ndarray:
    if isinstance(sequences, np.ndarray) and sequences.ndim == 2:
        return np.asarray(sequences, dtype=float)
    lengths = {len(s) for s in sequences}
    if len(lengths) != 1:
        raise InconsistentSequenceLength(
            f"sequences must share one length, got {sorted(lengths)}")
    return np.array([np.asarray(s, dtype=float) for s in sequences])


def train_stacker(sequences, labels, spec: StackerSpec = StackerSpec()
                  ) -> LstmStacker:
    """Fit the stacker on score sequences with binary labels."""
    X = _as_sequence_matrix(sequences)
    y = np.asarray(labels, dtype=float)
    if len(X) != len(y):
        raise InconsistentSequenceLength(
            f"{len(X)} sequences but {len(y)} labels")
    if len(X) < 2:
        raise TooFewSamples("stacker training needs >= 2 sequences")
    rng = rng_from_seed(spec.seed)
    net = LstmStacker(spec.hidden, rng=rng)
    params_shapes = [net.param_vector()]
    adam = AdamState(params_shapes)
    vec = net.param_vector()
    n = len(y)
    for _ in range(spec.epochs):
        order = rng.permutation(n)
        for start in range(0, n, spec.batch_size):
            idx = order[start:start + spec.batch_size]
            net.set_param_vector(vec)
            _, grad = net.loss_and_grad(X[idx], y[idx])
            holder = [vec]
            adam.step(holder, [grad], spec.lr, spec.beta1, spec.beta2,
                      spec.adam_eps)
            vec = holder[0]
    net.set_param_vector(vec)
    return net


def stack_score(net: LstmStacker, sequences) -> np.ndarray:
    """Aggregated genuine-score per sequence."""
    X = _as_sequence_matrix(sequences)
    return net.predict(X)
