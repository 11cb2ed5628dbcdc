"""Feed-forward network: per-hidden-layer batch-norm, ReLU, dropout between
hidden layers, sigmoid output, binary cross-entropy, Adam.

Weights initialize He-style uniform (+-sqrt(6/fan_in)) from the spec seed;
each epoch reshuffles with the same generator stream, so training is fully
reproducible. The parameters are exposed as one flat vector so gradients
can be checked against finite differences.
"""

from __future__ import annotations

import numpy as np

from .base import (ClassifierSpec, Standardizer, TrainedModel,
                   check_training_inputs, register_model, rng_from_seed)


def _softplus(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, z + np.log1p(np.exp(-z)), np.log1p(np.exp(z)))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-z)),
                    np.exp(z) / (1.0 + np.exp(z)))


class MlpNetwork:
    """The bare network; training state lives in the model wrapper."""

    def __init__(self, d_in: int, hidden: tuple[int, ...],
                 bn_momentum: float, bn_eps: float,
                 rng: np.random.Generator | None = None):
        self.d_in = d_in
        self.hidden = tuple(int(h) for h in hidden)
        self.bn_momentum = bn_momentum
        self.bn_eps = bn_eps
        self.layers: list[dict] = []
        fan_in = d_in
        for h in self.hidden:
            lim = np.sqrt(6.0 / fan_in)
            W = rng.uniform(-lim, lim, size=(fan_in, h)) if rng is not None \
                else np.zeros((fan_in, h))
            self.layers.append({
                "W": W, "b": np.zeros(h),
                "gamma": np.ones(h), "beta": np.zeros(h),
                "run_mean": np.zeros(h), "run_var": np.ones(h),
            })
            fan_in = h
        lim = np.sqrt(6.0 / fan_in)
        W_out = rng.uniform(-lim, lim, size=(fan_in, 1)) if rng is not None \
            else np.zeros((fan_in, 1))
        self.out = {"W": W_out, "b": np.zeros(1)}

    # -- parameter flattening (gradient checks, serialization) --------------

    def _param_refs(self) -> list[tuple[dict, str]]:
        refs = []
        for layer in self.layers:
            for key in ("W", "b", "gamma", "beta"):
                refs.append((layer, key))
        refs.append((self.out, "W"))
        refs.append((self.out, "b"))
        return refs

    def param_vector(self) -> np.ndarray:
        return np.concatenate([holder[key].ravel()
                               for holder, key in self._param_refs()])

    def set_param_vector(self, v: np.ndarray) -> None:
        pos = 0
        for holder, key in self._param_refs():
            size = holder[key].size
            holder[key] = v[pos:pos + size].reshape(holder[key].shape).copy()
            pos += size
        assert pos == len(v)

    def grads_vector(self, grads: list[dict]) -> np.ndarray:
        flat = []
        for i, layer_grads in enumerate(grads[:-1]):
            for key in ("W", "b", "gamma", "beta"):
                flat.append(layer_grads[key].ravel())
        flat.append(grads[-1]["W"].ravel())
        flat.append(grads[-1]["b"].ravel())
        return np.concatenate(flat)

    # -- forward / backward --------------------------------------------------

    def forward(self, X: np.ndarray, train: bool,
                dropout_rate: float = 0.0,
                rng: np.random.Generator | None = None,
                update_running: bool = False) -> tuple[np.ndarray, list[dict]]:
        """Returns (logits, caches). Dropout applies between hidden layers
        (not after the last one) and only when a rate and rng are given."""
        h = X
        caches = []
        last_hidden = len(self.layers) - 1
        for i, layer in enumerate(self.layers):
            a = h @ layer["W"] + layer["b"]
            if train:
                mu = a.mean(axis=0)
                var = a.var(axis=0)
                if update_running:
                    m = self.bn_momentum
                    layer["run_mean"] = m * layer["run_mean"] + (1 - m) * mu
                    layer["run_var"] = m * layer["run_var"] + (1 - m) * var
            else:
                mu = layer["run_mean"]
                var = layer["run_var"]
            inv = 1.0 / np.sqrt(var + self.bn_eps)
            xhat = (a - mu) * inv
            bn = layer["gamma"] * xhat + layer["beta"]
            relu = np.maximum(bn, 0.0)
            if train and dropout_rate > 0.0 and rng is not None and i < last_hidden:
                keep = (rng.random(relu.shape) >= dropout_rate)
                dropped = relu * keep / (1.0 - dropout_rate)
            else:
                keep = None
                dropped = relu
            caches.append({"h_in": h, "a": a, "xhat": xhat, "inv": inv,
                           "bn": bn, "keep": keep})
            h = dropped
        z = (h @ self.out["W"] + self.out["b"]).ravel()
        caches.append({"h_in": h})
        return z, caches

    def loss_from_logits(self, z: np.ndarray, y: np.ndarray) -> float:
        return float(np.mean(_softplus(z) - y * z))

    def backward(self, caches: list[dict], z: np.ndarray, y: np.ndarray,
                 dropout_rate: float = 0.0) -> list[dict]:
        """Gradients of the mean BCE loss w.r.t. every parameter, matching
        the caches of the corresponding forward(train=True) call."""
        m = len(y)
        dz = (_sigmoid(z) - y)[:, None] / m
        out_cache = caches[-1]
        grads_out = {"W": out_cache["h_in"].T @ dz, "b": dz.sum(axis=0)}
        dh = dz @ self.out["W"].T

        grads: list[dict] = []
        last_hidden = len(self.layers) - 1
        for i in range(last_hidden, -1, -1):
            layer = self.layers[i]
            cache = caches[i]
            if cache["keep"] is not None:
                dh = dh * cache["keep"] / (1.0 - dropout_rate)
            drelu = dh * (cache["bn"] > 0.0)
            dgamma = (drelu * cache["xhat"]).sum(axis=0)
            dbeta = drelu.sum(axis=0)
            dxhat = drelu * layer["gamma"]
            bm = len(cache["a"])
            da = (cache["inv"] / bm) * (
                bm * dxhat - dxhat.sum(axis=0)
                - cache["xhat"] * (dxhat * cache["xhat"]).sum(axis=0))
            grads.insert(0, {"W": cache["h_in"].T @ da, "b": da.sum(axis=0),
                             "gamma": dgamma, "beta": dbeta})
            dh = da @ layer["W"].T
        grads.append(grads_out)
        return grads

    def loss_and_grad(self, X: np.ndarray, y: np.ndarray
                      ) -> tuple[float, np.ndarray]:
        """Deterministic loss/gradient on one batch: training-mode batch
        statistics, dropout off, running stats untouched."""
        z, caches = self.forward(X, train=True)
        loss = self.loss_from_logits(z, y)
        grads = self.backward(caches, z, y)
        return loss, self.grads_vector(grads)

    def predict(self, X: np.ndarray) -> np.ndarray:
        z, _ = self.forward(X, train=False)
        return _sigmoid(z)

    # -- serialization -------------------------------------------------------

    def state_dict(self) -> dict:
        return {
            "hidden": list(self.hidden),
            "layers": [{k: layer[k].tolist()
                        for k in ("W", "b", "gamma", "beta",
                                  "run_mean", "run_var")}
                       for layer in self.layers],
            "out": {"W": self.out["W"].tolist(), "b": self.out["b"].tolist()},
        }

    @classmethod
    def from_state(cls, d_in: int, state: dict, bn_momentum: float,
                   bn_eps: float) -> "MlpNetwork":
        net = cls(d_in, tuple(state["hidden"]), bn_momentum, bn_eps, rng=None)
        for layer, saved in zip(net.layers, state["layers"]):
            for k in ("W", "b", "gamma", "beta", "run_mean", "run_var"):
                layer[k] = np.array(saved[k], dtype=float)
        net.out = {"W": np.array(state["out"]["W"], dtype=float),
                   "b": np.array(state["out"]["b"], dtype=float)}
        return net


class AdamState:
    def __init__(self, shapes: list[np.ndarray]):
        self.m = [np.zeros_like(p) for p in shapes]
        self.v = [np.zeros_like(p) for p in shapes]
        self.t = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray],
             lr: float, beta1: float, beta2: float, eps: float) -> None:
        self.t += 1
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = beta1 * self.m[i] + (1 - beta1) * g
            self.v[i] = beta2 * self.v[i] + (1 - beta2) * g * g
            mhat = self.m[i] / (1 - beta1 ** self.t)
            vhat = self.v[i] / (1 - beta2 ** self.t)
            p -= lr * mhat / (np.sqrt(vhat) + eps)


def train_mlp(net: MlpNetwork, X: np.ndarray, y: np.ndarray,
              rng: np.random.Generator, epochs: int, batch_size: int,
              dropout: float, lr: float, beta1: float, beta2: float,
              adam_eps: float) -> None:
    refs = net._param_refs()
    params = [holder[key] for holder, key in refs]
    adam = AdamState(params)
    n = len(y)
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            z, caches = net.forward(X[idx], train=True, dropout_rate=dropout,
                                    rng=rng, update_running=True)
            grads = net.backward(caches, z, y[idx], dropout_rate=dropout)
            flat = []
            for layer_grads in grads[:-1]:
                flat.extend([layer_grads["W"], layer_grads["b"],
                             layer_grads["gamma"], layer_grads["beta"]])
            flat.extend([grads[-1]["W"], grads[-1]["b"]])
            adam.step(params, flat, lr, beta1, beta2, adam_eps)
            # Adam mutates in place; re-point the layer dicts anyway in case
            # a caller swapped arrays between steps.
            for (holder, key), p in zip(refs, params):
                holder[key] = p


@register_model("neural_net")
class NeuralNetModel(TrainedModel):
    def __init__(self, spec, standardizer, n_features, net: MlpNetwork):
        super().__init__(spec, standardizer, n_features)
        self.net = net

    @classmethod
    def train(cls, spec: ClassifierSpec, X, y, defined=None) -> "NeuralNetModel":
        X, y = check_training_inputs(spec, X, y)
        std = Standardizer.fit(X, defined)
        Z = std.transform(X, defined)
        p = spec.params
        rng = rng_from_seed(spec.seed)
        net = MlpNetwork(Z.shape[1], tuple(p["hidden"]), p["bn_momentum"],
                         p["bn_eps"], rng=rng)
        train_mlp(net, Z, y.astype(float), rng, epochs=int(p["epochs"]),
                  batch_size=int(p["batch_size"]), dropout=float(p["dropout"]),
                  lr=p["lr"], beta1=p["beta1"], beta2=p["beta2"],
                  adam_eps=p["adam_eps"])
        return cls(spec, std, X.shape[1], net)

    def _score_std(self, Z: np.ndarray) -> np.ndarray:
        return self.net.predict(Z)

    def _payload(self) -> dict:
        return {"net": self.net.state_dict()}

    @classmethod
    def _from_payload(cls, spec, standardizer, n_features, payload):
        p = spec.params
        net = MlpNetwork.from_state(n_features, payload["net"],
                                    p["bn_momentum"], p["bn_eps"])
        return cls(spec, standardizer, n_features, net)
