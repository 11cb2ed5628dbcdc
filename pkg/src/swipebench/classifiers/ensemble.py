"""Probability-averaging ensemble of the SVM, random forest, and network.

The combined score is the exact arithmetic mean of the member scores,
accumulated in member-list order: ((s_svm + s_rf) + s_nn) / 3.
"""

from __future__ import annotations

import json

import numpy as np

from .base import (ClassifierSpec, Standardizer, TrainedModel,
                   check_training_inputs, from_blob, register_model, to_blob)


def member_specs(spec: ClassifierSpec) -> list[ClassifierSpec]:
    """Default member specs with seeds derived from the ensemble seed."""
    members = spec.params["members"]
    children = np.random.SeedSequence(spec.seed).spawn(len(members))
    return [ClassifierSpec(kind=kind, seed=int(child.generate_state(1)[0]))
            for kind, child in zip(members, children)]


@register_model("ensemble")
class EnsembleModel(TrainedModel):
    def __init__(self, spec, n_features, models: list[TrainedModel]):
        super().__init__(spec, Standardizer(mean=np.zeros(n_features),
                                            std=np.ones(n_features)),
                         n_features)
        self.models = models

    @classmethod
    def train(cls, spec: ClassifierSpec, X, y, defined=None) -> "EnsembleModel":
        from . import train as train_any
        X, y = check_training_inputs(spec, X, y)
        models = [train_any(ms, X, y, defined=defined)
                  for ms in member_specs(spec)]
        return cls(spec, X.shape[1], models)

    def score(self, X, defined=None) -> np.ndarray:
        # Members own their standardization; masks must reach them raw.
        acc = self.models[0].score(X, defined)
        for model in self.models[1:]:
            acc = acc + model.score(X, defined)
        return acc / len(self.models)

    def _payload(self) -> dict:
        return {"members": [json.loads(to_blob(m).decode()) for m in self.models]}

    @classmethod
    def _from_payload(cls, spec, standardizer, n_features, payload):
        models = [from_blob(json.dumps(doc, sort_keys=True).encode())
                  for doc in payload["members"]]
        return cls(spec, n_features, models)
