"""Post-hoc classifier alignment on synthetic Gaussian features.

Whenever an evaluation needs a calibrated classifier, this module samples a
fixed batch of features per seen class from the stats bank, pools and
shuffles them, and fine-tunes a copy of the classifier on the pooled set.
The continual-training classifier is never mutated, and no representation
parameters or raw training data are touched: alignment operates purely in
feature space. Training uses the logit-normalized loss by default so that
only logit directions are adjusted, which curbs overconfidence; plain
cross-entropy is available for the no-normalization ablation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import RngState
from .losses import DEFAULT_TAU, logitnorm_ce_batch, softmax_ce_batch
from .model import Classifier
from .optimizer import SGD, OptimizerConfig
from .stats import DEFAULT_SAMPLES_PER_CLASS, StatsBank, sample_class_features

# rng namespaces: per-class sampling vs epoch shuffling
_SAMPLE_KEY = 0
_SHUFFLE_KEY = 1


@dataclass
class AlignConfig:
    samples_per_class: int = DEFAULT_SAMPLES_PER_CLASS
    tau: float = DEFAULT_TAU
    epochs: int = 5
    batch_size: int = 128
    lr: float = 0.01
    momentum: float = 0.9
    logit_norm: bool = True

    def __post_init__(self):
        if self.samples_per_class < 1:
            raise ValueError("samples_per_class must be >= 1")
        if self.tau <= 0 or self.lr <= 0:
            raise ValueError("tau and lr must be positive")


def draw_alignment_set(
    classifier: Classifier, bank: StatsBank, samples_per_class: int, rng: RngState
) -> tuple[np.ndarray, np.ndarray]:
    """Synthetic features and labels for every active class, pooled.

    Each class draws from its own split of the rng, so the set is
    reproducible regardless of sampling order.
    """
    class_ids = sorted(classifier.active_classes)
    missing = [c for c in class_ids if c not in bank]
    if missing:
        raise KeyError(f"stats bank missing classes: {missing}")
    feats, labels = [], []
    for cid in class_ids:
        feats.append(sample_class_features(bank.get(cid), samples_per_class, rng.split(_SAMPLE_KEY, cid)))
        labels.append(np.full(samples_per_class, cid, dtype=np.int64))
    return np.concatenate(feats, axis=0), np.concatenate(labels)


def align_classifier(
    classifier: Classifier, bank: StatsBank, config: AlignConfig, rng: RngState
) -> Classifier:
    """Return an aligned copy of the classifier; the input is not mutated.

    Features are sampled once per invocation (a fixed synthetic training
    set), then the copy is trained with SGD for the configured epochs, all
    rows trainable, warm-started from the current weights.
    """
    features, labels = draw_alignment_set(classifier, bank, config.samples_per_class, rng)
    aligned = classifier.clone()
    label_pos = np.searchsorted(aligned.class_ids, labels)

    opt = SGD(
        groups={"cls": {"cls.weight": aligned.weight, "cls.bias": aligned.bias}},
        config=OptimizerConfig(
            lr_rep=config.lr,  # unused, no rep group
            lr_cls=config.lr,
            momentum=config.momentum,
            batch_size=config.batch_size,
            epochs_per_task=config.epochs,
        ),
    )
    shuffle_gen = rng.split(_SHUFFLE_KEY).generator
    n = features.shape[0]
    for _ in range(config.epochs):
        order = shuffle_gen.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            fb, yb = features[idx], label_pos[idx]
            logits = fb @ aligned.weight.T + aligned.bias
            if config.logit_norm:
                _, g = logitnorm_ce_batch(logits, yb, config.tau)
            else:
                _, g = softmax_ce_batch(logits, yb)
            grads = {"cls.weight": g.T @ fb, "cls.bias": g.sum(axis=0)}
            opt.step(grads)
    return aligned
