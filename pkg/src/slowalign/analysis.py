"""Representation diagnostics: CKA similarity and linear probing.

CKA compares two feature matrices of the same probe inputs under different
representation states; the linear-kernel variant used here is computed in
feature space (centered cross-covariance Frobenius norms), which is
algebraically identical to the Gram-matrix form but never builds an n x n
matrix. The linear probe trains a fresh classifier over all classes on
frozen features and reports test accuracy, measuring how much of the
representation's quality the continually-trained classifier leaves behind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSnapshot
from .linalg import RngState
from .losses import softmax_ce_batch
from .model import Classifier
from .optimizer import SGD, OptimizerConfig


@dataclass
class FeatureSnapshot:
    matrix: np.ndarray  # (n, d) features of a fixed probe set
    tag: str = ""

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2 or self.matrix.shape[0] < 2:
            raise ValueError("snapshot needs at least two rows of features")
        if not np.isfinite(self.matrix).all():
            raise ValueError("snapshot contains non-finite values")


def _as_matrix(snapshot) -> np.ndarray:
    if isinstance(snapshot, FeatureSnapshot):
        return snapshot.matrix
    return np.asarray(snapshot, dtype=np.float64)


def cka(x, y) -> float:
    """Linear CKA between two snapshots of the same probe inputs, in [0, 1].

    ||Yc' Xc||_F^2 / (||Xc' Xc||_F ||Yc' Yc||_F) with column-centered
    matrices; invariant to orthogonal transforms and isotropic scaling.
    """
    xm, ym = _as_matrix(x), _as_matrix(y)
    if xm.shape[0] != ym.shape[0]:
        raise ValueError(f"row counts differ: {xm.shape[0]} vs {ym.shape[0]}")
    xc = xm - xm.mean(axis=0)
    yc = ym - ym.mean(axis=0)
    x_self = np.linalg.norm(xc.T @ xc)
    y_self = np.linalg.norm(yc.T @ yc)
    if x_self == 0.0 or y_self == 0.0:
        raise DegenerateSnapshot("snapshot has zero variance; similarity undefined")
    cross = np.linalg.norm(yc.T @ xc) ** 2
    return float(cross / (x_self * y_self))


@dataclass
class ProbeConfig:
    lr: float = 0.01
    momentum: float = 0.9
    epochs: int = 50
    batch_size: int = 128


def linear_probe(
    train_features: np.ndarray,
    train_labels: np.ndarray,
    test_features: np.ndarray,
    test_labels: np.ndarray,
    config: ProbeConfig | None = None,
    rng: RngState | None = None,
) -> float:
    """Train a fresh linear classifier on frozen features; test accuracy.

    All classes are learned jointly with plain cross-entropy, no masking.
    """
    config = config or ProbeConfig()
    rng = rng or RngState(0)
    train_features = np.asarray(train_features, dtype=np.float64)
    train_labels = np.asarray(train_labels, dtype=np.int64)
    classes = sorted(int(c) for c in np.unique(train_labels))
    if len(classes) < 2:
        raise ValueError("probe needs at least two classes")

    probe = Classifier(train_features.shape[1])
    probe.extend(classes, rng.split(0))
    label_pos = np.searchsorted(probe.class_ids, train_labels)
    opt = SGD(
        groups={"cls": {"cls.weight": probe.weight, "cls.bias": probe.bias}},
        config=OptimizerConfig(
            lr_rep=config.lr,  # unused, no rep group
            lr_cls=config.lr,
            momentum=config.momentum,
            batch_size=config.batch_size,
            epochs_per_task=config.epochs,
        ),
    )
    gen = rng.split(1).generator
    n = len(train_features)
    for _ in range(config.epochs):
        order = gen.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            fb, yb = train_features[idx], label_pos[idx]
            logits = fb @ probe.weight.T + probe.bias
            _, g = softmax_ce_batch(logits, yb)
            opt.step({"cls.weight": g.T @ fb, "cls.bias": g.sum(axis=0)})

    logits = np.asarray(test_features, dtype=np.float64) @ probe.weight.T + probe.bias
    predicted = probe.class_ids[np.argmax(logits, axis=1)]
    return float(np.mean(predicted == np.asarray(test_labels)))
