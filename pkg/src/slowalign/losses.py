"""Cross-entropy losses over logits, with analytic gradients.

Two variants: plain softmax cross-entropy and a logit-normalized version
that divides the logits by tau * ||H|| (Euclidean norm over all entries)
before the softmax. The normalized loss depends only on the direction of
the logit vector, so it is invariant to positive rescaling and never moves
the argmax; the gradient keeps the full dependence of the norm on every
logit (no stop-gradient).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Floor for ||H||: defines the all-zero-logits case (uniform softmax,
# loss = ln C) instead of dividing by zero.
NORM_EPS = 1e-12

DEFAULT_TAU = 0.1


@dataclass
class LossValue:
    loss: float
    grad: np.ndarray


def _softmax(h: np.ndarray) -> np.ndarray:
    shifted = h - h.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _ce_from_logits(h: np.ndarray, label_index) -> np.ndarray:
    """-log softmax(h)[label] in log-sum-exp form (no log of underflowed 0)."""
    shifted = h - h.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=-1))
    if h.ndim == 1:
        return lse - shifted[label_index]
    return lse - shifted[np.arange(h.shape[0]), label_index]


def _check_label(h: np.ndarray, label: int) -> None:
    if not 0 <= label < h.shape[-1]:
        raise IndexError(f"label {label} out of range for {h.shape[-1]} logits")


def softmax_ce(logits: np.ndarray, label: int) -> LossValue:
    """loss = -log softmax(logits)[label]; grad = softmax(logits) - onehot."""
    h = np.asarray(logits, dtype=np.float64)
    _check_label(h, label)
    p = _softmax(h)
    loss = _ce_from_logits(h, label)
    grad = p.copy()
    grad[label] -= 1.0
    return LossValue(float(loss), grad)


def logitnorm_ce(logits: np.ndarray, label: int, tau: float = DEFAULT_TAU) -> LossValue:
    """Cross-entropy on logits / (tau * ||logits||).

    The gradient flows through the norm: with s = h / (tau * n) and
    g = softmax(s) - onehot, dL/dh = g / (tau n) - (g . h) h / (tau n^3).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    h = np.asarray(logits, dtype=np.float64)
    _check_label(h, label)
    raw_norm = float(np.linalg.norm(h))
    n = max(raw_norm, NORM_EPS)
    s = h / (tau * n)
    p = _softmax(s)
    loss = _ce_from_logits(s, label)
    g = p.copy()
    g[label] -= 1.0
    grad = g / (tau * n)
    if raw_norm > NORM_EPS:
        grad -= (g @ h) * h / (tau * n**3)
    return LossValue(float(loss), grad)


def argmax_class(logits: np.ndarray) -> int:
    """Index of the maximum logit; ties go to the lowest index."""
    h = np.asarray(logits)
    if h.size == 0:
        raise ValueError("empty logits")
    return int(np.argmax(h))


def softmax_ce_batch(h: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean CE over a (n, C) batch and the gradient of that mean."""
    h = np.asarray(h, dtype=np.float64)
    labels = np.asarray(labels)
    n = h.shape[0]
    p = _softmax(h)
    rows = np.arange(n)
    loss = float(_ce_from_logits(h, labels).mean())
    grad = p
    grad[rows, labels] -= 1.0
    return loss, grad / n


def logitnorm_ce_batch(
    h: np.ndarray, labels: np.ndarray, tau: float = DEFAULT_TAU
) -> tuple[float, np.ndarray]:
    """Batched counterpart of logitnorm_ce (mean loss, gradient of mean)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    h = np.asarray(h, dtype=np.float64)
    labels = np.asarray(labels)
    n = h.shape[0]
    raw_norms = np.linalg.norm(h, axis=1, keepdims=True)
    norms = np.maximum(raw_norms, NORM_EPS)
    s = h / (tau * norms)
    p = _softmax(s)
    rows = np.arange(n)
    loss = float(_ce_from_logits(s, labels).mean())
    g = p
    g[rows, labels] -= 1.0
    grad = g / (tau * norms)
    through_norm = raw_norms[:, 0] > NORM_EPS
    gh = (g * h).sum(axis=1, keepdims=True)
    grad[through_norm] -= (gh * h / (tau * norms**3))[through_norm]
    return loss, grad / n
