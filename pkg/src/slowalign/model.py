"""Network model: representation head composed with a growing linear classifier.

The head maps raw inputs (d_in) to features (d); the classifier keeps one
weight row and bias per class it has been extended with, sorted by class id,
and emits logits over exactly the classes seen so far. Parameters live in
two named groups ("rep" and "cls") so the optimizer can drive them at
different learning rates. Gradients are hand-derived numpy; backward can
restrict the loss, and therefore the classifier gradient, to a subset of
classes (the current task's), leaving every other row's gradient at zero.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .exceptions import BadFormat
from .linalg import RngState
from .losses import logitnorm_ce_batch, softmax_ce_batch

CLASSIFIER_INIT_STD = 0.02

MODEL_MAGIC = b"SLCM"
MODEL_VERSION = 1

_HEAD_KINDS = {"identity": 0, "mlp": 1}
_HEAD_NAMES = {v: k for k, v in _HEAD_KINDS.items()}


class IdentityHead:
    """Pass-through representation: features are the raw inputs."""

    kind = "identity"

    def __init__(self, dim: int):
        self.d_in = dim
        self.d_out = dim

    def params(self) -> dict[str, np.ndarray]:
        return {}

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, object]:
        return x, None

    def backward(self, cache: object, dfeat: np.ndarray) -> dict[str, np.ndarray]:
        return {}

    def clone(self) -> "IdentityHead":
        return IdentityHead(self.d_in)


class MlpHead:
    """Fully-connected head with rectifier activations between layers.

    ``layers`` linear maps: d_in -> hidden -> ... -> d_out, ReLU after every
    layer except the last. Weights use He initialization.
    """

    kind = "mlp"

    def __init__(self, d_in: int, d_out: int, hidden: int, layers: int, rng: RngState):
        if layers < 1:
            raise ValueError("mlp head needs at least one layer")
        self.d_in = d_in
        self.d_out = d_out
        self.hidden = hidden
        self.layers = layers
        sizes = [d_in] + [hidden] * (layers - 1) + [d_out]
        gen = rng.generator
        self.weights = [
            gen.standard_normal((sizes[i + 1], sizes[i])) * np.sqrt(2.0 / sizes[i])
            for i in range(layers)
        ]
        self.biases = [np.zeros(sizes[i + 1]) for i in range(layers)]

    def params(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for i in range(self.layers):
            out[f"rep.w{i}"] = self.weights[i]
            out[f"rep.b{i}"] = self.biases[i]
        return out

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        acts = [x]
        h = x
        for i in range(self.layers):
            h = h @ self.weights[i].T + self.biases[i]
            if i < self.layers - 1:
                h = np.maximum(h, 0.0)
            acts.append(h)
        return h, acts

    def backward(self, cache: list[np.ndarray], dfeat: np.ndarray) -> dict[str, np.ndarray]:
        grads: dict[str, np.ndarray] = {}
        delta = dfeat
        for i in reversed(range(self.layers)):
            grads[f"rep.w{i}"] = delta.T @ cache[i]
            grads[f"rep.b{i}"] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i]) * (cache[i] > 0)
        return grads

    def clone(self) -> "MlpHead":
        c = object.__new__(MlpHead)
        c.d_in, c.d_out = self.d_in, self.d_out
        c.hidden, c.layers = self.hidden, self.layers
        c.weights = [w.copy() for w in self.weights]
        c.biases = [b.copy() for b in self.biases]
        return c


class Classifier:
    """Linear classifier over the classes seen so far.

    Rows are kept sorted by class id; logits follow that order.
    """

    def __init__(self, feature_dim: int):
        self.feature_dim = feature_dim
        self.class_ids = np.zeros(0, dtype=np.int64)
        self.weight = np.zeros((0, feature_dim))
        self.bias = np.zeros(0)

    @property
    def num_classes(self) -> int:
        return len(self.class_ids)

    @property
    def active_classes(self) -> set[int]:
        return set(int(c) for c in self.class_ids)

    def rows_for(self, class_ids) -> np.ndarray:
        """Row indices of the given class ids; raises if any is unknown."""
        ids = np.asarray(sorted(int(c) for c in class_ids), dtype=np.int64)
        if len(self.class_ids) == 0:
            raise KeyError(f"unknown class ids: {ids.tolist()}")
        rows = np.searchsorted(self.class_ids, ids)
        rows_clipped = np.minimum(rows, len(self.class_ids) - 1)
        bad = (rows >= len(self.class_ids)) | (self.class_ids[rows_clipped] != ids)
        if bad.any():
            raise KeyError(f"unknown class ids: {ids[bad].tolist()}")
        return rows

    def extend(self, new_classes, rng: RngState) -> None:
        """Allocate rows for new classes: weights ~ N(0, 0.02^2), bias 0."""
        new_ids = sorted(int(c) for c in new_classes)
        collisions = set(new_ids) & self.active_classes
        if collisions:
            raise ValueError(f"classes already active: {sorted(collisions)}")
        if len(set(new_ids)) != len(new_ids):
            raise ValueError("duplicate class ids in extension")
        fresh_w = rng.generator.standard_normal((len(new_ids), self.feature_dim)) * CLASSIFIER_INIT_STD
        fresh_b = np.zeros(len(new_ids))
        ids = np.concatenate([self.class_ids, np.asarray(new_ids, dtype=np.int64)])
        weight = np.concatenate([self.weight, fresh_w], axis=0)
        bias = np.concatenate([self.bias, fresh_b])
        order = np.argsort(ids, kind="stable")
        self.class_ids = ids[order]
        self.weight = weight[order]
        self.bias = bias[order]

    def logits(self, features: np.ndarray) -> np.ndarray:
        return features @ self.weight.T + self.bias

    def clone(self) -> "Classifier":
        c = Classifier(self.feature_dim)
        c.class_ids = self.class_ids.copy()
        c.weight = self.weight.copy()
        c.bias = self.bias.copy()
        return c


class Model:
    """head . classifier, with named parameter groups."""

    def __init__(self, head, classifier: Classifier | None = None):
        self.head = head
        self.classifier = classifier if classifier is not None else Classifier(head.d_out)
        if self.classifier.feature_dim != head.d_out:
            raise ValueError("classifier feature dim does not match head output dim")

    @property
    def d_in(self) -> int:
        return self.head.d_in

    @property
    def feature_dim(self) -> int:
        return self.head.d_out

    @property
    def active_classes(self) -> set[int]:
        return self.classifier.active_classes

    def param_groups(self) -> dict[str, dict[str, np.ndarray]]:
        return {
            "rep": self.head.params(),
            "cls": {"cls.weight": self.classifier.weight, "cls.bias": self.classifier.bias},
        }

    def clone(self) -> "Model":
        return Model(self.head.clone(), self.classifier.clone())


@dataclass
class Gradients:
    loss: float
    by_name: dict[str, np.ndarray]


def forward(model: Model, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Features and logits for one input vector or an (n, d_in) batch."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.shape[1] != model.d_in:
        raise ValueError(f"input dim {batch.shape[1]} != model d_in {model.d_in}")
    features, _ = model.head.forward(batch)
    logits = model.classifier.logits(features)
    if single:
        return features[0], logits[0]
    return features, logits


def backward(
    model: Model,
    x: np.ndarray,
    labels,
    mask=None,
    loss_kind: str = "softmax",
    tau: float = 0.1,
) -> Gradients:
    """Mean loss over the batch and gradients for all parameters.

    The loss is computed over the logits of ``mask`` (default: all active
    classes) only; classifier rows outside the mask get exactly zero
    gradient. Labels are class ids and must belong to the mask.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    labels = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    cls = model.classifier
    if mask is None:
        mask_ids = cls.class_ids
    else:
        mask_ids = np.asarray(sorted(int(c) for c in mask), dtype=np.int64)
    rows = cls.rows_for(mask_ids)
    label_pos = np.searchsorted(mask_ids, labels)
    if (label_pos >= len(mask_ids)).any() or (mask_ids[np.minimum(label_pos, len(mask_ids) - 1)] != labels).any():
        raise ValueError("label outside the class mask")

    features, cache = model.head.forward(x)
    sub_w = cls.weight[rows]
    sub_b = cls.bias[rows]
    sub_logits = features @ sub_w.T + sub_b

    if loss_kind == "softmax":
        loss, g = softmax_ce_batch(sub_logits, label_pos)
    elif loss_kind == "logitnorm":
        loss, g = logitnorm_ce_batch(sub_logits, label_pos, tau)
    else:
        raise ValueError(f"unknown loss kind: {loss_kind}")

    dw = np.zeros_like(cls.weight)
    db = np.zeros_like(cls.bias)
    dw[rows] = g.T @ features
    db[rows] = g.sum(axis=0)
    grads = {"cls.weight": dw, "cls.bias": db}

    dfeat = g @ sub_w
    grads.update(model.head.backward(cache, dfeat))
    return Gradients(loss=loss, by_name=grads)


def extend_classifier(model: Model, new_classes, rng: RngState) -> None:
    model.classifier.extend(new_classes, rng)


def clone_classifier(model: Model) -> Classifier:
    return model.classifier.clone()


def _write_f32(parts: list[bytes], arr: np.ndarray) -> None:
    parts.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def save_model(model: Model, path) -> None:
    """Versioned binary checkpoint (magic SLCM, little-endian f32 params)."""
    head = model.head
    cls = model.classifier
    hidden = getattr(head, "hidden", 0)
    layers = getattr(head, "layers", 0)
    parts = [
        struct.pack(
            "<4sIIIIIII",
            MODEL_MAGIC,
            MODEL_VERSION,
            _HEAD_KINDS[head.kind],
            head.d_in,
            head.d_out,
            hidden,
            layers,
            cls.num_classes,
        ),
        np.ascontiguousarray(cls.class_ids, dtype="<u4").tobytes(),
    ]
    _write_f32(parts, cls.weight)
    _write_f32(parts, cls.bias)
    if head.kind == "mlp":
        for w, b in zip(head.weights, head.biases):
            _write_f32(parts, w)
            _write_f32(parts, b)
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def load_model(path) -> Model:
    with open(path, "rb") as fh:
        blob = fh.read()
    header = struct.calcsize("<4sIIIIIII")
    if len(blob) < header:
        raise BadFormat("model file truncated before header")
    magic, version, kind_code, d_in, d_out, hidden, layers, num_classes = struct.unpack(
        "<4sIIIIIII", blob[:header]
    )
    if magic != MODEL_MAGIC:
        raise BadFormat(f"bad model magic {magic!r}")
    if version != MODEL_VERSION:
        raise BadFormat(f"unsupported model version {version}")
    if kind_code not in _HEAD_NAMES:
        raise BadFormat(f"unknown head kind code {kind_code}")
    offset = header

    def take(count: int, dtype: str) -> np.ndarray:
        nonlocal offset
        nbytes = count * np.dtype(dtype).itemsize
        if offset + nbytes > len(blob):
            raise BadFormat("model file truncated")
        out = np.frombuffer(blob[offset : offset + nbytes], dtype=dtype)
        offset += nbytes
        return out

    class_ids = take(num_classes, "<u4").astype(np.int64)
    weight = take(num_classes * d_out, "<f4").astype(np.float64).reshape(num_classes, d_out)
    bias = take(num_classes, "<f4").astype(np.float64)

    if _HEAD_NAMES[kind_code] == "identity":
        if d_in != d_out:
            raise BadFormat("identity head requires d_in == d_out")
        head = IdentityHead(d_in)
    else:
        head = object.__new__(MlpHead)
        head.d_in, head.d_out, head.hidden, head.layers = d_in, d_out, hidden, layers
        sizes = [d_in] + [hidden] * (layers - 1) + [d_out]
        head.weights, head.biases = [], []
        for i in range(layers):
            head.weights.append(
                take(sizes[i + 1] * sizes[i], "<f4").astype(np.float64).reshape(sizes[i + 1], sizes[i])
            )
            head.biases.append(take(sizes[i + 1], "<f4").astype(np.float64))
    if offset != len(blob):
        raise BadFormat("trailing bytes after model payload")

    cls = Classifier(d_out)
    cls.class_ids = class_ids
    cls.weight = weight
    cls.bias = bias
    return Model(head, cls)
