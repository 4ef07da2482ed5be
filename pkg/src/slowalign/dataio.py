"""Feature-dataset file format, task splits, and synthetic benchmarks.

Datasets are flat collections of (class_id, split_flag, feature vector)
records stored in the SLCF binary layout: little-endian, f32 features on
disk, promoted to f64 in memory. One file fully specifies a benchmark
because the train/test flag travels with each record.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .exceptions import BadFormat
from .linalg import RngState

MAGIC = b"SLCF"
VERSION = 1
TRAIN = 0
TEST = 1

_HEADER = struct.Struct("<4sIIQ")


@dataclass
class FeatureDataset:
    feature_dim: int
    class_ids: np.ndarray  # (n,) int64
    split_flags: np.ndarray  # (n,) uint8, 0=train 1=test
    features: np.ndarray  # (n, d) float64

    def __post_init__(self):
        n = len(self.class_ids)
        if self.features.shape != (n, self.feature_dim) or len(self.split_flags) != n:
            raise ValueError("inconsistent dataset arrays")

    @property
    def num_records(self) -> int:
        return len(self.class_ids)

    @property
    def classes(self) -> list[int]:
        return sorted(int(c) for c in np.unique(self.class_ids))

    def subset(self, class_ids, split: int) -> tuple[np.ndarray, np.ndarray]:
        """Features and labels of the given classes in one split, record order."""
        wanted = np.isin(self.class_ids, np.asarray(list(class_ids))) & (self.split_flags == split)
        return self.features[wanted], self.class_ids[wanted]


def _record_dtype(dim: int) -> np.dtype:
    return np.dtype([("class_id", "<u4"), ("split", "u1"), ("feat", "<f4", (dim,))])


def save_dataset(dataset: FeatureDataset, path) -> None:
    records = np.empty(dataset.num_records, dtype=_record_dtype(dataset.feature_dim))
    records["class_id"] = dataset.class_ids
    records["split"] = dataset.split_flags
    records["feat"] = dataset.features.astype("<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, dataset.feature_dim, dataset.num_records))
        fh.write(records.tobytes())


def load_dataset(path) -> FeatureDataset:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise BadFormat("file truncated before header")
    magic, version, dim, count = _HEADER.unpack(blob[: _HEADER.size])
    if magic != MAGIC:
        raise BadFormat(f"bad magic {magic!r}")
    if version != VERSION:
        raise BadFormat(f"unsupported version {version}")
    rec_dtype = _record_dtype(dim)
    expected = _HEADER.size + count * rec_dtype.itemsize
    if len(blob) != expected:
        raise BadFormat(f"file size {len(blob)} does not match declared {expected} bytes")
    records = np.frombuffer(blob, dtype=rec_dtype, count=count, offset=_HEADER.size)
    return FeatureDataset(
        feature_dim=dim,
        class_ids=records["class_id"].astype(np.int64),
        split_flags=records["split"].copy(),
        features=records["feat"].astype(np.float64).reshape(count, dim),
    )


@dataclass
class SplitSpec:
    tasks: list[list[int]]
    seed: int = 0

    def __post_init__(self):
        seen: set[int] = set()
        for task in self.tasks:
            overlap = seen & set(task)
            if overlap:
                raise ValueError(f"classes in more than one task: {sorted(overlap)}")
            seen |= set(task)


def make_split(classes, num_tasks: int, seed: int) -> SplitSpec:
    """Random disjoint partition of the classes into num_tasks chunks.

    The seeded permutation is chunked in order; when the class count does
    not divide evenly, earlier tasks take the extra classes.
    """
    ids = sorted(int(c) for c in classes)
    if num_tasks < 1 or num_tasks > len(ids):
        raise ValueError(f"cannot split {len(ids)} classes into {num_tasks} tasks")
    perm = RngState(seed).generator.permutation(np.asarray(ids, dtype=np.int64))
    base, rem = divmod(len(ids), num_tasks)
    tasks, start = [], 0
    for t in range(num_tasks):
        size = base + (1 if t < rem else 0)
        tasks.append([int(c) for c in perm[start : start + size]])
        start += size
    return SplitSpec(tasks=tasks, seed=seed)


# rng namespaces for gen_synthetic
_KEY_MEANS = 0
_KEY_DRAWS = 1


def gen_synthetic(
    num_classes: int,
    dim: int,
    train_per_class: int,
    test_per_class: int,
    separation: float,
    seed: int,
) -> FeatureDataset:
    """Unit-covariance Gaussian classes at separation-scaled random directions.

    When dim >= num_classes the directions are random orthonormal vectors,
    so every pair of class means sits separation * sqrt(2) apart and the
    classes become cleanly separable as separation grows. separation = 0
    collapses every class onto the same distribution.
    """
    if separation < 0:
        raise ValueError("separation must be >= 0")
    if num_classes < 1 or dim < 1 or train_per_class < 1 or test_per_class < 1:
        raise ValueError("class count, dim, and per-class sizes must be >= 1")
    rng = RngState(seed)
    gen = rng.split(_KEY_MEANS).generator
    if dim >= num_classes:
        q, _ = np.linalg.qr(gen.standard_normal((dim, num_classes)))
        directions = q.T
    else:
        v = gen.standard_normal((num_classes, dim))
        directions = v / np.linalg.norm(v, axis=1, keepdims=True)
    means = separation * directions

    per_class = train_per_class + test_per_class
    class_ids = np.repeat(np.arange(num_classes, dtype=np.int64), per_class)
    split_flags = np.tile(
        np.concatenate(
            [np.zeros(train_per_class, dtype=np.uint8), np.ones(test_per_class, dtype=np.uint8)]
        ),
        num_classes,
    )
    features = np.empty((num_classes * per_class, dim))
    for c in range(num_classes):
        draws = rng.split(_KEY_DRAWS, c).generator.standard_normal((per_class, dim))
        features[c * per_class : (c + 1) * per_class] = means[c] + draws
    return FeatureDataset(
        feature_dim=dim, class_ids=class_ids, split_flags=split_flags, features=features
    )


def gen_synthetic_pairs(
    num_pairs: int,
    dim: int,
    train_per_class: int,
    test_per_class: int,
    center_sep: float,
    pair_sep: float,
    seed: int,
) -> FeatureDataset:
    """Stress benchmark: classes come in close pairs around distant centers.

    Classes (2p, 2p+1) sit at center_sep * c_p +- pair_sep * u_p with all
    centers c_p and offsets u_p orthonormal, unit covariance draws. Telling
    a pair apart needs the small u_p contrast, so a representation that
    drifts while fitting later tasks loses exactly the structure earlier
    pairs depend on; telling pairs from each other stays easy. Requires
    dim >= 2 * num_pairs.
    """
    if dim < 2 * num_pairs:
        raise ValueError("need dim >= 2 * num_pairs for orthonormal centers and offsets")
    if center_sep < 0 or pair_sep < 0:
        raise ValueError("separations must be >= 0")
    if num_pairs < 1 or train_per_class < 1 or test_per_class < 1:
        raise ValueError("pair count and per-class sizes must be >= 1")
    rng = RngState(seed)
    q, _ = np.linalg.qr(rng.split(_KEY_MEANS).generator.standard_normal((dim, 2 * num_pairs)))
    centers, offsets = q[:, :num_pairs].T, q[:, num_pairs:].T

    num_classes = 2 * num_pairs
    per_class = train_per_class + test_per_class
    class_ids = np.repeat(np.arange(num_classes, dtype=np.int64), per_class)
    split_flags = np.tile(
        np.concatenate(
            [np.zeros(train_per_class, dtype=np.uint8), np.ones(test_per_class, dtype=np.uint8)]
        ),
        num_classes,
    )
    features = np.empty((num_classes * per_class, dim))
    for c in range(num_classes):
        p, sign = divmod(c, 2)
        mean = center_sep * centers[p] + (1.0 if sign == 0 else -1.0) * pair_sep * offsets[p]
        draws = rng.split(_KEY_DRAWS, c).generator.standard_normal((per_class, dim))
        features[c * per_class : (c + 1) * per_class] = mean + draws
    return FeatureDataset(
        feature_dim=dim, class_ids=class_ids, split_flags=split_flags, features=features
    )
