"""Per-class Gaussian feature statistics and their persistence.

After a task finishes training, the features of each new class are reduced
to a mean and an unbiased sample covariance (full d x d matrix, or just its
diagonal in the lightweight variant). A StatsBank holds one entry per seen
class and replaces stored exemplars: alignment later redraws synthetic
features from these Gaussians. Old entries are never refreshed when the
representation drifts; keeping that drift small is the slow learner's job.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .exceptions import BadFormat
from .linalg import RngState, robust_cholesky, sample_mvn

FULL = "full"
DIAGONAL = "diagonal"

DEFAULT_SAMPLES_PER_CLASS = 256

BANK_MAGIC = b"SLCS"
BANK_VERSION = 1
_MODE_CODES = {FULL: 0, DIAGONAL: 1}
_MODE_NAMES = {v: k for k, v in _MODE_CODES.items()}


@dataclass
class ClassStats:
    class_id: int
    count: int
    mean: np.ndarray
    cov: np.ndarray  # (d, d) in full mode, (d,) variances in diagonal mode
    mode: str

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def collect_class_stats(features: np.ndarray, class_id: int, mode: str = FULL) -> ClassStats:
    """Mean and unbiased covariance (divisor N-1) of one class's features.

    A single feature yields a zero covariance. Rows are reduced in array
    order, so the result is deterministic for a given input ordering.
    """
    if mode not in (FULL, DIAGONAL):
        raise ValueError(f"unknown covariance mode: {mode}")
    f = np.asarray(features, dtype=np.float64)
    if f.ndim != 2 or f.shape[0] < 1:
        raise ValueError("need a non-empty (n, d) feature batch")
    n, d = f.shape
    mean = f.mean(axis=0)
    if n == 1:
        cov = np.zeros((d, d))
    else:
        centered = f - mean
        cov = centered.T @ centered / (n - 1)
    if mode == DIAGONAL:
        cov = np.diag(cov).copy()
    return ClassStats(class_id=int(class_id), count=n, mean=mean, cov=cov, mode=mode)


def sample_class_features(stats: ClassStats, s_c: int, rng: RngState) -> np.ndarray:
    """Draw s_c synthetic features from N(mean, cov); (s_c, d) array.

    Full covariances go through Cholesky with jitter escalation; diagonal
    ones scale independent normals per coordinate.
    """
    if s_c < 1:
        raise ValueError("need at least one sample")
    if stats.mode == FULL:
        chol = robust_cholesky(stats.cov)
        return sample_mvn(stats.mean, chol, s_c, rng)
    std = np.sqrt(np.maximum(stats.cov, 0.0))
    z = rng.generator.standard_normal((s_c, stats.dim))
    return stats.mean + z * std


class StatsBank:
    """Map of class id -> ClassStats with a uniform dim and covariance mode."""

    def __init__(self, feature_dim: int, mode: str = FULL):
        if mode not in (FULL, DIAGONAL):
            raise ValueError(f"unknown covariance mode: {mode}")
        self.feature_dim = feature_dim
        self.mode = mode
        self._by_class: dict[int, ClassStats] = {}

    def add(self, stats: ClassStats) -> None:
        if stats.mode != self.mode:
            raise ValueError(f"bank mode {self.mode} != stats mode {stats.mode}")
        if stats.dim != self.feature_dim:
            raise ValueError(f"bank dim {self.feature_dim} != stats dim {stats.dim}")
        if stats.class_id in self._by_class:
            raise ValueError(f"class {stats.class_id} already banked")
        self._by_class[stats.class_id] = stats

    def get(self, class_id: int) -> ClassStats:
        return self._by_class[class_id]

    @property
    def class_ids(self) -> list[int]:
        return sorted(self._by_class)

    def __len__(self) -> int:
        return len(self._by_class)

    def __contains__(self, class_id: int) -> bool:
        return class_id in self._by_class


def stats_storage_size(bank: StatsBank) -> int:
    """Number of scalars the bank persists (means plus covariances)."""
    d = bank.feature_dim
    n = len(bank)
    per_class = 2 * d if bank.mode == DIAGONAL else d + d * d
    return per_class * n


def save_bank(bank: StatsBank, path) -> None:
    """Versioned binary layout: magic SLCS, mode flag, little-endian f32."""
    parts = [
        struct.pack(
            "<4sIBII",
            BANK_MAGIC,
            BANK_VERSION,
            _MODE_CODES[bank.mode],
            bank.feature_dim,
            len(bank),
        )
    ]
    for cid in bank.class_ids:
        st = bank.get(cid)
        parts.append(struct.pack("<IQ", cid, st.count))
        parts.append(np.ascontiguousarray(st.mean, dtype="<f4").tobytes())
        parts.append(np.ascontiguousarray(st.cov, dtype="<f4").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def load_bank(path) -> StatsBank:
    with open(path, "rb") as fh:
        blob = fh.read()
    head_fmt = "<4sIBII"
    head_size = struct.calcsize(head_fmt)
    if len(blob) < head_size:
        raise BadFormat("stats file truncated before header")
    magic, version, mode_code, dim, num_classes = struct.unpack(head_fmt, blob[:head_size])
    if magic != BANK_MAGIC:
        raise BadFormat(f"bad stats magic {magic!r}")
    if version != BANK_VERSION:
        raise BadFormat(f"unsupported stats version {version}")
    if mode_code not in _MODE_NAMES:
        raise BadFormat(f"unknown covariance mode code {mode_code}")
    mode = _MODE_NAMES[mode_code]
    cov_len = dim if mode == DIAGONAL else dim * dim
    rec_size = struct.calcsize("<IQ") + 4 * (dim + cov_len)
    if len(blob) != head_size + num_classes * rec_size:
        raise BadFormat("stats file size does not match header")
    bank = StatsBank(dim, mode)
    offset = head_size
    for _ in range(num_classes):
        cid, count = struct.unpack_from("<IQ", blob, offset)
        offset += struct.calcsize("<IQ")
        mean = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset).astype(np.float64)
        offset += 4 * dim
        cov = np.frombuffer(blob, dtype="<f4", count=cov_len, offset=offset).astype(np.float64)
        offset += 4 * cov_len
        if mode == FULL:
            cov = cov.reshape(dim, dim)
        bank.add(ClassStats(class_id=cid, count=count, mean=mean, cov=cov, mode=mode))
    return bank
