"""Dense linear-algebra primitives and seeded multivariate Gaussian sampling.

Vectors are 1-D float64 numpy arrays, matrices are 2-D row-major float64
numpy arrays. Randomness goes through :class:`RngState`, a splittable
counter-based generator, so that per-class sampling stays reproducible no
matter in which order (or on which worker) the classes are processed.
"""

from __future__ import annotations

import numpy as np

from .exceptions import NotPositiveDefinite

# Escalation bounds for robust_cholesky, relative to trace(m)/d.
JITTER_START = 1e-6
JITTER_MAX = 1e-2


class RngState:
    """Deterministic, splittable random source.

    Wraps a Philox counter-based bit generator keyed by (seed, path).
    Drawing advances the internal stream; ``split`` derives an independent
    child stream from the key alone, so children are reproducible even if
    the parent has already been used.
    """

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(k) for k in path)
        self._gen = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(self.seed, spawn_key=self.path))
        )

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def split(self, *keys: int) -> "RngState":
        """Independent child stream for the given key path."""
        return RngState(self.seed, self.path + tuple(keys))

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, path={self.path})"


def _check_square_symmetric(m: np.ndarray, rtol: float = 1e-8) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(np.abs(m).max(), 1.0)
    if np.abs(m - m.T).max() > rtol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    return m


def cholesky(m: np.ndarray, jitter: float = 0.0) -> np.ndarray:
    """Lower-triangular L with L @ L.T == m + jitter * I.

    Raises NotPositiveDefinite if the jittered matrix cannot be factorized.
    """
    m = _check_square_symmetric(m)
    shifted = m if jitter == 0.0 else m + jitter * np.eye(m.shape[0])
    try:
        return np.linalg.cholesky(shifted)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"factorization failed at jitter={jitter:g}") from exc


def robust_cholesky(m: np.ndarray) -> np.ndarray:
    """Cholesky with jitter escalation for rank-deficient covariances.

    Tries jitter = 0 first, then JITTER_START * trace/d escalating by 10x
    up to JITTER_MAX * trace/d. A zero matrix factors to zero directly
    (the degenerate single-sample covariance). Raises NotPositiveDefinite
    once the ladder is exhausted.
    """
    m = _check_square_symmetric(m)
    d = m.shape[0]
    scale = np.trace(m) / d
    if np.count_nonzero(m) == 0:
        return np.zeros_like(m)
    ladder = [0.0]
    if scale > 0.0:
        jitter = JITTER_START * scale
        while jitter <= JITTER_MAX * scale * (1 + 1e-12):
            ladder.append(jitter)
            jitter *= 10.0
    for attempt in ladder:
        try:
            return cholesky(m, attempt)
        except NotPositiveDefinite:
            continue
    raise NotPositiveDefinite(
        f"covariance not factorizable up to jitter={JITTER_MAX * scale:g}"
    )


def sample_mvn(
    mean: np.ndarray, chol_cov: np.ndarray, count: int, rng: RngState
) -> np.ndarray:
    """Draw ``count`` samples x = mean + L @ z with z ~ N(0, I).

    Returns a (count, d) array. Deterministic given the rng state.
    """
    mean = np.asarray(mean, dtype=np.float64)
    if mean.ndim != 1:
        raise ValueError("mean must be a vector")
    d = mean.shape[0]
    if chol_cov.shape != (d, d):
        raise ValueError(f"cholesky factor shape {chol_cov.shape} does not match dim {d}")
    z = rng.generator.standard_normal((count, d))
    return mean + z @ chol_cov.T


def gaussian_scalar(rng: RngState) -> float:
    """One standard-normal draw, advancing the stream."""
    return float(rng.generator.standard_normal())
