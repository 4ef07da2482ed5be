import numpy as np
import pytest

from slowalign.exceptions import BadFormat
from slowalign.linalg import RngState, cholesky, sample_mvn
from slowalign.stats import (
    DEFAULT_SAMPLES_PER_CLASS,
    DIAGONAL,
    FULL,
    ClassStats,
    StatsBank,
    collect_class_stats,
    load_bank,
    sample_class_features,
    save_bank,
    stats_storage_size,
)


def test_single_feature_degenerates_to_zero_cov():
    st = collect_class_stats(np.array([[7.0, -2.0]]), class_id=0)
    assert np.array_equal(st.mean, [7.0, -2.0])
    assert np.array_equal(st.cov, np.zeros((2, 2)))
    assert st.count == 1


def test_two_features_unbiased_covariance():
    st = collect_class_stats(np.array([[1.0, 0.0], [3.0, 0.0]]), class_id=1)
    assert np.array_equal(st.mean, [2.0, 0.0])
    # unbiased: ((1-2)^2 + (3-2)^2) / (2-1) = 2
    assert np.array_equal(st.cov, [[2.0, 0.0], [0.0, 0.0]])


def test_collect_recovers_generating_moments():
    mean = np.array([1.0, -4.0, 2.5])
    cov = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, 0.2], [0.0, 0.2, 0.5]])
    draws = sample_mvn(mean, cholesky(cov), 1000, RngState(0))
    st = collect_class_stats(draws, class_id=0)
    # 4 standard errors of the mean: 4 * sigma / sqrt(1000)
    bound = 4 * np.sqrt(np.diag(cov)) / np.sqrt(1000)
    assert (np.abs(st.mean - mean) < bound).all()


def test_collect_rejects_empty_and_ragged():
    with pytest.raises(ValueError):
        collect_class_stats(np.zeros((0, 3)), class_id=0)
    with pytest.raises(ValueError):
        collect_class_stats(np.zeros(3), class_id=0)


def test_sampling_zero_cov_returns_mean():
    st = ClassStats(class_id=0, count=1, mean=np.array([2.0, 3.0]), cov=np.zeros((2, 2)), mode=FULL)
    out = sample_class_features(st, 5, RngState(1))
    assert np.array_equal(out, np.tile([2.0, 3.0], (5, 1)))


def test_default_sample_count_is_256():
    assert DEFAULT_SAMPLES_PER_CLASS == 256
    st = ClassStats(class_id=0, count=1, mean=np.zeros(2), cov=np.zeros((2, 2)), mode=FULL)
    assert sample_class_features(st, DEFAULT_SAMPLES_PER_CLASS, RngState(0)).shape == (256, 2)


@pytest.mark.parametrize("mode", [FULL, DIAGONAL])
def test_collect_sample_round_trip(mode):
    mean = np.array([0.5, -1.0, 2.0])
    cov_full = np.array([[1.5, 0.3, 0.0], [0.3, 0.8, 0.1], [0.0, 0.1, 2.0]])
    base = collect_class_stats(sample_mvn(mean, cholesky(cov_full), 4000, RngState(3)), 0, mode)
    redrawn = sample_class_features(base, 100_000, RngState(4))
    st = collect_class_stats(redrawn, 0, mode)
    scale = np.sqrt(np.diag(cov_full)) if mode == FULL else np.sqrt(base.cov)
    assert (np.abs(st.mean - base.mean) < 4 * scale / np.sqrt(100_000) + 1e-9).all()
    # covariance entries concentrate like ~sigma^2 / sqrt(n); generous 4 SE bound
    if mode == FULL:
        assert np.abs(st.cov - base.cov).max() < 0.1
    else:
        assert np.abs(st.cov - base.cov).max() < 0.1


def test_diagonal_sampling_is_per_coordinate():
    st = ClassStats(class_id=0, count=10, mean=np.zeros(2), cov=np.array([4.0, 1.0]), mode=DIAGONAL)
    out = sample_class_features(st, 100_000, RngState(5))
    var = out.var(axis=0, ddof=1)
    assert abs(var[0] - 4.0) < 0.1
    assert abs(var[1] - 1.0) < 0.1


def test_permutation_invariance():
    gen = np.random.Generator(np.random.Philox(6))
    f = gen.standard_normal((64, 5))
    a = collect_class_stats(f, 0)
    b = collect_class_stats(f[::-1].copy(), 0)
    assert np.abs(a.mean - b.mean).max() < 1e-12
    assert np.abs(a.cov - b.cov).max() < 1e-12


def test_diagonal_of_full_equals_diagonal_mode():
    gen = np.random.Generator(np.random.Philox(7))
    f = gen.standard_normal((30, 4)) * 3
    full = collect_class_stats(f, 0, FULL)
    diag = collect_class_stats(f, 0, DIAGONAL)
    assert np.array_equal(np.diag(full.cov), diag.cov)


def test_storage_size_arithmetic():
    diag_bank = StatsBank(768, DIAGONAL)
    for c in range(100):
        diag_bank.add(ClassStats(c, 1, np.zeros(768), np.zeros(768), DIAGONAL))
    assert stats_storage_size(diag_bank) == 153_600
    assert stats_storage_size(diag_bank) / 86e6 == pytest.approx(0.0018, abs=2e-4)

    small_full = StatsBank(2, FULL)
    small_full.add(ClassStats(0, 1, np.zeros(2), np.zeros((2, 2)), FULL))
    assert stats_storage_size(small_full) == 6

    small_diag = StatsBank(2, DIAGONAL)
    for c in range(3):
        small_diag.add(ClassStats(c, 1, np.zeros(2), np.zeros(2), DIAGONAL))
    assert stats_storage_size(small_diag) == 12


def test_bank_rejects_duplicates_and_mismatches():
    bank = StatsBank(3, FULL)
    bank.add(ClassStats(0, 2, np.zeros(3), np.zeros((3, 3)), FULL))
    with pytest.raises(ValueError):
        bank.add(ClassStats(0, 2, np.zeros(3), np.zeros((3, 3)), FULL))
    with pytest.raises(ValueError):
        bank.add(ClassStats(1, 2, np.zeros(3), np.zeros(3), DIAGONAL))
    with pytest.raises(ValueError):
        bank.add(ClassStats(2, 2, np.zeros(4), np.zeros((4, 4)), FULL))


@pytest.mark.parametrize("mode", [FULL, DIAGONAL])
def test_bank_serialization_round_trip(tmp_path, mode):
    gen = np.random.Generator(np.random.Philox(8))
    bank = StatsBank(4, mode)
    for c in (2, 5, 9):
        f = gen.standard_normal((12, 4))
        bank.add(collect_class_stats(f, c, mode))
    path = tmp_path / "bank.slcs"
    save_bank(bank, path)
    loaded = load_bank(path)
    assert loaded.mode == mode
    assert loaded.class_ids == [2, 5, 9]
    for c in loaded.class_ids:
        assert loaded.get(c).count == bank.get(c).count
        assert np.allclose(loaded.get(c).mean, bank.get(c).mean, atol=1e-6)
        assert np.allclose(loaded.get(c).cov, bank.get(c).cov, atol=1e-5)
    save_bank(loaded, tmp_path / "again.slcs")
    assert (tmp_path / "again.slcs").read_bytes() == path.read_bytes()


def test_bank_load_rejects_bad_files(tmp_path):
    path = tmp_path / "bad.slcs"
    path.write_bytes(b"XXXX" + b"\x00" * 32)
    with pytest.raises(BadFormat):
        load_bank(path)
    good = StatsBank(2, DIAGONAL)
    good.add(ClassStats(0, 1, np.zeros(2), np.zeros(2), DIAGONAL))
    save_bank(good, path)
    blob = path.read_bytes()
    path.write_bytes(blob[:-3])
    with pytest.raises(BadFormat):
        load_bank(path)
