import numpy as np
import pytest

from csirec import _rng


def test_uniform_below_is_uniform():
    bg = _rng.bit_generator(0, 0)
    counts = np.bincount([_rng.uniform_below(bg, 6) for _ in range(6000)], minlength=6)
    assert counts.min() > 850 and counts.max() < 1150


def test_uniform_below_many_range_and_spread():
    bg = _rng.bit_generator(1, 1)
    bounds = np.array([1, 2, 3, 7, 1000] * 2000)
    draws = _rng.uniform_below_many(bg, bounds)
    assert np.all((draws >= 0) & (draws < bounds))
    sevens = draws[bounds == 7]
    assert set(sevens.tolist()) == set(range(7))


def test_streams_reproducible():
    a = _rng.uniform_below_many(_rng.bit_generator(5, 1), np.full(50, 97))
    b = _rng.uniform_below_many(_rng.bit_generator(5, 1), np.full(50, 97))
    c = _rng.uniform_below_many(_rng.bit_generator(5, 0), np.full(50, 97))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_without_replacement():
    bg = _rng.bit_generator(3, 0)
    s = _rng.sample_without_replacement(bg, 20, 20)
    assert sorted(s.tolist()) == list(range(20))
    with pytest.raises(ValueError):
        _rng.sample_without_replacement(bg, 3, 4)


def test_bad_bounds():
    bg = _rng.bit_generator(0, 0)
    with pytest.raises(ValueError):
        _rng.uniform_below(bg, 0)
    with pytest.raises(ValueError):
        _rng.uniform_below_many(bg, np.array([3, 0]))
