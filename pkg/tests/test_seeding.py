import numpy as np

from ttptw import child_rng


def test_same_tags_same_stream():
    a = child_rng(7, "mutation").integers(0, 1 << 30, size=8)
    b = child_rng(7, "mutation").integers(0, 1 << 30, size=8)
    np.testing.assert_array_equal(a, b)


def test_different_tags_different_streams():
    draws = {
        tag: tuple(child_rng(7, tag).integers(0, 1 << 30, size=4))
        for tag in ("mutation", "o1", "o2", "baseline", "tour")
    }
    assert len(set(draws.values())) == len(draws)


def test_different_seeds_differ():
    a = child_rng(1, "o1").integers(0, 1 << 30, size=4)
    b = child_rng(2, "o1").integers(0, 1 << 30, size=4)
    assert not np.array_equal(a, b)


def test_negative_and_mixed_tags():
    # tightness values are negative ints; they must be accepted and keyed apart
    a = child_rng(3, "l", -1000).random(4)
    b = child_rng(3, "l", 1000).random(4)
    c = child_rng(3, "l", -1000).random(4)
    assert not np.array_equal(a, b)
    np.testing.assert_array_equal(a, c)
