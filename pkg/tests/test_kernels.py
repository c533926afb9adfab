"""Backend parity: the njit kernel and the numpy path must agree exactly."""

import pytest

from orbitheight import kernels


GRID = [
    (2, 1), (2, 2), (2, 9), (2, 25),
    (3, 1), (3, 4), (3, 7),
    (4, 2), (4, 3),
    (5, 1),
]


@pytest.mark.parametrize("k,box", GRID)
def test_numpy_matches_reference(k, box):
    m = 2 * box + 1
    assert kernels.count_coprime_range_numpy(k, box, 0, m) == kernels._count_coprime_range_py(
        k, box, 0, m
    )


@pytest.mark.skipif(not kernels.HAS_NUMBA, reason="numba backend not active")
@pytest.mark.parametrize("k,box", GRID)
def test_njit_matches_reference(k, box):
    m = 2 * box + 1
    assert kernels.count_coprime_range_njit(k, box, 0, m) == kernels._count_coprime_range_py(
        k, box, 0, m
    )


@pytest.mark.parametrize("k,box", [(2, 11), (3, 5)])
def test_partial_ranges_partition(k, box):
    m = 2 * box + 1
    total = kernels.count_coprime_range(k, box, 0, m)
    cuts = [0, m // 3, m // 2, m - 1, m]
    parts = sum(
        kernels.count_coprime_range(k, box, lo, hi) for lo, hi in zip(cuts, cuts[1:])
    )
    assert parts == total


def test_k1_edge():
    # P^0 is never requested, but the kernels stay consistent there too
    assert kernels.count_coprime_range_numpy(1, 5, 0, 11) == 2
    assert kernels._count_coprime_range_py(1, 5, 0, 11) == 2


def test_chunked_numpy_path():
    # force many chunks to exercise the recursion split
    old = kernels._CHUNK
    kernels._CHUNK = 64
    try:
        box = 6
        m = 2 * box + 1
        assert kernels.count_coprime_range_numpy(3, box, 0, m) == (
            kernels._count_coprime_range_py(3, box, 0, m)
        )
    finally:
        kernels._CHUNK = old
