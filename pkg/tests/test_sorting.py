import itertools

import numpy as np
import pytest

from nsgalab.benchmarks import BenchmarkId
from nsgalab.core import Population, RandomSource, dominates
from nsgalab.sorting import FrontPartition, critical_front_index, fast_nondominated_sort


def brute_force_partition(objs):
    """Iteratively peel the non-dominated set, comparing all pairs."""
    remaining = list(range(len(objs)))
    fronts = []
    while remaining:
        front = [
            i
            for i in remaining
            if not any(dominates(objs[j], objs[i]) for j in remaining if j != i)
        ]
        fronts.append(front)
        remaining = [i for i in remaining if i not in front]
    return fronts


def assert_matches_oracle(objs):
    got = fast_nondominated_sort(np.asarray(objs))
    want = brute_force_partition(np.asarray(objs))
    assert [list(f) for f in got.fronts] == want


def test_oneminmax_population_is_single_front():
    bench = BenchmarkId("oneminmax", 10)
    rng = RandomSource(0)
    pop = Population.from_genotypes(rng.integers(0, 2, (30, 10)).astype(np.uint8), bench)
    partition = fast_nondominated_sort(pop)
    assert len(partition.fronts) == 1
    assert list(partition.fronts[0]) == list(range(30))


def test_lotz_two_front_example():
    bench = BenchmarkId("lotz", 4)
    pop = Population.from_genotypes(
        np.array([[1, 1, 0, 0], [1, 0, 1, 0]], dtype=np.uint8), bench
    )
    partition = fast_nondominated_sort(pop)
    assert [list(f) for f in partition.fronts] == [[0], [1]]


def test_empty_population_rejected():
    with pytest.raises(ValueError):
        fast_nondominated_sort(np.empty((0, 2)))


def test_exhaustive_small_bitstring_subsets():
    # every non-empty subset of {0,1}^n for tiny n, both benchmarks
    for n in (2, 3):
        genos = np.array(list(itertools.product([0, 1], repeat=n)), dtype=np.uint8)
        for tag in ("oneminmax", "lotz"):
            objs = BenchmarkId(tag, n).evaluate(genos)
            for size in range(1, len(genos) + 1):
                for subset in itertools.combinations(range(len(genos)), size):
                    assert_matches_oracle(objs[list(subset)])


def test_randomized_multisets_match_oracle():
    rng = RandomSource(7)
    for _ in range(300):
        n = int(rng.integers(2, 7))
        size = int(rng.integers(1, 9))
        genos = rng.integers(0, 2, (size, n)).astype(np.uint8)
        objs = BenchmarkId("lotz", n).evaluate(genos)
        assert_matches_oracle(objs)


def test_larger_random_instances_match_oracle():
    rng = RandomSource(8)
    for _ in range(100):
        n = int(rng.integers(4, 11))
        size = int(rng.integers(9, 31))
        genos = rng.integers(0, 2, (size, n)).astype(np.uint8)
        objs = BenchmarkId("lotz", n).evaluate(genos)
        assert_matches_oracle(objs)


def test_front_order_is_stable():
    objs = np.array([[1, 1], [2, 2], [1, 1], [0, 0], [2, 2]])
    partition = fast_nondominated_sort(objs)
    assert [list(f) for f in partition.fronts] == [[1, 4], [0, 2], [3]]


def test_critical_front_index_examples():
    partition = FrontPartition(
        (np.arange(5), np.arange(5, 8))
    )
    assert critical_front_index(partition, 4) == 1
    assert critical_front_index(partition, 5) == 1
    assert critical_front_index(partition, 6) == 2
    with pytest.raises(ValueError):
        critical_front_index(partition, 9)
    with pytest.raises(ValueError):
        critical_front_index(partition, 0)
