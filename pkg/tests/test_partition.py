import itertools

import numpy as np
import pytest

from clustervqe.partition import (Clustering, PartitionError, QuboProblem,
                                  build_mi_selection_qubo, build_modularity_qubo,
                                  canonical_assignment, exhaustive_partition, intercluster_mi,
                                  modularity_matrix, partition, refine_partition, solve_qubo,
                                  spin_clustering)

LN2 = np.log(2)


def bell_pairs_mi():
    mi = np.zeros((4, 4))
    mi[0, 1] = mi[1, 0] = mi[2, 3] = mi[3, 2] = LN2
    return mi


def random_mi(rng, n):
    a = rng.uniform(0, 1, (n, n)) ** 3
    mi = np.triu(a, 1)
    return mi + mi.T


def all_bipartitions(n):
    for tail in itertools.product((0, 1), repeat=n - 1):
        a = (0,) + tail
        if 1 in a:
            yield Clustering(a)


def test_intercluster_examples():
    ones = np.ones((4, 4)) - np.eye(4)
    assert intercluster_mi(ones, Clustering((0, 0, 0, 0))) == 0
    assert intercluster_mi(bell_pairs_mi(), Clustering((0, 0, 1, 1))) == 0
    assert intercluster_mi(ones, Clustering((0, 0, 1, 1))) == 4.0
    with pytest.raises(PartitionError):
        intercluster_mi(ones, Clustering((0, 1, 1)))


def test_clustering_validation_and_relabel():
    with pytest.raises(PartitionError):
        Clustering((0, 2, 2))
    with pytest.raises(PartitionError):
        Clustering((0, 0, 0, 1), (2, 2))
    c = Clustering((1, 1, 0, 0))
    assert c.canonical().assignment == (0, 0, 1, 1)
    mi = bell_pairs_mi() + 0.1
    assert intercluster_mi(mi, c) == intercluster_mi(mi, c.canonical())
    assert Clustering.from_json(c.to_json()) == c
    assert spin_clustering(6).groups() == [[0, 1, 2], [3, 4, 5]]


def test_exhaustive_examples(rng):
    assert exhaustive_partition(bell_pairs_mi(), 2, (2, 2)).assignment == (0, 0, 1, 1)
    assert exhaustive_partition(np.zeros((4, 4)), 2, (2, 2)).assignment == (0, 0, 1, 1)
    assert exhaustive_partition(np.zeros((4, 4)), 2).assignment == (0, 0, 0, 1)
    mi = random_mi(rng, 8)
    best = exhaustive_partition(mi, 2)
    value = intercluster_mi(mi, best)
    assert all(value <= intercluster_mi(mi, c) + 1e-12 for c in all_bipartitions(8))


def test_exhaustive_three_way(rng):
    mi = random_mi(rng, 6)
    best = exhaustive_partition(mi, 3, (2, 2, 2))
    assert best.sizes == (2, 2, 2)
    value = intercluster_mi(mi, best)
    for tail in itertools.product(range(3), repeat=5):
        a = canonical_assignment((0,) + tail)
        if sorted(Clustering(a).sizes) == [2, 2, 2]:
            assert value <= intercluster_mi(mi, Clustering(a)) + 1e-12


def test_refine_examples(rng):
    mi = bell_pairs_mi()
    assert refine_partition(mi, Clustering((0, 1, 0, 1)), (2, 2)).assignment == (0, 0, 1, 1)
    for _ in range(5):
        mi = random_mi(rng, 8)
        opt = exhaustive_partition(mi, 2, (4, 4))
        assert refine_partition(mi, opt).assignment == opt.assignment
        history = []
        refine_partition(mi, Clustering((0, 1) * 4, (4, 4)), history=history)
        assert all(b <= a + 1e-15 for a, b in zip(history, history[1:]))
    with pytest.raises(PartitionError):
        refine_partition(mi, Clustering((0,) * 7 + (1,)), (4, 4))


def test_selection_qubo_penalty_landscape():
    # K ones with zero MI: energy lambda * K (K - 2 f S), stationary at K = f S
    q = build_mi_selection_qubo(np.zeros((8, 8)), 0.5, 2.0)
    energies = {}
    for k in range(9):
        x = np.array([1] * k + [0] * (8 - k))
        energies[k] = q.energy(x)
        assert np.isclose(energies[k], 2.0 * k * (k - 8))
    assert energies[4] == min(energies.values())
    assert energies[0] == energies[8] == 0
    q1 = build_mi_selection_qubo(np.zeros((8, 8)), 0.5, 1.0)
    assert q1.energy([1, 1, 1, 1, 0, 0, 0, 0]) == -16.0
    with pytest.raises(ValueError):
        build_mi_selection_qubo(np.zeros((4, 4)), 1.5)
    with pytest.raises(ValueError):
        build_mi_selection_qubo(np.zeros((4, 4)), 0.5, 0.0)


def test_selection_qubo_picks_a_bell_pair():
    x = solve_qubo(build_mi_selection_qubo(bell_pairs_mi(), 0.5, 2.0))
    assert tuple(x) in {(1, 1, 0, 0), (0, 0, 1, 1)}


def test_modularity_examples(rng):
    b = modularity_matrix(random_mi(rng, 7))
    assert np.allclose(b.sum(axis=1), 0, atol=1e-10)
    assert abs(np.ones(7) @ b @ np.ones(7)) < 1e-10
    mi = np.zeros((6, 6))
    mi[:3, :3] = mi[3:, 3:] = 1
    np.fill_diagonal(mi, 0)
    x = solve_qubo(build_modularity_qubo(mi))
    assert tuple(x) in {(1, 1, 1, 0, 0, 0), (0, 0, 0, 1, 1, 1)}
    x = solve_qubo(build_modularity_qubo(bell_pairs_mi()))
    assert canonical_assignment(x.tolist()) == (0, 0, 1, 1)
    with pytest.raises(PartitionError):
        build_modularity_qubo(np.zeros((3, 3)))


def test_solve_qubo_examples():
    assert tuple(solve_qubo(QuboProblem(np.diag([1.0, -1.0])))) == (0, 1)
    assert tuple(solve_qubo(QuboProblem(np.diag([1.0, -1.0])), "anneal", 3)) == (0, 1)
    # ties resolve to the smallest integer pattern
    assert tuple(solve_qubo(QuboProblem(np.zeros((3, 3))))) == (0, 0, 0)
    with pytest.raises(PartitionError):
        solve_qubo(QuboProblem(np.zeros((23, 23))))
    with pytest.raises(ValueError):
        solve_qubo(QuboProblem(np.zeros((2, 2))), "magic")


def test_annealing_is_deterministic(rng):
    q = QuboProblem(rng.normal(size=(10, 10)))
    assert np.array_equal(solve_qubo(q, "anneal", 7), solve_qubo(q, "anneal", 7))


@pytest.mark.parametrize("method", ["exhaustive", "refine", "mi_qubo", "modularity"])
def test_all_methods_split_bell_pairs(method):
    assert partition(bell_pairs_mi(), 2, method).assignment == (0, 0, 1, 1)


def test_partition_dispatch(rng):
    mi = random_mi(rng, 6)
    assert partition(mi, 1).assignment == (0,) * 6
    assert partition(mi, 2, "spin").assignment == (0, 0, 0, 1, 1, 1)
    three = partition(mi, 3, "refine")
    assert three.n_clusters == 3
    assert partition(mi, 3, "exhaustive") == exhaustive_partition(mi, 3)
    assert partition(mi, 2, "mi_qubo", seed=4) == partition(mi, 2, "mi_qubo", seed=4)
