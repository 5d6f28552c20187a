import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixscore.errors import ArgumentError
from fixscore.kmeans import inertia, kmeans

from oracles import best_two_partition, same_partition


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 6), st.integers(0, 2**32 - 1), st.integers(0, 100))
def test_separated_clusters_match_exhaustive_split(n, seed, kseed):
    rng = np.random.default_rng(seed)
    side = np.r_[0, 1, rng.integers(0, 2, size=n - 2)]
    rng.shuffle(side)
    X = rng.normal(scale=0.1, size=(n, 2)) + side[:, None] * 10.0
    best, best_labels = best_two_partition(X)
    labels, centers = kmeans(X, 2, seed=kseed)
    assert same_partition(labels, best_labels)
    assert inertia(X, labels, centers) == pytest.approx(best)


def test_k_equals_n_and_one():
    X = np.array([[0.0], [1.0], [5.0]])
    labels, _ = kmeans(X, 3, seed=0)
    assert len(set(labels.tolist())) == 3
    labels, centers = kmeans(X, 1, seed=0)
    assert labels.tolist() == [0, 0, 0]
    assert centers[0, 0] == pytest.approx(2.0)
    labels, _ = kmeans(X, 10, seed=0)
    assert len(set(labels.tolist())) == 3


def test_deterministic():
    X = np.random.default_rng(1).normal(size=(40, 3))
    a, _ = kmeans(X, 4, seed=9)
    b, _ = kmeans(X, 4, seed=9)
    assert (a == b).all()


def test_ties_go_to_lowest_cluster():
    X = np.array([[0.0], [2.0], [1.0]])
    labels, centers = kmeans(X, 2, seed=0, max_iter=1)
    # the midpoint is equidistant from both starting centers
    assert labels[2] == int(np.argmin(np.abs(centers[:, 0] - 1.0))) or labels[2] == 0


def test_validation():
    with pytest.raises(ArgumentError):
        kmeans(np.zeros((0, 2)), 1)
    with pytest.raises(ArgumentError):
        kmeans(np.zeros((3, 2)), 0)
