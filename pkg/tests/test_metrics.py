import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enhg.datio import LabelVector
from enhg.metrics import (
    MetricError,
    classification_accuracy,
    clustering_accuracy,
    contingency_table,
    nmi,
)

from oracles import brute_force_accuracy, brute_force_nmi


def test_accuracy_identity_and_relabeling():
    truth = [0, 0, 1, 1, 2]
    assert clustering_accuracy(truth, truth) == 1.0
    assert clustering_accuracy([1, 1, 0, 0], [0, 0, 1, 1]) == 1.0


def test_accuracy_worked_example():
    assert clustering_accuracy([0, 0, 1, 2], [1, 1, 0, 0]) == pytest.approx(0.75)
    assert brute_force_accuracy([0, 0, 1, 2], [1, 1, 0, 0]) == pytest.approx(0.75)


def test_accuracy_accepts_label_vectors():
    truth = LabelVector.known([0, 1, 1])
    assert clustering_accuracy(LabelVector.known([5, 7, 7]), truth) == 1.0


def test_accuracy_with_fewer_clusters_than_classes():
    # one predicted cluster can match only one class
    assert clustering_accuracy([0, 0, 0, 0], [0, 0, 1, 2]) == pytest.approx(0.5)


def test_length_mismatch():
    with pytest.raises(MetricError, match="length mismatch"):
        clustering_accuracy([0, 1], [0, 1, 1])
    with pytest.raises(MetricError):
        nmi([0], [0, 1])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 6), st.integers(1, 40))
def test_accuracy_matches_permutation_oracle(seed, kp, kt, n):
    rng = np.random.default_rng(seed)
    pred = rng.integers(0, kp, n)
    truth = rng.integers(0, kt, n)
    assert clustering_accuracy(pred, truth) == pytest.approx(brute_force_accuracy(pred, truth))


def test_contingency_table_sums():
    table = contingency_table([3, 3, 9, 9, 9], [0, 1, 1, 1, 0])
    np.testing.assert_array_equal(table, [[1, 1], [1, 2]])
    assert table.sum() == 5


def test_nmi_worked_example():
    assert nmi([0, 0, 1, 1], [0, 0, 0, 1]) == pytest.approx(0.3456, abs=1e-3)
    assert brute_force_nmi([0, 0, 1, 1], [0, 0, 0, 1]) == pytest.approx(0.3456, abs=1e-3)


def test_nmi_edge_cases():
    assert nmi([0, 1, 1, 2], [0, 1, 1, 2]) == pytest.approx(1.0)
    assert nmi([0, 0, 0, 0], [0, 1, 0, 1]) == 0.0
    assert nmi([0, 0, 0], [1, 1, 1]) == 0.0


def test_nmi_arithmetic_variant():
    # H(pred) = ln 2 and H(truth) for (3/4, 1/4) differ, so the two means differ
    geo = nmi([0, 0, 1, 1], [0, 0, 0, 1])
    ari = nmi([0, 0, 1, 1], [0, 0, 0, 1], average="arithmetic")
    assert ari < geo
    with pytest.raises(MetricError):
        nmi([0, 1], [0, 1], average="max")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5), st.integers(2, 30))
def test_nmi_properties(seed, kp, kt, n):
    rng = np.random.default_rng(seed)
    pred = rng.integers(0, kp, n)
    truth = rng.integers(0, kt, n)
    value = nmi(pred, truth)
    assert 0.0 <= value <= 1.0
    assert value == pytest.approx(nmi(truth, pred), abs=1e-12)
    assert value == pytest.approx(brute_force_nmi(pred, truth), abs=1e-9)
    relabel = rng.permutation(kp + 3)
    assert nmi(relabel[pred], truth) == pytest.approx(value, abs=1e-12)
    assert clustering_accuracy(relabel[pred], truth) == clustering_accuracy(pred, truth)


def test_classification_accuracy():
    truth = np.array([0, 1, 2, 1, 0])
    assert classification_accuracy(truth, truth, np.ones(5, bool)) == 1.0
    wrong = (truth + 1) % 3
    assert classification_accuracy(wrong, truth, [True, True, False, False, False]) == 0.0
    pred = np.array([0, 1, 2, 0, 9])
    mask = np.array([True, True, True, True, False])
    assert classification_accuracy(pred, truth, mask) == 0.75


def test_classification_accuracy_empty_mask():
    with pytest.raises(MetricError, match="no samples"):
        classification_accuracy([0, 1], [0, 1], [False, False])
