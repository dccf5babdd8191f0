import numpy as np
import pytest

from mexpand.exceptions import InvalidSpecError
from mexpand.multiindex import MultiIndex, chain_rule_expansion, enumerate_multi_indices


def test_enumeration_order():
    found = [b.components for b in enumerate_multi_indices(2, 2)]
    assert found == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]


def test_enumeration_counts():
    assert len(enumerate_multi_indices(1, 5)) == 6
    assert len(enumerate_multi_indices(3, 2)) == 10
    assert enumerate_multi_indices(2, -1) == []


def test_multi_index_arithmetic():
    beta = MultiIndex((2, 3))
    assert beta.total == 5
    assert beta.factorial == 12
    assert not beta.is_even()
    assert MultiIndex((2, 0)).is_even()
    assert (beta + MultiIndex((1, 1))).components == (3, 4)
    assert beta.power(np.array([2.0, 0.5])) == pytest.approx(0.5)


def test_negative_entries_rejected():
    with pytest.raises(InvalidSpecError):
        MultiIndex((1, -1))


def test_chain_rule_first_order():
    assert chain_rule_expansion([[1, 2], [3, 4]], (1, 0)) == {MultiIndex((1, 0)): 1.0, MultiIndex((0, 1)): 3.0}


def test_chain_rule_second_order_diagonal():
    # D_y1² f(2y1, 3y2) = 4 f_11
    assert chain_rule_expansion([[2, 0], [0, 3]], (2, 0)) == {MultiIndex((2, 0)): 4.0}


def test_chain_rule_preserves_total_order():
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    for beta in enumerate_multi_indices(2, 4):
        assert all(alpha.total == beta.total for alpha in chain_rule_expansion(A, beta))


def test_chain_rule_dimension_mismatch():
    with pytest.raises(InvalidSpecError):
        chain_rule_expansion(np.identity(2), (1,))
