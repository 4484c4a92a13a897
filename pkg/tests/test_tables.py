import numpy as np
import pytest

from rhodiff import FrequencyTable, TableError


def test_from_counts_and_totals(ome):
    assert ome.bilateral_totals.tolist() == [39, 25]
    assert ome.unilateral_totals.tolist() == [54, 55]
    assert ome.organ_totals.tolist() == [2 * 39 + 54, 2 * 25 + 55]
    assert ome.success_totals.tolist() == [7 + 2 * 23 + 34, 5 + 2 * 13 + 36]


def test_group_counts_roundtrip(orthok):
    assert orthok.group_counts(0) == (20, 7, 10, 3, 3)
    assert orthok.group_counts(1) == (13, 2, 2, 0, 0)


def test_swapped(ome):
    sw = ome.swapped()
    assert sw.group_counts(0) == ome.group_counts(1)
    assert sw.group_counts(1) == ome.group_counts(0)
    assert sw.labels == (ome.labels[1], ome.labels[0])
    assert sw.swapped().group_counts(0) == ome.group_counts(0)


def test_rejects_negative_counts():
    with pytest.raises(TableError, match="negative"):
        FrequencyTable.from_counts((1, 2, -1, 0, 0), (1, 1, 1, 1, 1))


def test_rejects_fractional_counts():
    with pytest.raises(TableError, match="non-integer"):
        FrequencyTable.from_counts((1.5, 2, 1, 0, 0), (1, 1, 1, 1, 1))


def test_rejects_wrong_arity():
    with pytest.raises(TableError):
        FrequencyTable.from_counts((1, 2, 3), (1, 1, 1, 1, 1))


def test_accepts_integer_valued_floats():
    t = FrequencyTable.from_counts((1.0, 2.0, 3.0, 4.0, 5.0), (0, 0, 0, 1, 0))
    assert t.bilateral.dtype == np.int64
    assert t.group_counts(0) == (1, 2, 3, 4, 5)


def test_counts_are_immutable(ome):
    with pytest.raises(ValueError):
        ome.bilateral[0, 0] = 99


def test_require_data_in_both_groups():
    t = FrequencyTable.from_counts((0, 0, 0, 0, 0), (1, 1, 1, 1, 1))
    with pytest.raises(TableError, match="no observed organs"):
        t.require_data_in_both_groups()
    # a single unilateral subject is enough
    t2 = FrequencyTable.from_counts((0, 0, 0, 1, 0), (1, 1, 1, 1, 1))
    t2.require_data_in_both_groups()


def test_str_contains_counts(ome):
    text = str(ome)
    assert "39" in text and "55" in text
