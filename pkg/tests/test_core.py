import math

import pytest

from anchova.core import CoordSubset, as_mask, format_number, iter_submasks, mask_indices, parse_p, popcount


def test_coord_subset_basics():
    u = CoordSubset.from_indices([0, 2], 4)
    assert u.bits == 0b101
    assert len(u) == 2
    assert 2 in u and 1 not in u
    assert u.indices == (0, 2)
    assert u.complement().bits == 0b1010
    assert str(u) == "{1,3}"
    assert CoordSubset.empty(3).issubset(u.bits)


def test_coord_subset_rejects_out_of_range_bits():
    with pytest.raises(ValueError):
        CoordSubset(0b1000, 3)
    with pytest.raises(ValueError):
        CoordSubset.from_indices([3], 3)


def test_as_mask_checks_dimension():
    assert as_mask(CoordSubset(1, 2), 2) == 1
    with pytest.raises(ValueError):
        as_mask(CoordSubset(1, 2), 3)
    with pytest.raises(ValueError):
        as_mask(0b100, 2)


@pytest.mark.parametrize("bits", [0, 1, 0b1011, 0b111111])
def test_submasks_are_exactly_the_subsets(bits):
    subs = list(iter_submasks(bits))
    assert len(subs) == len(set(subs)) == 2 ** popcount(bits)
    assert all(v & ~bits == 0 for v in subs)


def test_mask_indices():
    assert mask_indices(0) == ()
    assert mask_indices(0b10110) == (1, 2, 4)


def test_parse_p():
    assert parse_p("inf") == math.inf
    assert parse_p("1.5") == 1.5
    with pytest.raises(ValueError):
        parse_p("0.5")
    with pytest.raises(ValueError):
        parse_p("nan")


def test_format_number():
    assert format_number(4.0) == "4"
    assert format_number(2.25) == "2.25"
    assert format_number(math.inf) == "inf"
