from math import comb

import pytest

from moulin.code_params import (
    TruncatedSeries,
    defect_sequence,
    closed_form_params,
    layered_params,
    ogf_params,
    ogf_series,
)
from moulin.errors import ParameterError


def grid():
    for k in range(1, 7):
        for d in range(k, 10):
            for s in range(2, k + 2):
                yield d + 1, k, d, s


def test_small_mbr_example():
    cp = closed_form_params(4, 3, 3, 2)
    assert (cp.alpha, cp.beta, cp.M) == (3, 1, 6)


def test_7_4_6_5():
    cp = closed_form_params(7, 4, 6, 5)
    assert (cp.alpha, cp.beta, cp.M) == (81, 27, 324)
    assert ogf_params(7, 4, 6, 5) == cp


def test_beta2_for_k4_d6_s5():
    cp = closed_form_params(7, 4, 6, 5)
    assert cp.beta_c[2] == 45
    # beta_1 plus the second layer sum_{p+q=3} 2^p C(2, q)
    second = sum(2**p * comb(2, 3 - p) for p in range(4))
    assert cp.beta_c[1] + second == 27 + 18 == 45


def test_s2_closed_form_simplifies():
    for k in range(1, 7):
        for d in range(k, 9):
            cp = closed_form_params(d + 1, k, d, 2)
            assert (cp.alpha, cp.beta, cp.M) == (d, 1, k * d - k * (k - 1) // 2)


def test_closed_form_equals_ogf_exhaustive():
    for n, k, d, s in grid():
        assert closed_form_params(n, k, d, s) == ogf_params(n, k, d, s), (k, d, s)


def test_ogf_small_example():
    cp = ogf_params(4, 3, 3, 2)
    assert (cp.alpha, cp.beta, cp.M) == (3, 1, 6)


def test_m_alternative_expression():
    for n, k, d, s in grid():
        cp = ogf_params(n, k, d, s)
        assert cp.M == k * cp.alpha - comb(k, s)


def test_b1_equals_b_up_to_order_12():
    for k in range(1, 7):
        for d in range(k, 10):
            ser = ogf_series(k, d, 12)
            x = TruncatedSeries([0, 1], 12)
            assert ser["B1"] == ser["B"]
            assert ser["B"] == ser["A"] * x / TruncatedSeries.binomial(1, 12)


def test_beta_c_telescoping_sum():
    for n, k, d, s in grid():
        cp = closed_form_params(n, k, d, s)
        for c in range(1, k + 1):
            tele = sum(
                (d - k) ** p * comb(k - j, s - 2 - p)
                for j in range(1, c + 1)
                for p in range(s - 1)
            )
            assert cp.beta_c[c] == tele
        assert cp.beta_c[1] == cp.beta


def test_mbr_and_msr_identities():
    for n, k, d, s in grid():
        cp = closed_form_params(n, k, d, s)
        if s == 2:
            assert cp.alpha == d * cp.beta
        if s == k + 1:
            assert cp.M == k * cp.alpha
            assert cp.alpha == (d - k + 1) * cp.beta


def test_sizes_beyond_msr_scale_by_d_minus_k():
    # Past s = k+1 the wedge degree saturates; each extra step multiplies
    # every parameter by d-k, so only the ratios are unchanged.
    for k in range(1, 6):
        for d in range(k, 9):
            ser = ogf_series(k, d, k + 4)
            for key in ("A", "B", "M", *(f"B{c}" for c in range(1, k + 1))):
                assert ser[key][k + 2] == (d - k) * ser[key][k + 1]


def test_defect_sequence():
    assert defect_sequence(2, 8) == [1, 0, 3, 2, 9, 12, 31, 54]
    assert defect_sequence(0, 5) == [1, 0, 0, 0, 0]
    assert defect_sequence(1, 4) == [1, 0, 1, 0]
    with pytest.raises(ParameterError):
        defect_sequence(-1, 3)


def test_layered_params():
    cp = layered_params(4, 3)
    assert (cp.alpha, cp.beta, cp.M) == (6, 3, 20)
    for k in range(1, 7):
        cp = layered_params(k, 2)
        assert (cp.alpha, cp.beta, cp.M) == (k, 1, k * k - comb(k, 2))
    cp = layered_params(3, 4)
    assert (cp.alpha, cp.beta, cp.M) == (1, 1, 3)
    for k in range(1, 7):
        for s in range(2, k + 2):
            assert layered_params(k, s) == closed_form_params(k + 1, k, k, s)


@pytest.mark.parametrize("nkds", [(3, 3, 3, 2), (5, 3, 4, 1), (5, 2, 4, 4), (4, 3, 2, 2)])
def test_hypothesis_violations(nkds):
    with pytest.raises(ParameterError):
        closed_form_params(*nkds)
    with pytest.raises(ParameterError):
        ogf_params(*nkds)


def test_beta_for_falls_back_to_alpha():
    cp = closed_form_params(8, 4, 7, 5)
    assert [cp.beta_for(c) for c in (1, 2, 3)] == [64, 112, 148]
    assert cp.beta_for(4) == cp.beta_for(5) == cp.alpha == 256


def test_series_division_requires_unit():
    with pytest.raises(ParameterError):
        TruncatedSeries([1, 1]) / TruncatedSeries([2, 1])
    geo = TruncatedSeries.one(5) / TruncatedSeries([1, -3], 5)
    assert geo == TruncatedSeries.geometric(3, 5)
