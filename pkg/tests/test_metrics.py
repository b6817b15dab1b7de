import numpy as np
import pytest
from hypothesis import given, strategies as st

from l1pph.metrics import (
    DimensionMismatchError,
    ParamsInvalid,
    PredicateParams,
    dotdiv,
    nad,
    norm,
    one_sided,
    pixel_change_ratio,
    predicate_as,
    predicate_l1,
    squared_l2,
    threshold_from_nad,
)

vec_pair = st.integers(1, 12).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 255), min_size=n, max_size=n),
        st.lists(st.integers(0, 255), min_size=n, max_size=n),
    )
)


def test_dotdiv_examples():
    assert dotdiv([2, 1, 0, 4], [3, 0, 1, 4]).tolist() == [0, 1, 0, 0]
    assert dotdiv([3, 0, 1, 4], [2, 1, 0, 4]).tolist() == [1, 0, 1, 0]


@given(vec_pair)
def test_one_sided_split_l1(pair):
    x, y = pair
    up, down = one_sided(x, y)
    assert up == norm(dotdiv(y, x)) and down == norm(dotdiv(x, y))
    assert up + down == norm(np.subtract(x, y))
    # x - y = (x -. y) - (y -. x)
    assert (dotdiv(x, y) - dotdiv(y, x)).tolist() == np.subtract(x, y).tolist()


def test_norms():
    v = [3, -4, 0]
    assert norm(v, "l0") == 2
    assert norm(v, "l1") == 7
    assert norm(v, "l2") == 5.0
    assert norm(v, "linf") == 4
    assert squared_l2(v) == 25
    with pytest.raises(ValueError):
        norm(v, "l3")


def test_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        one_sided([1, 2], [1, 2, 3])


def test_predicate_on_running_example():
    x, y = [2, 1, 0, 4], [3, 0, 1, 4]
    assert one_sided(x, y) == (2, 1)
    assert predicate_as(x, y, PredicateParams(5, 3, 2, 0)) == 1
    assert predicate_as(x, y, PredicateParams(5, 2, 3, 0)) == 0  # up must be < t_plus
    assert predicate_as(x, y, PredicateParams(5, 3, 2, 2)) == 0  # down must be <= t_minus - delta


@given(vec_pair, st.integers(1, 40))
def test_symmetric_predicate_contains_asymmetric(pair, t):
    x, y = pair
    prm = PredicateParams.balanced(t, 0)
    if predicate_as(x, y, prm):
        assert predicate_l1(x, y, t)


@pytest.mark.parametrize("t", [1, 2, 7, 2007])
def test_balanced_split(t):
    prm = PredicateParams.balanced(t)
    assert prm.t_plus + prm.t_minus == t
    assert prm.t_plus - prm.t_minus in (0, 1)
    assert prm.delta == min(3, t // 2)


@pytest.mark.parametrize(
    "args", [(0, 1, 0, 0), (5, 0, 5, 0), (5, 3, 3, 0), (5, 3, 2, 3), (5, 3, 2, -1)]
)
def test_params_invalid(args):
    with pytest.raises(ParamsInvalid):
        PredicateParams(*args)


def test_nad_and_threshold():
    x = np.zeros(100, dtype=int)
    y = x.copy()
    y[:10] = 64
    assert nad(x, y, 256) == pytest.approx(100 * 640 / 25600)
    assert threshold_from_nad(1.1277, 256, 150528) == 869122
    assert threshold_from_nad(0, 256, 784) == 0
    assert threshold_from_nad("0.4512", 256, 150528) == 347741
    with pytest.raises(ValueError):
        threshold_from_nad(-1, 256, 10)


def test_pixel_change_ratio():
    assert pixel_change_ratio([1, 2, 3, 4], [1, 0, 3, 5]) == 50.0
