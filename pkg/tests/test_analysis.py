import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fracsteklov.analysis import (
    DegenerateDelta,
    DegenerateParameters,
    NoRealRoots,
    StabilityCase,
    StabilityVerdict,
    classify_stability,
    convergence_order,
    delta_roots,
    inverse_transform_field,
    transform_field,
    transform_params,
    transform_problem,
)
from fracsteklov.core import build_grid
from fracsteklov.mms import make_problem
from fracsteklov.stepper import advance


@pytest.mark.parametrize(
    "params, case",
    [
        ((3, 2, -5), StabilityCase.CASE2),
        ((2, -5, 10), StabilityCase.CASE2),
        ((100, -200, 300), StabilityCase.CASE2),
        ((0.7, 0.1, -3), StabilityCase.CASE1),
        ((0.1, -0.9, -7), StabilityCase.CASE1),
        ((0.5, 0.5, 0), StabilityCase.DIRECT),
        ((-2, -2, -1), StabilityCase.DIRECT),
        ((1, 1, -1), StabilityCase.NO_GUARANTEE),
        ((0.5, 0.5, 1), StabilityCase.NO_GUARANTEE),
        ((0.5, 2.0, -1), StabilityCase.NO_GUARANTEE),
        ((1.0, 0.5, -1), StabilityCase.NO_GUARANTEE),
        ((3, 2, 5), StabilityCase.NO_GUARANTEE),
        ((0.7, 0.1, 3), StabilityCase.NO_GUARANTEE),
    ],
)
def test_classify(params, case):
    v = classify_stability(*params)
    assert v.case is case
    assert v.guaranteed == (case is not StabilityCase.NO_GUARANTEE)
    if case in (StabilityCase.CASE1, StabilityCase.CASE2):
        a1, b1, g1 = v.transformed
        assert a1 == pytest.approx(b1, abs=1e-12)
        assert g1 <= 1e-12
    else:
        assert v.delta is None and v.transformed is None


def test_case_picks_branch():
    d1, d2 = delta_roots(3, 2)
    assert classify_stability(3, 2, -5).delta == d2
    d1, d2 = delta_roots(0.7, 0.1)
    assert classify_stability(0.7, 0.1, -3).delta == d1


def test_delta_roots_example():
    d1, d2 = delta_roots(3, 2)
    assert d1 == pytest.approx(5 - math.sqrt(24), rel=1e-14)
    assert d2 == pytest.approx(5 + math.sqrt(24), rel=1e-14)
    assert d1 == pytest.approx(0.1010205, abs=1e-7)
    assert d2 == pytest.approx(9.8989795, abs=1e-7)


def test_delta_roots_case1_example():
    d1, d2 = delta_roots(0.7, 0.1)
    assert d1 * d2 == pytest.approx(1.0, rel=1e-10)
    for gamma in (0.0, -0.1, -3.0, -1e4):
        assert transform_params(0.7, 0.1, gamma, d1)[2] <= 0.0


def test_delta_roots_errors():
    with pytest.raises(DegenerateParameters):
        delta_roots(2, 2)
    with pytest.raises(NoRealRoots):
        delta_roots(0.5, 2.0)
    with pytest.raises(NoRealRoots):
        delta_roots(1.0, 3.0)


def test_transform_params_example():
    d2 = delta_roots(3, 2)[1]
    a1, b1, g1, mf = transform_params(3, 2, -5, d2)
    assert a1 == pytest.approx(2.3798, abs=5e-5)
    assert b1 == pytest.approx(2.3798, abs=5e-5)
    assert g1 == pytest.approx(-4.7596, abs=5e-5)
    assert mf == pytest.approx((d2 * d2 - 1) / (d2 - 2), rel=1e-15)


def test_transform_params_zero_gamma():
    for delta in (0.3, -2.5, 7.0):
        assert transform_params(0.4, -0.2, 0.0, delta)[2] == 0.0


@pytest.mark.parametrize("delta", [1.0, -1.0, -0.4, 0.3, 1.0 + 1e-12])
def test_transform_params_poles(delta):
    with pytest.raises(DegenerateDelta):
        transform_params(0.4, 0.3, -1.0, delta)


def test_transform_field_examples():
    np.testing.assert_array_equal(transform_field([1.0, 2.0, 3.0], 0.0), [3.0, 2.0, 1.0])
    y = np.array([1.0, 4.0, 2.0, 4.0, 1.0])
    np.testing.assert_array_equal(transform_field(y, 1.0), 2 * y)


def test_inverse_transform(rng):
    d2 = delta_roots(3, 2)[1]
    y = rng.normal(size=17)
    np.testing.assert_allclose(inverse_transform_field(transform_field(y, d2), d2), y, rtol=1e-12, atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(delta=st.floats(-50, 50), n=st.integers(1, 30), seed=st.integers(0, 2**32 - 1))
def test_transform_roundtrip_property(delta, n, seed):
    assume(abs(delta * delta - 1) >= 1e-6)
    y = np.random.default_rng(seed).normal(size=n)
    back = inverse_transform_field(transform_field(y, delta), delta)
    cond = (abs(delta) + 1) ** 2 / abs(delta * delta - 1)
    np.testing.assert_allclose(back, y, rtol=0, atol=1e-12 * max(1.0, cond) * np.abs(y).max())


@pytest.mark.parametrize(
    "gamma, sign", [(-1e6, -1), (-1.0, -1), (-1e-12, -1), (0.0, 0), (1e-12, 1), (1.0, 1)]
)
def test_verdict_depends_on_gamma_sign_only(gamma, sign):
    for alpha, beta in [(0.5, 0.5), (0.7, 0.1), (3.0, 2.0), (2.0, -5.0)]:
        ref = {-1: -1.0, 0: 0.0, 1: 1.0}[sign]
        assert classify_stability(alpha, beta, gamma).case is classify_stability(alpha, beta, ref).case


open_unit = st.floats(-1, 1, exclude_min=True, exclude_max=True).filter(lambda v: abs(v) < 1 - 1e-6)
outside = st.one_of(st.floats(1 + 1e-6, 1e3), st.floats(-1e3, -1 - 1e-6))


@settings(max_examples=300, deadline=None)
@given(alpha=open_unit, beta=open_unit, gamma=st.floats(-1e4, 0))
def test_case1_transform_property(alpha, beta, gamma):
    assume(abs(alpha - beta) > 1e-6)
    v = classify_stability(alpha, beta, gamma)
    assert v.case is StabilityCase.CASE1
    a1, b1, g1 = v.transformed
    assert a1 == pytest.approx(b1, rel=1e-9, abs=1e-9)
    assert abs(a1 - 1.0) >= 1e-9
    assert g1 <= 1e-12
    d1, d2 = delta_roots(alpha, beta)
    assert d1 * d2 == pytest.approx(1.0, rel=1e-10)


@settings(max_examples=300, deadline=None)
@given(alpha=outside, beta=outside, gamma=st.floats(-1e4, 1e4))
def test_case2_transform_property(alpha, beta, gamma):
    assume(abs(alpha - beta) > 1e-6)
    assume(alpha * beta * gamma <= 0)
    v = classify_stability(alpha, beta, gamma)
    assert v.case is StabilityCase.CASE2
    a1, b1, g1 = v.transformed
    assert a1 == pytest.approx(b1, rel=1e-9, abs=1e-9)
    assert g1 <= 1e-12 * max(1.0, abs(gamma))


def test_verdict_dict_roundtrip():
    for params in [(3, 2, -5), (0.5, 0.5, 0), (0.5, 2, 1)]:
        v = classify_stability(*params)
        assert StabilityVerdict.from_dict(v.to_dict()) == v


def test_convergence_order_examples():
    co = convergence_order([(1 / 160, 3.33916e-5), (1 / 320, 8.34728e-6)])
    assert co[0] == pytest.approx(2.000, abs=5e-4)
    assert convergence_order([(0.1, 3.0), (0.05, 0.75)]) == [pytest.approx(2.0, abs=1e-15)]
    co = convergence_order([(1 / 160, 3.01867e-2), (1 / 320, 7.54659e-3), (1 / 640, 1.88664e-3)])
    assert co == [pytest.approx(2.000, abs=5e-4), pytest.approx(2.000, abs=5e-4)]


@pytest.mark.parametrize(
    "pairs",
    [
        [(0.1, 1.0)],
        [(0.1, 1.0), (0.05, 0.0)],
        [(0.1, 1.0), (0.05, -1.0)],
        [(0.05, 1.0), (0.1, 0.5)],
        [(0.1, 1.0), (0.1, 0.5)],
    ],
)
def test_convergence_order_rejects(pairs):
    with pytest.raises(ValueError):
        convergence_order(pairs)


@pytest.mark.parametrize("params", [(0.5, 3, 2, -5), (0.3, 0.7, 0.1, -3), (0.9, 0.1, -0.9, -7)])
def test_discrete_transform_consistency(params):
    mp = make_problem(*params)
    verdict = classify_stability(*params[1:])
    delta = verdict.delta
    g = build_grid(mp.spec, 32, 32)
    y = advance(mp.spec, g).layers
    v = advance(transform_problem(mp.spec, delta), g).layers
    np.testing.assert_allclose(transform_field(y, delta), v, rtol=1e-9, atol=1e-9 * np.abs(v).max())
