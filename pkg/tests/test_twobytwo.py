import math

import mpmath as mp
import numpy as np
import pytest
from conftest import assert_close
from hypothesis import given
from hypothesis import strategies as st

from mml import linalg as la
from mml import means as mn
from mml import twobytwo as tb
from mml.errors import DegenerateError, RangeError

mp.mp.dps = 50
pos = st.floats(1e-3, 1e3)

TRIPLES = [(0.25, 0.25, 1.25), (0.5, 0.3, 1.0), (0.9, 0.5, 0.2), (0.1, 0.8, 2.0), (0.6, 0.6, 0.4)]


def mp_phi(k, t, L, x, y):
    x, y = mp.mpf(x), mp.mpf(y)
    return ((2 * x) ** L + (2 * y) ** L) / (2 * (x + y) ** (2 * t * (1 - k)))


def mp_h(x, y, L):
    x, y = mp.mpf(x), mp.mpf(y)
    return mp.log(((2 * x) ** L + (2 * y) ** L) / (2 * (x + y) ** (L / 2))) - L / 4 * mp.log(4 * x * y)


def test_family_eigenstructure():
    es = la.eig(tb.a_xy(1.0, 4.0))
    assert np.allclose(es.values, [8.0, 2.0], atol=1e-12)
    v_big = np.abs(es.vectors[:, 0])
    assert np.allclose(v_big, [1 / math.sqrt(2)] * 2, atol=1e-12)
    with pytest.raises(ValueError):
        tb.a_xy(0.0, 1.0)


@given(pos, pos, st.floats(0.1, 3.0))
def test_power_stays_in_family(x, y, q):
    assert_close(la.power(tb.a_xy(x, y), q), tb.a_xy(*tb.power_point(x, y, q)), 1e-10)


@pytest.mark.parametrize("k,t,L", TRIPLES)
def test_phi_matches_matrix_norm_on_grid(k, t, L):
    spec = mn.MeanSpec("fktl", k=k, t=t, L=L)
    grid = np.logspace(-2, 2, 10)
    for x in grid:
        for y in grid:
            direct = la.op_norm(mn.mean_apply(spec, tb.a_xy(x, y), tb.B_PROJ))
            assert tb.phi_value(k, t, L, x, y) == pytest.approx(direct, rel=1e-10)


@pytest.mark.parametrize("k,t,L", TRIPLES)
def test_phi_against_mpmath(k, t, L):
    for x, y in [(1e-6, 3.0), (1.0, 4.0), (1e4, 1e-4), (2.5, 2.5)]:
        ref = mp_phi(k, t, L, x, y)
        assert tb.phi_value(k, t, L, x, y) == pytest.approx(float(ref), rel=1e-13)


def test_phi_examples():
    for k, t in [(0.25, 0.25), (0.5, 0.7), (0.9, 0.1)]:
        L = mn.homogeneous_l(k, t)
        assert tb.phi_value(k, t, L, 1.0, 1.0) == pytest.approx(2 ** (1 - 2 * k * t), rel=1e-14)
    for t in (0.2, 0.5, 0.8):
        assert tb.phi_value(0.5, t, 1.0, 1.0, 4.0) == pytest.approx(5 ** (1 - t), rel=1e-14)
        direct = la.op_norm(mn.natural_mean(tb.a_xy(1.0, 4.0), tb.B_PROJ, t))
        assert direct == pytest.approx(5 ** (1 - t), rel=1e-12)


def test_powered_norm_through_phi():
    k, t, q = 0.3, 0.6, 0.7
    L = mn.homogeneous_l(k, t)
    A = tb.a_xy(1.0, 4.0)
    direct = la.op_norm(mn.fkt_mean(la.power(A, q), tb.B_PROJ, k, t))
    assert direct == pytest.approx(tb.phi_value(k, t, L, *tb.power_point(1.0, 4.0, q)), rel=1e-10)


def test_h_examples():
    target = 0.25 * math.log(16 / 25)
    assert target == pytest.approx(-0.11157, abs=1e-5)
    assert tb.h_derivative_at_zero(1.0, 4.0) == pytest.approx(target, rel=1e-14)
    assert tb.h_value(1.0, 4.0, 1.0) == pytest.approx(-target, rel=1e-14)
    for L in (0.0, 0.3, 1.0, 5.0):
        assert tb.h_value(1.0, 1.0, L) == 0.0
    assert tb.h_value(1.0, 4.0, 0.0) == 0.0


@given(pos, pos, st.floats(0.0, 3.0))
def test_h_against_mpmath(x, y, L):
    assert tb.h_value(x, y, L) == pytest.approx(float(mp_h(x, y, L)), rel=1e-9, abs=1e-14)


@given(pos, pos)
def test_h_derivative_and_signs(x, y):
    if abs(x - y) < 1e-3 * (x + y):
        return
    d0 = tb.h_derivative_at_zero(x, y)
    assert d0 < 0 and tb.h_value(x, y, 1.0) > 0
    dL = 1e-6
    assert (tb.h_value(x, y, dL) - tb.h_value(x, y, 0.0)) / dL == pytest.approx(d0, abs=1e-4)


def test_find_lxy_examples():
    L = tb.find_lxy(1.0, 4.0)
    assert 0 < L < 1
    assert tb.h_value(1.0, 4.0, L / 2) < 0
    slope = abs(tb.h_derivative_at_zero(1.0, 4.0))
    assert abs(tb.h_value(1.0, 4.0, L)) <= 1e-12 * slope * 10
    for s in np.linspace(0.01, 0.99, 50) * L:
        assert tb.h_value(1.0, 4.0, s) < 0
    assert tb.find_lxy(4.0, 1.0) == pytest.approx(L, abs=1e-12)
    near = tb.find_lxy(1.0, 1.0 + 1e-9)
    assert 0 < near < 1
    with pytest.raises(DegenerateError):
        tb.find_lxy(2.0, 2.0)


@given(pos, pos)
def test_find_lxy_symmetric(x, y):
    if x == y:
        return
    assert tb.find_lxy(x, y) == pytest.approx(tb.find_lxy(y, x), abs=2e-12)


def test_g_vanishes_at_zero_and_slope_is_h():
    # the tilde mean ties L = 2 - 2k at t = 1/2
    for k in (0.95, 0.8, 0.6, 0.3):
        L = 2 - 2 * k
        assert tb.g_value(k, 0.5, L, 1.0, 4.0, 0.0) == 0.0
        dq = 1e-7
        assert tb.g_value(k, 0.5, L, 1.0, 4.0, dq) / dq == pytest.approx(tb.h_value(1.0, 4.0, L), abs=1e-5)


def test_tilde_counterexample_pinned():
    q, margin = tb.tilde_counterexample(0.95, 1.0, 4.0)
    assert 0 < q <= 0.5 and margin > 0
    # matrix route reproduces the scalar g
    A = tb.a_xy(1.0, 4.0)
    base = la.op_norm(mn.tilde_mean(A, tb.B_PROJ, 0.95))
    powered = la.op_norm(mn.tilde_mean(la.power(A, q), tb.B_PROJ, 0.95))
    g_matrix = q * math.log(base) - math.log(powered)
    assert g_matrix == pytest.approx(-margin, abs=1e-10)
    assert powered > base**q


def test_tilde_counterexample_range():
    for k in (0.5001, 0.6, 0.75):
        with pytest.raises(RangeError):
            tb.tilde_counterexample(k, 1.0, 4.0)
    with pytest.raises(DegenerateError):
        tb.tilde_counterexample(0.95, 2.0, 2.0)


def test_necessity_scans():
    w = tb.necessity_scan(0.5, 0.5, 1.5, np.logspace(-1, -6, 6))
    assert w is not None and w["lhs"] > w["rhs"] and w["margin"] < 0
    assert tb.necessity_scan(0.5, 0.5, 1.0) is None
    assert tb.necessity_scan(0.0, 0.5, 1.5) is None
    # t(1-k) > 1/2 mirrors to q < 1
    assert tb.necessity_scan(0.1, 0.9, 0.5) is not None


def test_two_var_scan_clean_at_exact_exponents():
    assert tb.two_var_necessity_scan(0.3, 1.0, 1.0) is None
    assert tb.two_var_weight(0.3, 1.0, 1.0) == pytest.approx(0.3)


def test_phi_f_matches_alternative_mean():
    for f in (mn.power_fn(0.4), mn.affine_fn(0.4)):
        for x, y in [(1.0, 4.0), (0.1, 3.0), (5.0, 0.2)]:
            direct = la.op_norm(mn.alternative_mean(tb.a_xy(x, y), tb.B_PROJ, f))
            assert tb.phi_f(f, x, y) == pytest.approx(direct, rel=1e-10)
