import json

import numpy as np
import pytest
import scipy.linalg as sla
from conftest import assert_close, pd_pair
from hypothesis import given
from hypothesis import strategies as st

from mml import linalg as la
from mml import means as mn
from mml import twobytwo as tb
from mml.errors import CatalogError, DomainError, SpecError

seeds = st.integers(0, 2**32 - 1)
unit = st.floats(0.05, 0.95)


# independent implementation through scipy
def sp_pow(M, a):
    w, V = np.linalg.eigh(M)
    return (V * w**a) @ V.conj().T


def sp_geom(A, B, t):
    Ah = sla.sqrtm(A)
    Aih = np.linalg.inv(Ah)
    return Ah @ sp_pow(Aih @ B @ Aih, t) @ Ah


def sp_fktl(A, B, k, t, L):
    G = sp_pow(sp_geom(np.linalg.inv(A), B, k), t)
    return G @ sp_pow(A, L) @ G


# --------------------------------------------------------------------------
# catalog and spec
# --------------------------------------------------------------------------


@pytest.mark.parametrize("fn", [mn.power_fn(0.3), mn.affine_fn(0.7), mn.ScalarMonotoneFn("identity"), mn.ScalarMonotoneFn("one")])
def test_catalog_normalized_and_monotone(fn):
    assert float(fn(1.0)) == pytest.approx(1.0, abs=1e-15)
    grid = np.linspace(0, 1e3, 5001)
    assert np.all(np.diff(fn(grid)) >= 0)
    assert mn.ScalarMonotoneFn.from_dict(fn.to_dict()) == fn


def test_catalog_rejections():
    with pytest.raises(CatalogError):
        mn.ScalarMonotoneFn("log")
    with pytest.raises(CatalogError):
        mn.power_fn(1.5)
    with pytest.raises(DomainError):
        mn.power_fn(0.5)(-1.0)
    with pytest.raises(CatalogError):
        mn.alternative_mean(np.eye(2), np.eye(2), np.sqrt)


def test_mean_spec_validation():
    with pytest.raises(SpecError):
        mn.MeanSpec("fkt", k=0.3)
    with pytest.raises(SpecError):
        mn.MeanSpec("natural", t=1.5)
    with pytest.raises(SpecError):
        mn.MeanSpec("tilde", k=1.0)
    with pytest.raises(SpecError):
        mn.MeanSpec("fktl", k=0.3, t=0.3, L=-1.0)
    with pytest.raises(SpecError):
        mn.MeanSpec("harmonic", t=0.5)


@given(st.floats(0.01, 0.99), st.floats(0.0, 1.0))
def test_fkt_homogeneity_identity(k, t):
    L = mn.homogeneous_l(k, t)
    assert -2 * t + 4 * k * t + L == pytest.approx(1.0, abs=1e-14)
    assert mn.fkt(k, t).homogeneous
    if L > 0:
        assert mn.MeanSpec("fktl", k=k, t=t, L=L).homogeneous


def test_mean_spec_json():
    spec = mn.fkt(0.3, 0.5)
    assert spec.to_dict() == {"kind": "fkt", "k": 0.3, "t": 0.5}
    assert mn.MeanSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec
    alt = mn.MeanSpec("alt", fn=mn.affine_fn(0.4))
    assert mn.MeanSpec.from_dict(alt.to_dict()) == alt
    assert not mn.MeanSpec("fktl", k=0.3, t=0.3, L=1.0).homogeneous


# --------------------------------------------------------------------------
# weighted geometric mean
# --------------------------------------------------------------------------


def test_geom_examples(rng):
    assert_close(mn.geom_mean(np.diag([4.0, 1.0]), np.diag([1.0, 4.0]), 0.5), 2 * np.eye(2))
    A = la.random_pd(4, rng)
    assert_close(mn.geom_mean(A, A, 0.37), A, 1e-12)


@pytest.mark.parametrize("x,y", [(1.0, 4.0), (0.3, 7.0), (2.0, 1e-3)])
@pytest.mark.parametrize("k", [0.2, 0.5, 0.9])
def test_geom_on_family(x, y, k):
    expected = (4 * x * y / (x + y)) ** (1 - k) * tb.B_PROJ
    assert_close(mn.geom_mean(tb.a_xy(x, y), tb.B_PROJ, k), expected, 1e-10, 1e-14)


@given(seeds, st.integers(1, 5), unit)
def test_geom_against_scipy_and_endpoints(seed, n, t):
    A, B = pd_pair(seed, n)
    G = mn.geom_mean(A, B, t)
    assert_close(G, sp_geom(A, B, t), 1e-9)
    assert_close(mn.geom_mean(A, B, 0.0), A, 1e-12)
    assert_close(mn.geom_mean(A, B, 1.0), B, 1e-9)
    assert_close(G, mn.geom_mean(B, A, 1 - t), 1e-9)


@given(seeds, st.integers(1, 5))
def test_geometric_mean_riccati(seed, n):
    # A # B is the positive solution of X A^{-1} X = B
    A, B = pd_pair(seed, n)
    X = mn.geom_mean(A, B, 0.5)
    assert_close(X @ la.inv(A) @ X, B, 1e-9)


# --------------------------------------------------------------------------
# spectral family
# --------------------------------------------------------------------------


@given(seeds, st.integers(1, 5), unit, unit, st.floats(0.2, 2.0))
def test_fktl_against_scipy(seed, n, k, t, L):
    A, B = pd_pair(seed, n)
    assert_close(mn.fktl_mean(A, B, k, t, L), sp_fktl(A, B, k, t, L), 1e-8)


@given(seeds, st.integers(1, 5), unit)
def test_family_coincidences(seed, n, t):
    A, B = pd_pair(seed, n)
    assert_close(mn.fkt_mean(A, B, 0.5, t), mn.natural_mean(A, B, t), 1e-10)
    assert_close(mn.fkt_mean(A, B, t, 0.5), mn.tilde_mean(A, B, t), 1e-10)
    assert_close(mn.alternative_mean(A, B, mn.power_fn(t)), mn.natural_mean(A, B, t), 1e-9)
    assert_close(mn.wasserstein_mean(A, B, t), mn.wasserstein_closed_form(A, B, t), 1e-9)


@given(seeds, st.integers(1, 5), unit, unit)
def test_commuting_closed_form(seed, n, k, t):
    A, B = la.random_commuting_pair(n, np.random.default_rng(seed))
    w = 2 * k * t
    assert_close(mn.fkt_mean(A, B, k, t), la.power(A, 1 - w) @ la.power(B, w), 1e-9)


@given(seeds, st.integers(1, 5), unit, unit)
def test_joint_scaling(seed, n, k, t):
    A, B = pd_pair(seed, n)
    w = 2 * k * t
    F = mn.fkt_mean(A, B, k, t)
    assert_close(mn.fkt_mean(3 * A, 5 * B, k, t), 3 ** (1 - w) * 5**w * F, 1e-9)


@pytest.mark.parametrize("k,t", [(0.25, 0.25), (0.5, 0.5), (0.3, 0.8), (0.9, 0.2)])
def test_fkt_on_scaled_identity_and_projection(k, t):
    L = mn.homogeneous_l(k, t)
    F = mn.mean_apply(mn.fkt(k, t), 2 * np.eye(2), tb.B_PROJ)
    assert_close(F, 2 ** (L + 2 * t * (k - 1)) * tb.B_PROJ, 1e-12)
    assert la.op_norm(F) == pytest.approx(2 ** (1 - 2 * k * t), rel=1e-12)
    assert la.op_norm(F) == pytest.approx(tb.phi_value(k, t, L, 1.0, 1.0), rel=1e-12)


@given(seeds, st.integers(1, 5), unit, unit)
def test_self_duality_and_unitary_congruence(seed, n, k, t):
    rng = np.random.default_rng(seed)
    A, B = la.random_pd(n, rng), la.random_pd(n, rng)
    F = mn.fkt_mean(A, B, k, t)
    assert_close(mn.fkt_mean(la.inv(A), la.inv(B), k, t), la.inv(F), 1e-9)
    U = la.random_unitary(n, rng)
    Uh = U.conj().T
    assert_close(Uh @ F @ U, mn.fkt_mean(Uh @ A @ U, Uh @ B @ U, k, t), 1e-10)


@given(seeds, st.integers(1, 5), unit)
def test_natural_transposition(seed, n, t):
    A, B = pd_pair(seed, n)
    assert_close(mn.natural_mean(A, B, t), mn.natural_mean(B, A, 1 - t), 1e-10)


def test_tilde_non_transposition_witness():
    A, B = mn.TILDE_TRANSPOSITION_WITNESS
    assert mn.transposition_gap(A, B, 0.25) > 1e-3


@given(seeds, st.integers(1, 6))
def test_spectral_property(seed, n):
    A, B = pd_pair(seed, n)
    S = mn.natural_mean(A, B, 0.5)
    lhs = np.sort(la.eigvalsh(S @ S))
    rhs = np.sort(np.linalg.eigvals(A @ B).real)
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=0)


@given(seeds, st.integers(1, 6), unit, unit)
def test_determinant_identity(seed, n, k, t):
    A, B = pd_pair(seed, n)
    L = mn.homogeneous_l(k, t)
    lhs = np.linalg.slogdet(mn.fkt_mean(A, B, k, t))[1]
    rhs = ((k - 1) * 2 * t + L) * np.linalg.slogdet(A)[1] + 2 * k * t * np.linalg.slogdet(B)[1]
    assert abs(np.expm1(lhs - rhs)) <= 1e-9


def test_singular_second_argument_matches_perturbation(rng):
    A = la.random_pd(3, rng)
    B = la.random_psd(3, rng, rank=1)
    # fractional powers near 0 make the convergence algebraic, not linear
    for spec in (mn.natural(0.4), mn.tilde(0.3), mn.fkt(0.3, 0.7), mn.MeanSpec("wasserstein", t=0.5)):
        exact = mn.mean_apply(spec, A, B)
        errs = [la.op_norm(exact - mn.mean_apply_perturbed(spec, A, B, e)) for e in (1e-4, 1e-6, 1e-8, 1e-10, 1e-12)]
        assert np.all(np.diff(errs) < 0)
        assert errs[-1] < 0.5 * errs[1]


# --------------------------------------------------------------------------
# Riccati, sandwich, similarity
# --------------------------------------------------------------------------


def test_riccati_examples(rng):
    A = la.random_pd(3, rng)
    assert mn.riccati_residual(0.3, 0.6, A, A) <= 1e-12 * la.op_norm(A)
    A, B = la.random_pd(4, rng), la.random_pd(4, rng)
    G = la.power(mn.geom_mean(la.inv(A), B, 0.3), 0.6)
    assert mn.riccati_residual(0.3, 0.6, A, B) <= 1e-9 * la.op_norm(G)
    A, B = tb.a_xy(1, 4), tb.B_PROJ + 1e-3 * np.eye(2)
    G = la.power(mn.geom_mean(la.inv(A), B, 0.3), 0.6)
    assert mn.riccati_residual(0.3, 0.6, A, B) <= 1e-8 * la.op_norm(G)


def test_harmonic_bounds_identity():
    lower, upper, ok = mn.harmonic_bounds(0.3, 0.4, np.eye(3), np.eye(3))
    assert ok
    assert_close(lower, np.eye(3), 1e-12)
    assert_close(upper, np.eye(3), 1e-12)


@given(seeds, st.integers(1, 4), unit, unit)
def test_harmonic_bounds_commuting_scalar_oracle(seed, n, k, t):
    rng = np.random.default_rng(seed)
    a, b = np.exp(rng.uniform(-1, 1, size=(2, n)))
    L = mn.homogeneous_l(k, t)
    w = 2 * k * t
    lower_s = 2 * ((1 - k) * a + k / b) ** (-t) - a ** (-L)
    assert np.all(lower_s <= a ** (1 - w) * b**w * (1 + 1e-12))
    lower, _, _ = mn.harmonic_bounds(k, t, np.diag(a), np.diag(b))
    assert np.allclose(np.diag(lower).real, lower_s, rtol=1e-10)


def test_harmonic_sandwich_random(rng):
    seen = 0
    for _ in range(200):
        A, B = la.random_pd(3, rng, 1.0), la.random_pd(3, rng, 1.0)
        lower, upper, ok = mn.harmonic_bounds(0.3, 0.4, A, B)
        if not ok:
            continue
        seen += 1
        F = mn.fkt_mean(A, B, 0.3, 0.4)
        assert la.loewner_leq(lower, F)[1] >= -1e-10
        assert la.loewner_leq(F, upper)[1] >= -1e-10
    assert seen > 0


def test_positive_similarity_examples(rng):
    A = la.random_pd(3, rng)
    assert mn.positive_similarity_witness(0.3, 0.6, A, A)[1]
    assert mn.positive_similarity_witness(1 / 3, 1 / 3, np.diag([4.0, 1.0]), np.diag([9.0, 16.0]))[1]
    A, B = la.random_pd(5, rng), la.random_pd(5, rng)
    U, ok = mn.positive_similarity_witness(0.3, 0.6, A, B)
    assert ok
    assert np.linalg.norm(U.conj().T @ U - np.eye(5), 2) <= 1e-10


def test_geometric_mean_unitary(rng):
    A, B = la.random_pd(4, rng), la.random_pd(4, rng)
    U = mn.geometric_mean_unitary(A, B)
    assert np.linalg.norm(U.conj().T @ U - np.eye(4), 2) <= 1e-10
    assert_close(la.power(A, 0.5) @ U @ la.power(B, 0.5), mn.geom_mean(A, B, 0.5), 1e-9)
