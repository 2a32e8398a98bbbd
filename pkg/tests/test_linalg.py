import json

import numpy as np
import pytest
import scipy.linalg as sla
from conftest import assert_close
from hypothesis import given
from hypothesis import strategies as st

from mml import linalg as la
from mml.errors import ConditioningError, DomainError

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 6)


def test_hermitian_symmetrizes_and_rejects():
    M = np.array([[1.0, 2.0 + 1e-14], [2.0, 3.0]])
    H = la.hermitian(M)
    assert np.allclose(H, H.conj().T, atol=0)
    with pytest.raises(ValueError):
        la.hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        la.hermitian(np.ones((2, 3)))


def test_eig_identity_and_diagonal():
    es = la.eig(np.eye(3))
    assert np.allclose(es.values, 1.0)
    assert np.allclose(es.vectors.conj().T @ es.vectors, np.eye(3))
    assert np.allclose(la.eig(np.diag([1.0, 4.0])).values, [4.0, 1.0])


def test_eig_of_family_member():
    es = la.eig([[5.0, 3.0], [3.0, 5.0]])
    assert np.allclose(es.values, [8.0, 2.0], atol=1e-12)


@given(seeds, dims)
def test_eig_invariants(seed, n):
    rng = np.random.default_rng(seed)
    M = la.random_hermitian(n, rng, 3.0)
    es = la.eig(M)
    U, w = es.vectors, es.values
    assert np.all(np.diff(w) <= 0)
    assert np.linalg.norm(U.conj().T @ U - np.eye(n), 2) <= 1e-10
    assert np.linalg.norm((U * w) @ U.conj().T - M, 2) <= 1e-10 * (1 + np.linalg.norm(M, 2))


def test_apply_fn_examples():
    assert_close(la.apply_fn(np.diag([4.0, 1.0]), np.sqrt), np.diag([2.0, 1.0]))
    v = np.array([1.0, 2.0, 2.0]) / 3
    P = np.outer(v, v)
    for t in (0.1, 0.5, 3.0):
        assert_close(la.apply_fn(P, lambda x: x**t), P, 1e-12)
    A = np.array([[5.0, 3.0], [3.0, 5.0]])
    # A_{1,4}^2 = A_{2,32}
    assert_close(la.apply_fn(A, lambda x: x**2), [[34.0, 30.0], [30.0, 34.0]], 1e-13)


def test_apply_fn_domain():
    with pytest.raises(DomainError):
        la.logm(np.diag([1.0, 0.0]))
    with pytest.raises(DomainError):
        la.power(np.diag([1.0, 0.0]), -0.5)
    with pytest.raises(DomainError):
        la.as_psd(np.diag([1.0, -1.0]))


def test_apply_fn_commutes(rng):
    M = la.random_pd(5, rng)
    F = la.apply_fn(M, np.log, pd=True)
    assert np.linalg.norm(F @ M - M @ F, 2) <= 1e-10 * np.linalg.norm(M, 2) * np.linalg.norm(F, 2)


def test_power_examples():
    assert_close(la.power(np.diag([9.0, 4.0]), 0.5), np.diag([3.0, 2.0]))
    assert_close(la.expm(np.zeros((3, 3))), np.eye(3))


@given(seeds, dims)
def test_power_against_scipy(seed, n):
    rng = np.random.default_rng(seed)
    M = la.random_pd(n, rng)
    a = float(rng.uniform(-2, 2))
    assert_close(la.power(M, a), sla.fractional_matrix_power(M, a), 1e-9)


@given(seeds, dims)
def test_power_group_law(seed, n):
    rng = np.random.default_rng(seed)
    M = la.random_pd(n, rng)
    a, b = rng.uniform(-2, 2, size=2)
    assert_close(la.power(M, a) @ la.power(M, b), la.power(M, a + b), 1e-9)
    cond = np.linalg.cond(M)
    assert np.linalg.norm(la.power(M, a) @ la.power(M, -a) - np.eye(n), 2) <= 1e-9 * cond ** abs(a)


@given(seeds, dims)
def test_exp_log_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    H = la.random_hermitian(n, rng)
    assert_close(la.logm(la.expm(H)), H, 1e-9, 1e-12)
    M = la.random_pd(n, rng)
    assert_close(la.expm(la.logm(M)), M, 1e-9)
    assert_close(la.expm(H), sla.expm(H), 1e-10)


def test_conditioning_guard():
    with pytest.raises(ConditioningError):
        la.as_pd(np.diag([1.0, 5e-13]))
    with pytest.raises(ConditioningError):
        la.inv(np.diag([1.0, 1e-13]))
    la.as_pd(np.diag([1.0, 2e-12]))


def test_norm_examples():
    assert la.op_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0)
    assert la.ky_fan_norm(np.diag([3.0, 2.0, 1.0]), 2) == pytest.approx(5.0)
    for n in (1, 3, 6):
        assert la.schatten_norm(np.eye(n), 2) == pytest.approx(np.sqrt(n))


@given(seeds, dims)
def test_norm_relations(seed, n):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    s = np.linalg.svd(M, compute_uv=False)
    assert la.op_norm(M) == pytest.approx(s[0], rel=1e-12)
    assert np.allclose(la.ky_fan_norms(M), np.cumsum(s), rtol=1e-12)
    assert la.ky_fan_norm(M, 1) == pytest.approx(la.op_norm(M), rel=1e-12)
    assert la.schatten_norm(M, 3) == pytest.approx(np.sum(s**3) ** (1 / 3), rel=1e-12)
    assert la.schatten_norm(M, np.inf) == pytest.approx(s[0], rel=1e-12)
    U, V = la.random_unitary(n, rng), la.random_unitary(n, rng)
    assert np.allclose(la.ky_fan_norms(U @ M @ V), la.ky_fan_norms(M), rtol=1e-10)


def test_loewner_examples(rng):
    ok, margin = la.loewner_leq(np.eye(2), 2 * np.eye(2))
    assert ok and margin == pytest.approx(1.0)
    ok, margin = la.loewner_leq(np.diag([1.0, 3.0]), np.diag([2.0, 2.0]))
    assert not ok and margin == pytest.approx(-1.0)
    from mml import means as mn

    for _ in range(20):
        A, B = la.random_pd(4, rng), la.random_pd(4, rng)
        assert la.loewner_leq(mn.geom_mean(A, B, 0.5), (A + B) / 2)[0]


@given(seeds, st.integers(1, 5))
def test_loewner_reflexive_transitive(seed, n):
    rng = np.random.default_rng(seed)
    A = la.random_pd(n, rng)
    P1, P2 = la.random_psd(n, rng, n), la.random_psd(n, rng, n)
    assert la.loewner_leq(A, A)[0]
    B, C = A + P1, A + P1 + P2
    assert la.loewner_leq(A, B)[0] and la.loewner_leq(B, C)[0] and la.loewner_leq(A, C)[0]


def test_random_generators_deterministic():
    a = la.random_pd(4, np.random.default_rng(5))
    b = la.random_pd(4, np.random.default_rng(5))
    assert np.array_equal(a, b)
    s = la.random_pd(1, np.random.default_rng(1))
    assert s.shape == (1, 1) and s[0, 0].real > 0


@given(seeds, st.integers(1, 6), st.floats(0.1, 3.0))
def test_random_pd_spectrum_range(seed, n, c):
    w = la.eigvalsh(la.random_pd(n, np.random.default_rng(seed), c))
    assert np.all(w >= np.exp(-c) * (1 - 1e-10)) and np.all(w <= np.exp(c) * (1 + 1e-10))


@given(seeds, st.integers(1, 6))
def test_random_ordered_pair(seed, n):
    A, B = la.random_ordered_pair(n, np.random.default_rng(seed))
    ok, margin = la.loewner_leq(B, A)
    assert ok and margin >= -1e-12 * la.op_norm(A)
    assert la.min_eig(A) > 0 and la.min_eig(B) >= -1e-12 * la.op_norm(A)


def test_random_unitary_is_unitary(rng):
    U = la.random_unitary(6, rng)
    assert np.linalg.norm(U.conj().T @ U - np.eye(6), 2) <= 1e-12


def test_matrix_json_round_trip(tmp_path, rng):
    M = la.random_pd(3, rng)
    path = tmp_path / "m.json"
    la.save_matrix(M, path)
    data = json.loads(path.read_text())
    assert set(data) == {"n", "re", "im"} and data["n"] == 3
    assert np.array_equal(la.load_matrix(path), M)
    with pytest.raises(ValueError):
        la.matrix_from_json({"n": 2, "re": [[1.0]], "im": [[0.0]]})
