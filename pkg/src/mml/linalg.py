"""Dense Hermitian linear algebra.

Matrices are plain complex ``ndarray`` objects. The helpers ``hermitian``,
``as_pd`` and ``as_psd`` validate and symmetrize them; every matrix function
goes through a full Hermitian eigendecomposition.
"""

import json
import os
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConditioningError, ConvergenceFailure, DomainError

HERMITIAN_TOL = 1e-12
PD_TOL = 1e-12  # relative to the operator norm
PSD_TOL = 1e-10
COND_MAX = 1e12
ROUNDOFF = 64 * np.finfo(float).eps  # relative to the operator norm

_DEBUG = bool(os.environ.get("MML_DEBUG"))


class EigenSystem(NamedTuple):
    """Eigenvalues sorted descending and the matching unitary eigenvector matrix."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian(M) -> np.ndarray:
    """Return ``(M + M*)/2`` as a complex square array.

    Raises ``ValueError`` when ``M`` is not square or is far from Hermitian.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {M.shape}")
    H = 0.5 * (M + M.conj().T)
    scale = 1.0 + np.abs(M).max()
    if np.abs(M - H).max() > 1e-8 * scale:
        raise ValueError("matrix is not Hermitian")
    return H


def sym(M) -> np.ndarray:
    """``(M + M*)/2`` without the Hermitian check, for products that are Hermitian by construction."""
    M = np.asarray(M, dtype=complex)
    return 0.5 * (M + M.conj().T)


def eig(M) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    H = hermitian(M)
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    w = w[::-1].copy()
    V = V[:, ::-1].copy()
    if _DEBUG:
        n = H.shape[0]
        norm = np.abs(w).max()
        assert np.linalg.norm(V.conj().T @ V - np.eye(n), 2) <= 1e-10
        assert np.linalg.norm((V * w) @ V.conj().T - H, 2) <= 1e-10 * (1 + norm)
    return EigenSystem(w, V)


def eigvalsh(M) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, descending."""
    try:
        return np.linalg.eigvalsh(hermitian(M))[::-1].copy()
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def _reassemble(es: EigenSystem, fvals) -> np.ndarray:
    V = es.vectors
    return sym((V * fvals) @ V.conj().T)


def _snap(w: np.ndarray) -> np.ndarray:
    # eigenvalues within solver roundoff of zero are zero, so that 0**t == 0 survives
    cut = ROUNDOFF * np.abs(w).max()
    return np.where(w > cut, w, 0.0)


def _clamped(es: EigenSystem) -> np.ndarray:
    w = es.values
    norm = np.abs(w).max()
    if w[-1] < -PSD_TOL * max(norm, 1e-300):
        raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {w[-1]:.3e})")
    return _snap(w)


def _check_pd(es: EigenSystem, what="matrix"):
    w = es.values
    if w[-1] <= 0:
        raise DomainError(f"{what} is not positive definite (min eigenvalue {w[-1]:.3e})")
    # eps_pd = PD_TOL * ||M|| coincides with the condition guard, which is the more specific report
    if w[0] / w[-1] > COND_MAX or w[-1] <= PD_TOL * w[0]:
        raise ConditioningError(f"{what} condition number {w[0] / w[-1]:.3e} exceeds {COND_MAX:.0e}")


def as_pd(M) -> np.ndarray:
    """Validate a positive definite matrix and return its Hermitian part."""
    H = hermitian(M)
    _check_pd(eig(H))
    return H


def as_psd(M) -> np.ndarray:
    H = hermitian(M)
    _clamped(eig(H))
    return H


def min_eig(M) -> float:
    return float(eigvalsh(M)[-1])


def apply_fn(M, f: Callable[[np.ndarray], np.ndarray], *, pd: bool = False, psd_known: bool = False) -> np.ndarray:
    """Functional calculus ``U diag(f(lambda)) U*``.

    Eigenvalues are clamped at zero (PSD convention). With ``pd=True`` the
    matrix must be positive definite, which is required for ``log`` and
    negative powers. ``psd_known=True`` skips the PSD check for matrices that
    are PSD by construction (congruences of PSD matrices), whose negative
    eigenvalues are pure roundoff.
    """
    es = eig(M)
    if pd:
        _check_pd(es)
        w = es.values
    elif psd_known:
        w = _snap(es.values)
    else:
        w = _clamped(es)
    with np.errstate(divide="ignore", invalid="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise DomainError("function evaluated outside its domain")
    return _reassemble(es, fw)


def _pow(w, a):
    # 0**a == 0 for a > 0
    return np.where(w > 0, np.abs(w), 0.0) ** a


def power(M, a: float) -> np.ndarray:
    """Real power of a PSD matrix; negative exponents need a PD matrix."""
    a = float(a)
    if a == 0.0:
        return np.eye(np.shape(M)[0], dtype=complex)
    if a == 1.0:
        return as_psd(M)
    return apply_fn(M, lambda w: _pow(w, a), pd=a < 0)


def psd_power(M, a: float) -> np.ndarray:
    """``M^a`` for ``a >= 0`` and ``M`` PSD by construction (see ``apply_fn``)."""
    if a < 0:
        raise DomainError("psd_power needs a nonnegative exponent")
    if a == 0:
        return np.eye(np.shape(M)[0], dtype=complex)
    return apply_fn(M, lambda w: _pow(w, a), psd_known=True)


def powers(M, *exponents) -> list:
    """Several powers of one matrix from a single eigendecomposition."""
    es = eig(M)
    if any(a < 0 for a in exponents):
        _check_pd(es)
        w = es.values
    else:
        w = _clamped(es)
    return [np.eye(len(w), dtype=complex) if a == 0 else _reassemble(es, _pow(w, a)) for a in exponents]


def inv(M) -> np.ndarray:
    return power(M, -1.0)


def sqrtm(M) -> np.ndarray:
    return power(M, 0.5)


def expm(H) -> np.ndarray:
    es = eig(H)
    return _reassemble(es, np.exp(es.values))


def logm(M) -> np.ndarray:
    es = eig(M)
    _check_pd(es, "logm argument")
    return _reassemble(es, np.log(es.values))


def singular_values(M) -> np.ndarray:
    return np.linalg.svd(np.asarray(M, dtype=complex), compute_uv=False)


def op_norm(M) -> float:
    return float(singular_values(M)[0])


def ky_fan_norm(M, j: int) -> float:
    s = singular_values(M)
    if not 1 <= j <= len(s):
        raise ValueError(f"Ky Fan index {j} outside 1..{len(s)}")
    return float(s[:j].sum())


def ky_fan_norms(M) -> np.ndarray:
    """All Ky Fan norms ``(||M||_(1), ..., ||M||_(n))``."""
    return np.cumsum(singular_values(M))


def schatten_norm(M, p: float) -> float:
    s = singular_values(M)
    if np.isinf(p):
        return float(s[0])
    if p < 1:
        raise ValueError("Schatten index must be >= 1")
    return float((s**p).sum() ** (1.0 / p))


def loewner_leq(A, B, tol: float = 1e-10) -> tuple[bool, float]:
    """Test ``A <= B`` in the Loewner order.

    Returns
    -------
    holds : bool
        ``lambda_min(B - A) >= -tol * (1 + ||B - A||)``.
    margin : float
        ``lambda_min(B - A)``.
    """
    w = eigvalsh(hermitian(B) - hermitian(A))
    scale = 1.0 + np.abs(w).max()
    return bool(w[-1] >= -tol * scale), float(w[-1])


# --------------------------------------------------------------------------
# random generation
# --------------------------------------------------------------------------


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(n: int, rng) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a complex Ginibre matrix."""
    rng = as_rng(rng)
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_pd(n: int, rng, c: float = 2.0) -> np.ndarray:
    """Random PD matrix with eigenvalues log-uniform on ``[e^-c, e^c]``."""
    rng = as_rng(rng)
    U = random_unitary(n, rng)
    w = np.exp(rng.uniform(-c, c, size=n))
    return sym((U * w) @ U.conj().T)


def random_psd(n: int, rng, rank: int, c: float = 2.0) -> np.ndarray:
    rng = as_rng(rng)
    U = random_unitary(n, rng)
    w = np.exp(rng.uniform(-c, c, size=n))
    w[rank:] = 0.0
    return sym((U * w) @ U.conj().T)


def random_hermitian(n: int, rng, scale: float = 1.0) -> np.ndarray:
    rng = as_rng(rng)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return hermitian(scale * (Z + Z.conj().T) / 2)


def random_commuting_pair(n: int, rng, c: float = 2.0):
    rng = as_rng(rng)
    U = random_unitary(n, rng)
    a = np.exp(rng.uniform(-c, c, size=n))
    b = np.exp(rng.uniform(-c, c, size=n))
    return sym((U * a) @ U.conj().T), sym((U * b) @ U.conj().T)


def random_ordered_pair(n: int, rng, c: float = 2.0, c_floor: float = 0.0):
    """Return ``(A, B)`` with ``0 <= B <= A`` and ``A`` invertible.

    ``B = A^{1/2} C A^{1/2}`` for a random ``c_floor I <= C <= I``.
    """
    rng = as_rng(rng)
    A = random_pd(n, rng, c)
    U = random_unitary(n, rng)
    C = sym((U * rng.uniform(c_floor, 1.0, size=n)) @ U.conj().T)
    Ah = power(A, 0.5)
    return A, sym(Ah @ C @ Ah)


# --------------------------------------------------------------------------
# JSON matrix exchange: {"n": int, "re": [[...]], "im": [[...]]}
# --------------------------------------------------------------------------


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"n": int(M.shape[0]), "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, str):
        obj = json.loads(obj)
    n = int(obj["n"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros((n, n))), dtype=float)
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(f"matrix payload does not match n={n}")
    return re + 1j * im


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def save_matrix(M, path):
    with open(path, "w") as fh:
        json.dump(matrix_to_json(M), fh)
