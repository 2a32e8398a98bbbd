"""Spectra, compound matrices and log-majorization predicates."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from . import linalg as la
from .errors import SizeError

COMPOUND_MAX = 10_000
_EPS_FLOOR = 64 * np.finfo(float).eps


def eigen_spectrum(M) -> np.ndarray:
    """Eigenvalues of a PSD matrix, descending, clamped at zero."""
    return np.clip(la.eigvalsh(M), 0.0, None)


def singular_spectrum(M) -> np.ndarray:
    return la.singular_values(M)


def compound(M, j: int) -> np.ndarray:
    """j-th compound: all ``j x j`` minors, rows/columns in lexicographic subset order."""
    M = np.asarray(M)
    n = M.shape[0]
    if not 1 <= j <= n:
        raise ValueError(f"compound order {j} outside 1..{n}")
    m = comb(n, j)
    if m > COMPOUND_MAX:
        raise SizeError(f"compound of order {j} for n={n} has dimension {m} > {COMPOUND_MAX}")
    subsets = np.array(list(combinations(range(n), j)))
    # blocks[a, b] = M[subsets[a]][:, subsets[b]]
    blocks = M[subsets[:, None, :, None], subsets[None, :, None, :]]
    return np.linalg.det(blocks)


def top_products_compound(M) -> np.ndarray:
    """``prod_{i<=j} lambda_i`` for j = 1..n via the top eigenvalue of the compounds."""
    n = np.shape(M)[0]
    out = np.empty(n)
    for j in range(1, n + 1):
        out[j - 1] = max(la.eigvalsh(compound(la.hermitian(M), j))[0], 0.0)
    return out


def top_products(M) -> np.ndarray:
    return np.cumprod(eigen_spectrum(M))


@dataclass
class MajorizationVerdict:
    """Outcome of a log-majorization test.

    ``worst_margin`` is normalized so that the weak relation fails exactly
    when it drops below ``-tol``; ``det_margin = -det_rel_err / n`` plays the
    same role for the determinant equality.
    """

    weak_holds: bool
    strong_holds: bool
    products_a: np.ndarray
    products_b: np.ndarray
    worst_margin: float
    det_rel_err: float
    det_margin: float

    @property
    def strong_margin(self) -> float:
        return min(self.worst_margin, self.det_margin)

    def to_dict(self) -> dict:
        return {
            "weakHolds": self.weak_holds,
            "strongHolds": self.strong_holds,
            "partialProductsA": self.products_a.tolist(),
            "partialProductsB": self.products_b.tolist(),
            "worstMargin": self.worst_margin,
            "detRelErr": self.det_rel_err,
        }


def compare_products(pa, pb, tol: float = 1e-9) -> MajorizationVerdict:
    """Verdict from two vectors of leading eigenvalue products.

    The k-th comparison tolerates a relative excess of ``k * tol`` plus a
    roundoff floor ``eps * lambda_1 * p_{k-1}``, so trailing zero products
    compare as 0 <= anything.
    """
    pa = np.asarray(pa, dtype=float)
    pb = np.asarray(pb, dtype=float)
    n = len(pa)
    ks = np.arange(1, n + 1)
    prev = np.concatenate(([1.0], np.maximum(pa, pb)[:-1]))
    floor = _EPS_FLOOR * max(pa[0], pb[0]) * prev
    margins = (pb + floor - pa) / (ks * np.maximum(pb, 1e-300))
    margins = np.minimum(margins, 1.0)
    weak = bool(np.all(pa <= (1 + ks * tol) * pb + floor))
    da, db = pa[-1], pb[-1]
    if max(da, db) <= floor[-1]:
        det_err = 0.0
    else:
        det_err = float(abs(da - db) / max(da, db))
    strong = weak and det_err <= n * tol
    return MajorizationVerdict(weak, strong, pa, pb, float(margins.min()), det_err, -det_err / n)


def log_majorize(A, B, tol: float = 1e-9) -> MajorizationVerdict:
    """Is ``A`` (weakly) log-majorized by ``B``? Both PSD, same dimension."""
    if np.shape(A) != np.shape(B):
        raise ValueError("dimension mismatch")
    return compare_products(top_products(A), top_products(B), tol)


def log_majorize_compound(A, B, tol: float = 1e-9) -> MajorizationVerdict:
    """Same verdict computed through top eigenvalues of compound matrices."""
    return compare_products(top_products_compound(A), top_products_compound(B), tol)


def singular_dominance(A, B, tol: float = 1e-9) -> np.ndarray:
    """Boolean vector ``s_j(A) <= (1 + tol) s_j(B)`` for each j."""
    sa = singular_spectrum(A)
    sb = singular_spectrum(B)
    floor = _EPS_FLOOR * max(sb[0], sa[0])
    return sa <= (1 + tol) * sb + floor
