"""Binary matrix means: weighted geometric, spectral geometric family, alternative means."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import CatalogError, DomainError, SpecError

# --------------------------------------------------------------------------
# scalar operator monotone catalog
# --------------------------------------------------------------------------

FN_TAGS = ("power", "affine", "identity", "one")


@dataclass(frozen=True)
class ScalarMonotoneFn:
    """Normalized operator monotone function from a closed catalog.

    ``power``: x^t, ``affine``: 1 - t + t x, ``identity``: x, ``one``: 1.
    """

    tag: str
    t: float | None = None

    def __post_init__(self):
        if self.tag not in FN_TAGS:
            raise CatalogError(f"unknown function tag {self.tag!r}; catalog is {FN_TAGS}")
        if self.tag in ("power", "affine"):
            if self.t is None or not 0.0 < self.t < 1.0:
                raise CatalogError(f"{self.tag} needs t in (0, 1), got {self.t}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("catalog functions are defined on [0, inf)")
        if self.tag == "power":
            return np.where(x > 0, x, 0.0) ** self.t
        if self.tag == "affine":
            return 1.0 - self.t + self.t * x
        if self.tag == "identity":
            return x.copy()
        return np.ones_like(x)

    @property
    def trivial(self) -> bool:
        return self.tag in ("identity", "one")

    def to_dict(self) -> dict:
        d = {"tag": self.tag}
        if self.t is not None:
            d["t"] = self.t
        return d

    @classmethod
    def from_dict(cls, d) -> "ScalarMonotoneFn":
        return cls(d["tag"], d.get("t"))


def power_fn(t) -> ScalarMonotoneFn:
    return ScalarMonotoneFn("power", t)


def affine_fn(t) -> ScalarMonotoneFn:
    return ScalarMonotoneFn("affine", t)


# --------------------------------------------------------------------------
# mean specification
# --------------------------------------------------------------------------

KINDS = ("geom", "natural", "tilde", "fkt", "fktl", "wasserstein", "alt")


def homogeneous_l(k: float, t: float) -> float:
    """Exponent L = 1 + 2t - 4kt making F_{k,t,L} jointly homogeneous."""
    return 1.0 + 2.0 * t - 4.0 * k * t


@dataclass(frozen=True)
class MeanSpec:
    """Selects one mean.

    kinds: ``geom`` (t), ``natural`` (t), ``tilde`` (k), ``fkt`` (k, t),
    ``fktl`` (k, t, L), ``wasserstein`` (t), ``alt`` (fn).
    """

    kind: str
    k: float | None = None
    t: float | None = None
    L: float | None = None
    fn: ScalarMonotoneFn | None = field(default=None)

    def __post_init__(self):
        kind = self.kind
        if kind not in KINDS:
            raise SpecError(f"unknown mean kind {kind!r}")
        need = {
            "geom": ("t",),
            "natural": ("t",),
            "tilde": ("k",),
            "fkt": ("k", "t"),
            "fktl": ("k", "t", "L"),
            "wasserstein": ("t",),
            "alt": (),
        }[kind]
        for name in need:
            if getattr(self, name) is None:
                raise SpecError(f"{kind} mean needs parameter {name}")
        if self.t is not None and not 0.0 <= self.t <= 1.0:
            raise SpecError(f"t must lie in [0, 1], got {self.t}")
        if self.k is not None and not 0.0 < self.k < 1.0:
            raise SpecError(f"k must lie in (0, 1), got {self.k}")
        if self.L is not None and not self.L > 0:
            raise SpecError(f"L must be positive, got {self.L}")
        if kind == "alt" and self.fn is None:
            raise SpecError("alt mean needs a catalog function")

    # F_{k,t,L} parameters for the spectral family
    def fktl_params(self) -> tuple[float, float, float] | None:
        if self.kind == "natural":
            return 0.5, self.t, 1.0
        if self.kind == "tilde":
            return self.k, 0.5, 2.0 * (1.0 - self.k)
        if self.kind == "fkt":
            return self.k, self.t, homogeneous_l(self.k, self.t)
        if self.kind == "fktl":
            return self.k, self.t, self.L
        return None

    @property
    def homogeneous(self) -> bool:
        if self.kind == "fktl":
            return abs(-2 * self.t + 4 * self.k * self.t + self.L - 1.0) <= 1e-12
        return True

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        for name in ("k", "t", "L"):
            v = getattr(self, name)
            if v is not None:
                d[name] = v
        if self.fn is not None:
            d["f"] = self.fn.to_dict()
        return d

    @classmethod
    def from_dict(cls, d) -> "MeanSpec":
        fn = ScalarMonotoneFn.from_dict(d["f"]) if "f" in d else None
        return cls(d["kind"], k=d.get("k"), t=d.get("t"), L=d.get("L"), fn=fn)


def natural(t=0.5) -> MeanSpec:
    return MeanSpec("natural", t=t)


def tilde(k) -> MeanSpec:
    return MeanSpec("tilde", k=k)


def fkt(k, t) -> MeanSpec:
    return MeanSpec("fkt", k=k, t=t)


# --------------------------------------------------------------------------
# core operations
# --------------------------------------------------------------------------


def geom_mean(A, B, t: float) -> np.ndarray:
    """Weighted geometric mean ``A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}``.

    ``A`` must be positive definite, ``B`` may be singular.
    """
    if t == 0:
        return la.as_pd(A)
    Ah, Aih = la.powers(A, 0.5, -0.5)
    X = la.sym(Aih @ la.as_psd(B) @ Aih)
    return la.sym(Ah @ la.psd_power(X, t) @ Ah)


def _inv_geom(A_es_parts, B, k) -> la.EigenSystem:
    """Eigensystem of ``A^{-1} #_k B = A^{-1/2} (A^{1/2} B A^{1/2})^k A^{-1/2}``.

    Written as ``C C*`` with ``C = A^{-1/2} V diag(w^{k/2})``, so an SVD of
    ``C`` gives the eigenvalues with small relative error and an exact null
    space when ``B`` is singular. A plain eigensolve of the product leaves
    roundoff eigenvalues of size ``eps * cond(A)`` that fractional powers blow up.
    """
    Ah, Aih = A_es_parts
    es = la.eig(la.sym(Ah @ la.as_psd(B) @ Ah))
    w = la._snap(es.values)
    C = Aih @ (es.vectors * np.sqrt(w**k))
    U, s, _ = np.linalg.svd(C)
    return la.EigenSystem(la._snap(s * s), U)


def _calc(es: la.EigenSystem, f) -> np.ndarray:
    fw = np.asarray(f(es.values), dtype=float)
    return la.sym((es.vectors * fw) @ es.vectors.conj().T)


def fktl_mean(A, B, k: float, t: float, L: float) -> np.ndarray:
    """``(A^{-1} #_k B)^t A^L (A^{-1} #_k B)^t``."""
    Ah, Aih, AL = la.powers(A, 0.5, -0.5, L)
    G = _calc(_inv_geom((Ah, Aih), B, k), lambda w: la._pow(w, t)) if t > 0 else np.eye(len(AL), dtype=complex)
    return la.sym(G @ AL @ G)


def fkt_mean(A, B, k: float, t: float) -> np.ndarray:
    return fktl_mean(A, B, k, t, homogeneous_l(k, t))


def natural_mean(A, B, t: float = 0.5) -> np.ndarray:
    return fktl_mean(A, B, 0.5, t, 1.0)


def tilde_mean(A, B, k: float) -> np.ndarray:
    return fktl_mean(A, B, k, 0.5, 2.0 * (1.0 - k))


def alternative_mean(A, B, f: ScalarMonotoneFn) -> np.ndarray:
    """``f(A^{-1} # B) A f(A^{-1} # B)`` with ``f`` from the catalog."""
    if not isinstance(f, ScalarMonotoneFn):
        raise CatalogError("alternative means accept catalog functions only")
    Ah, Aih = la.powers(A, 0.5, -0.5)
    fM = _calc(_inv_geom((Ah, Aih), B, 0.5), f)
    return la.sym(fM @ la.hermitian(A) @ fM)


def wasserstein_mean(A, B, t: float) -> np.ndarray:
    return alternative_mean(A, B, affine_fn(t)) if 0 < t < 1 else la.as_psd(B if t == 1 else A)


def mean_apply(spec: MeanSpec, A, B) -> np.ndarray:
    """Evaluate the mean selected by ``spec`` at ``(A, B)``."""
    if spec.kind == "geom":
        return geom_mean(A, B, spec.t)
    if spec.kind == "wasserstein":
        return wasserstein_mean(A, B, spec.t)
    if spec.kind == "alt":
        return alternative_mean(A, B, spec.fn)
    k, t, L = spec.fktl_params()
    return fktl_mean(A, B, k, t, L)


def mean_apply_perturbed(spec: MeanSpec, A, B, eps: float = 1e-8) -> np.ndarray:
    """Same mean with ``B + eps I``; cross-check for singular second arguments."""
    n = np.shape(B)[0]
    return mean_apply(spec, A, la.hermitian(B) + eps * np.eye(n))


def wasserstein_closed_form(A, B, t: float) -> np.ndarray:
    """``(1-t)^2 A + t^2 B + t(1-t)[(AB)^{1/2} + (BA)^{1/2}]`` for PD ``A, B``.

    ``(BA)^{1/2}`` is evaluated as ``A^{-1/2} (A^{1/2} B A^{1/2})^{1/2} A^{1/2}``.
    """
    A = la.hermitian(A)
    B = la.hermitian(B)
    Ah, Aih = la.powers(A, 0.5, -0.5)
    S = la.power(la.sym(Ah @ B @ Ah), 0.5)
    BA = Aih @ S @ Ah
    AB = BA.conj().T
    return la.sym((1 - t) ** 2 * A + t**2 * B + t * (1 - t) * (AB + BA))


def dual_mean(A, B, k: float, t: float) -> np.ndarray:
    """``F_{1-k,t}(B, A)`` taken with the exponent ``L = 1 + 2t - 4kt`` of ``(k, t)``.

    This is the partner of ``F_{k,t}(A, B)`` in the Riccati and similarity
    identities: ``F_{k,t}(A,B) = G A^L G`` and ``F_{1-k,t}(B,A) = G^{-1} B^L G^{-1}``
    share one ``L`` and one ``G = (A^{-1} #_k B)^t``.
    """
    return fktl_mean(B, A, 1 - k, t, homogeneous_l(k, t))


def riccati_residual(k: float, t: float, A, B) -> float:
    """``|| A^{-L} # F_{k,t}(A,B) - (A^{-1} #_k B)^t ||`` in operator norm."""
    L = homogeneous_l(k, t)
    F = fkt_mean(A, B, k, t)
    lhs = geom_mean(la.power(A, -L), F, 0.5)
    rhs = la.power(geom_mean(la.inv(A), B, k), t)
    return la.op_norm(lhs - rhs)


def harmonic_bounds(k: float, t: float, A, B):
    """Arithmetic-harmonic sandwich for ``F_{k,t}(A, B)``.

    Returns ``(lower, upper, applicable)``; ``upper`` is ``None`` when the
    matrix ``2((1-k)A^{-1} + kB)^{-t} - A^L`` is not positive definite.
    """
    L = homogeneous_l(k, t)
    Ainv = la.inv(A)
    Binv = la.inv(B)
    lower = 2 * la.power((1 - k) * la.hermitian(A) + k * Binv, -t) - la.power(A, -L)
    W = la.hermitian(2 * la.power((1 - k) * Ainv + k * la.hermitian(B), -t) - la.power(A, L))
    w = la.eigvalsh(W)
    applicable = bool(w[-1] > la.PD_TOL * max(abs(w[0]), 1.0))
    upper = la.inv(W) if applicable else None
    return la.hermitian(lower), upper, applicable


def geometric_mean_unitary(A, B) -> np.ndarray:
    """Unitary ``U`` with ``A # B = A^{1/2} U B^{1/2}``."""
    Ah, Aih = la.powers(A, 0.5, -0.5)
    Bih = la.power(B, -0.5)
    S = la.power(la.sym(Aih @ la.hermitian(B) @ Aih), 0.5)
    return S @ Ah @ Bih


def positive_similarity_witness(k: float, t: float, A, B, rtol: float = 1e-8):
    """Build the unitary linking ``A^L # B^L`` to ``F_{1-k,t}(B,A)^{1/2} U F_{k,t}(A,B)^{1/2}``.

    Returns ``(U, spectra_match)``. The unitary is assembled from the polar
    factors ``V1 = F^{1/2} G^{-1} A^{-L/2}`` and ``V2 = F~^{1/2} G B^{-L/2}``
    with ``G = (A^{-1} #_k B)^t`` and the geometric-mean unitary ``U0`` of
    ``(B^L, A^L)``: ``U = V2 U0 V1*``.
    """
    L = homogeneous_l(k, t)
    F = fkt_mean(A, B, k, t)
    Ft = dual_mean(A, B, k, t)
    G, Ginv = la.powers(geom_mean(la.inv(A), B, k), t, -t)
    Fh = la.power(F, 0.5)
    Fth = la.power(Ft, 0.5)
    AL, AmL2 = la.powers(A, L, -L / 2)
    BL, BmL2 = la.powers(B, L, -L / 2)
    V1 = Fh @ Ginv @ AmL2
    V2 = Fth @ G @ BmL2
    U0 = geometric_mean_unitary(BL, AL)
    U = V2 @ U0 @ V1.conj().T
    Z = Fth @ U @ Fh
    target = la.eigvalsh(geom_mean(AL, BL, 0.5))
    got = np.linalg.eigvals(Z)
    got = np.sort(got.real)[::-1] if np.abs(got.imag).max() <= rtol * np.abs(got).max() else None
    match = got is not None and bool(np.all(np.abs(got - target) <= rtol * np.abs(target)))
    return U, match


def transposition_gap(A, B, k: float) -> float:
    """``|| A ~#_k B - B ~#_{1-k} A ||``; nonzero in general."""
    return la.op_norm(tilde_mean(A, B, k) - tilde_mean(B, A, 1 - k))


# non-transposition witness for the tilde mean at k = 0.25 (found by search, pinned)
TILDE_TRANSPOSITION_WITNESS = (
    np.array([[2.0, 1.0], [1.0, 2.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, 4.0]], dtype=complex),
)
