"""Unitarily invariant norm inequalities, tested in every Ky Fan norm.

By Fan dominance the Ky Fan family decides all unitarily invariant norms, so
each comparison is a vector of ``n`` relative gaps.
"""

from __future__ import annotations

import numpy as np

from .. import linalg as la
from .. import means as mn
from ..errors import SpecError
from .ando_hiai import fkt_threshold
from .logmaj import P, log_euclid, sandwich
from .report import Outcome, register, run_check
from .sampling import draw_n

NORM_KINDS = ("kyfan", "schatten-1", "schatten-2", "schatten-inf")


def norm_vector(M, kind: str = "kyfan") -> np.ndarray:
    if kind == "kyfan":
        return la.ky_fan_norms(M)
    p = {"schatten-1": 1, "schatten-2": 2, "schatten-inf": np.inf}[kind]
    return np.array([la.schatten_norm(M, p)])


def rel_gap(small, big) -> float:
    """``min_j (big_j - small_j) / big_j``; negative when ``small`` exceeds ``big`` somewhere."""
    small, big = np.asarray(small), np.asarray(big)
    return float(np.min((big - small) / np.maximum(big, 1e-300)))


def p_sequence(k: float, t: float, p0: float, m: int) -> list:
    """``p_0, p_1 = c p_0, ..., p_m`` with ``c = 2ktL / (1 - 2kt)``."""
    c = fkt_threshold(k, t)
    return [p0 * c**i for i in range(m + 1)]


def norm_sequence(k, t, A, B, ps, kind="kyfan"):
    """Norms of ``F_{k,t}(A^p, B^p)^{1/p}`` along ``ps`` and of the log-Euclidean limit."""
    rows = [norm_vector(P(mn.fkt_mean(P(A, p), P(B, p), k, t), 1 / p), kind) for p in ps]
    limit = norm_vector(log_euclid(A, B, 2 * k * t), kind)
    return np.array(rows), limit


def _sample_pair(params, rng, index):
    n = draw_n(params, rng)
    c = params.get("c", 1.0)
    if params.get("family") == "commuting":
        A, B = la.random_commuting_pair(n, rng, c)
    else:
        A, B = la.random_pd(n, rng, c), la.random_pd(n, rng, c)
    return {"A": A, "B": B}


def _eval_sequence(params, inp):
    k, t = params["k"], params["t"]
    ps = p_sequence(k, t, params["p0"], params["m"])
    rows, limit = norm_sequence(k, t, inp["A"], inp["B"], ps, params.get("norm", "kyfan"))
    steps = [rel_gap(rows[i + 1], rows[i]) for i in range(len(rows) - 1)]
    bound = rel_gap(limit, rows[-1])
    margin = min(steps + [bound])
    extra = {"p": ps, "stepMargins": steps, "limitMargin": bound, "first": rows[0].tolist(), "limit": limit.tolist()}
    return Outcome(margin, float(rows[-1][0]), float(limit[0]), extra)


register("norm-sequence", _sample_pair, _eval_sequence)


def check_norm_sequence(k, t, p0=2.0, m=6, trials=100, seed=0, n=(2, 6), norm="kyfan", family="random", tol=1e-9, jobs=1, inputs=None):
    """``p_m = (2ktL/(1-2kt)) p_{m-1}``: norms of ``F(A^{p_m}, B^{p_m})^{1/p_m}`` are nonincreasing
    and stay above the norm of ``exp((1-2kt) log A + 2kt log B)``."""
    if norm not in NORM_KINDS:
        raise SpecError(f"unknown norm {norm!r}; choose from {', '.join(NORM_KINDS)}")
    fkt_threshold(k, t)
    if m < 0 or not p0 > 0:
        raise SpecError("need m >= 0 and p0 > 0")
    params = {"k": k, "t": t, "p0": p0, "m": m, "n": list(n), "norm": norm, "family": family}
    return run_check("norm-sequence", params, trials, seed, tol, jobs, inputs)


# --------------------------------------------------------------------------
# refinement of the three-norm chain
# --------------------------------------------------------------------------


def uab_chain(A, B, t, p, mean="natural", k=None, variant="derived"):
    """Four members, ascending in every unitarily invariant norm.

    With ``mean="tilde"`` the spectral mean is replaced by ``~#_k`` and ``t``
    by ``k`` throughout. For ``k > 1/2`` the ``derived`` variant uses
    ``(B^p ~#_{1-k} A^p)^{1/p}``, the member that the ``[1/2, 1)`` log-majorization
    chain produces; ``literal`` keeps ``(A^p ~#_k B^p)^{1/p}``.
    """
    w = k if mean == "tilde" else t
    if mean == "tilde" and k > 0.5 and variant == "derived":
        mid = ("(B^p ~#_{1-k} A^p)^{1/p}", P(mn.tilde_mean(P(B, p), P(A, p), 1 - k), 1 / p))
    elif mean == "tilde":
        mid = ("(A^p ~#_k B^p)^{1/p}", P(mn.tilde_mean(P(A, p), P(B, p), k), 1 / p))
    else:
        mid = ("(A^p nat_t B^p)^{1/p}", P(mn.natural_mean(P(A, p), P(B, p), t), 1 / p))
    first = ("(A^{(1-t)p/2} B^{tp} A^{(1-t)p/2})^{1/p}", sandwich(A, (1 - w) * p / 2, B, w * p, 1 / p))
    inner = ("(A^{p/2} B^{tp/(1-t)} A^{p/2})^{(1-t)/p}", sandwich(A, p / 2, B, w * p / (1 - w), (1 - w) / p))
    outer = ("(A^{(1-t)p/(2t)} B^p A^{(1-t)p/(2t)})^{t/p}", sandwich(A, (1 - w) * p / (2 * w), B, p, w / p))
    chains = []
    if w <= 0.5:
        chains.append([first, inner, mid, outer])
    if w >= 0.5:
        chains.append([first, outer, mid, inner])
    return chains


def _eval_uab(params, inp):
    chains = uab_chain(
        inp["A"], inp["B"], params.get("t"), params["p"], params.get("mean", "natural"), params.get("k"), params.get("variant", "derived")
    )
    links = []
    worst = (np.inf, 0.0, 0.0)
    for chain in chains:
        vals = [(label, la.ky_fan_norms(M)) for label, M in chain]
        for (la_, a), (lb, b) in zip(vals, vals[1:]):
            gaps = (b - a) / np.maximum(b, 1e-300)
            j = int(np.argmin(gaps))
            links.append({"link": f"{la_} <= {lb}", "margin": float(gaps[j])})
            if gaps[j] < worst[0]:
                worst = (float(gaps[j]), float(a[j]), float(b[j]))
    return Outcome(worst[0], worst[1], worst[2], {"links": links})


register("uab", _sample_pair, _eval_uab)


def _summ_uab(outcomes):
    out = {}
    for o in outcomes:
        for d in o.extra["links"]:
            out[d["link"]] = min(out.get(d["link"], np.inf), d["margin"])
    return {"linkWorstMargins": out}


def check_uab_refinement(t=None, p=1.0, mean="natural", k=None, variant="derived", trials=500, seed=0, n=(2, 6), family="random", tol=1e-9, jobs=1, inputs=None):
    """Three-norm refinement chain in every Ky Fan norm, for the spectral or the tilde mean."""
    w = k if mean == "tilde" else t
    if mean not in ("natural", "tilde") or w is None or not 0 < w < 1:
        raise SpecError("uab needs mean 'natural' with t in (0, 1) or 'tilde' with k in (0, 1)")
    if not p > 0:
        raise SpecError("p must be positive")
    params = {"p": p, "mean": mean, "n": list(n), "family": family}
    params["k" if mean == "tilde" else "t"] = w
    if mean == "tilde":
        params["variant"] = variant
    return run_check("uab", params, trials, seed, tol, jobs, inputs, summarize=_summ_uab)
