"""Log-majorization theorems and chains, and the Lie-Trotter limit.

Every link ``X <_(log) Y`` is decided twice: from sorted eigenvalue products
and from the top eigenvalues of compound matrices. A disagreement between
the two routes above ``ROUTE_TOL`` counts as a failure of the trial.
"""

from __future__ import annotations

import math

import numpy as np

from .. import linalg as la
from .. import majorization as mj
from .. import means as mn
from ..errors import ConditioningError, SpecError
from .ando_hiai import fkt_threshold, natural_threshold
from .report import Outcome, register, run_check
from .sampling import draw_n

ROUTE_TOL = 1e-8
THEOREMS = ("lmF", "ah", "kah", "lgF", "lmiF-chain", "GT36-refinement", "tilde-chain")

P = la.power


def sandwich(A, a: float, B, b: float, e: float):
    """``(A^a B^b A^a)^e``."""
    Aa = P(A, a)
    return P(la.sym(Aa @ P(B, b) @ Aa), e)


def log_euclid(A, B, w: float):
    """``exp((1-w) log A + w log B)``."""
    return la.expm((1 - w) * la.logm(A) + w * la.logm(B))


def _fkt_p(A, B, k, t, p):
    return P(mn.fkt_mean(P(A, p), P(B, p), k, t), 1 / p)


def _nat_p(A, B, t, p):
    return P(mn.natural_mean(P(A, p), P(B, p), t), 1 / p)


def _tilde_p(A, B, k, p):
    return P(mn.tilde_mean(P(A, p), P(B, p), k), 1 / p)


def _half(x):
    return 0 < x <= 0.5


def _upper_half(x):
    return 0.5 <= x < 1


def lmi_chain_one(A, B, k, t, p):
    """Six members of the chain for ``k, t`` in (0, 1/2], ascending."""
    w = 2 * k * t
    return [
        ("A #_{2kt} B", mn.geom_mean(A, B, w)),
        ("exp((1-2kt)logA + 2kt logB)", log_euclid(A, B, w)),
        ("(A^{(1-2kt)p/2} B^{2ktp} A^{(1-2kt)p/2})^{1/p}", sandwich(A, (1 - w) * p / 2, B, w * p, 1 / p)),
        ("(A^{p/2} B^{2ktp/(1-2kt)} A^{p/2})^{(1-2kt)/p}", sandwich(A, p / 2, B, w * p / (1 - w), (1 - w) / p)),
        ("F_{k,t}(A^p,B^p)^{1/p}", _fkt_p(A, B, k, t, p)),
        ("(A^{(1-2kt)p/(4kt)} B^p A^{(1-2kt)p/(4kt)})^{2kt/p}", sandwich(A, (1 - w) * p / (2 * w), B, p, w / p)),
    ]


def lmi_chain_two(A, B, k, t, p):
    """Six members of the chain for ``k, t`` in [1/2, 1), ascending."""
    u = (1 - k) * (1 - t)
    v = 1 - 2 * u
    return [
        ("B #_{2(1-k)(1-t)} A", mn.geom_mean(B, A, 2 * u)),
        ("exp(2(1-k)(1-t)logA + (1-2(1-k)(1-t))logB)", log_euclid(A, B, 1 - 2 * u)),
        ("(A^{(1-k)(1-t)p} B^{(1-2(1-k)(1-t))p} A^{(1-k)(1-t)p})^{1/p}", sandwich(A, u * p, B, v * p, 1 / p)),
        ("(A^{up/v} B^p A^{up/v})^{v/p}", sandwich(A, u * p / v, B, p, v / p)),
        ("F_{1-k,1-t}(B^p,A^p)^{1/p}", _fkt_p(B, A, 1 - k, 1 - t, p)),
        ("(A^{p/2} B^{vp/(2u)} A^{p/2})^{2u/p}", sandwich(A, p / 2, B, v * p / (2 * u), 2 * u / p)),
    ]


def gt36_chain(A, B, t, p):
    """Refinement chain for the spectral mean; the ordering of the middle terms depends on ``t``."""
    head = [
        ("A #_t B", mn.geom_mean(A, B, t)),
        ("exp((1-t)logA + t logB)", log_euclid(A, B, t)),
        ("(A^{(1-t)p/2} B^{tp} A^{(1-t)p/2})^{1/p}", sandwich(A, (1 - t) * p / 2, B, t * p, 1 / p)),
    ]
    inner = ("(A^{p/2} B^{tp/(1-t)} A^{p/2})^{(1-t)/p}", sandwich(A, p / 2, B, t * p / (1 - t), (1 - t) / p))
    outer = ("(A^{(1-t)p/(2t)} B^p A^{(1-t)p/(2t)})^{t/p}", sandwich(A, (1 - t) * p / (2 * t), B, p, t / p))
    mid = ("(A^p nat_t B^p)^{1/p}", _nat_p(A, B, t, p))
    if t <= 0.5:
        return head + [inner, mid, outer]
    return head + [outer, mid, inner]


def tilde_chain(A, B, k, p, variant="derived"):
    """Three-member chain for the tilde mean.

    For ``k > 1/2`` the middle member obtained from the ``[1/2, 1)`` chain at
    ``t = 1/2`` is ``(B^p ~#_{1-k} A^p)^{1/p}`` (``variant="derived"``);
    ``variant="literal"`` uses ``(A^p ~#_k B^p)^{1/p}`` instead.
    """
    low = ("(A^{p/2} B^{kp/(1-k)} A^{p/2})^{(1-k)/p}", sandwich(A, p / 2, B, k * p / (1 - k), (1 - k) / p))
    high = ("(A^{(1-k)p/(2k)} B^p A^{(1-k)p/(2k)})^{k/p}", sandwich(A, (1 - k) * p / (2 * k), B, p, k / p))
    if k <= 0.5:
        return [low, ("(A^p ~#_k B^p)^{1/p}", _tilde_p(A, B, k, p)), high]
    if variant == "literal":
        mid = ("(A^p ~#_k B^p)^{1/p}", _tilde_p(A, B, k, p))
    else:
        mid = ("(B^p ~#_{1-k} A^p)^{1/p}", _tilde_p(B, A, 1 - k, p))
    return [high, mid, low]


def _chain_links(members):
    return [(f"{a[0]} < {b[0]}", a[1], b[1]) for a, b in zip(members, members[1:])]


def validate_logmaj(name: str, params: dict) -> dict:
    """Check the theorem's parameter constraints; fill ``q`` where it has a default."""
    if name not in THEOREMS:
        raise SpecError(f"unknown log-majorization theorem {name!r}; choose from {', '.join(THEOREMS)}")
    params = dict(params)
    k, t, p = params.get("k"), params.get("t"), params.get("p", 1.0)
    if not p > 0:
        raise SpecError("p must be positive")
    params["p"] = p
    if name in ("lmF", "lgF"):
        if not (_half(k) and _half(t)):
            raise SpecError(f"{name} needs k, t in (0, 1/2]")
    if name == "lmiF-chain" and not ((_half(k) and _half(t)) or (_upper_half(k) and _upper_half(t))):
        raise SpecError("lmiF-chain needs k, t both in (0, 1/2] or both in [1/2, 1)")
    if name in ("ah", "GT36-refinement") and not (t is not None and 0 < t < 1):
        raise SpecError(f"{name} needs t in (0, 1)")
    if name in ("kah", "tilde-chain") and not (k is not None and 0 < k < 1):
        raise SpecError(f"{name} needs k in (0, 1)")
    if name == "kah" and k > 0.5:
        raise SpecError("kah needs k in (0, 1/2]")
    bound = {
        "lmF": lambda: fkt_threshold(k, t) * p,
        "ah": lambda: natural_threshold(t) * p,
        "kah": lambda: 2 * k * p,
    }.get(name)
    if bound is not None:
        qmax = bound()
        q = params.get("q")
        if q is None:
            params["q"] = qmax
        elif not 0 < q <= qmax * (1 + 1e-12):
            raise SpecError(f"{name} needs 0 < q <= {qmax:.6g}, got {q}")
    return params


def theorem_links(name: str, params: dict, A, B) -> list:
    """``(label, X, Y)`` triples, each asserting ``X <_(log) Y``."""
    k, t, p, q = params.get("k"), params.get("t"), params["p"], params.get("q")
    if name == "lmF":
        return [("F(A^q,B^q)^{1/q} < F(A^p,B^p)^{1/p}", _fkt_p(A, B, k, t, q), _fkt_p(A, B, k, t, p))]
    if name == "ah":
        return [("(A^q nat_t B^q)^{1/q} < (A^p nat_t B^p)^{1/p}", _nat_p(A, B, t, q), _nat_p(A, B, t, p))]
    if name == "kah":
        return [("(A^q ~#_k B^q)^{1/q} < (A^p ~#_k B^p)^{1/p}", _tilde_p(A, B, k, q), _tilde_p(A, B, k, p))]
    if name == "lgF":
        w = 2 * k * t
        return [("exp((1-2kt)logA + 2kt logB) < F(A^p,B^p)^{1/p}", log_euclid(A, B, w), _fkt_p(A, B, k, t, p))]
    if name == "lmiF-chain":
        links = []
        if _half(k) and _half(t):
            links += _chain_links(lmi_chain_one(A, B, k, t, p))
        if _upper_half(k) and _upper_half(t):
            links += _chain_links(lmi_chain_two(A, B, k, t, p))
        return links
    if name == "GT36-refinement":
        return _chain_links(gt36_chain(A, B, t, p))
    return _chain_links(tilde_chain(A, B, k, p, params.get("variant", "derived")))


def route_gap(direct, compound) -> float:
    """Largest relative disagreement between two computations of the partial products."""
    scale = np.maximum(np.maximum(np.abs(direct), np.abs(compound)), 1e-300)
    floor = 64 * np.finfo(float).eps * max(direct[0], compound[0]) * np.concatenate(([1.0], direct[:-1]))
    return float(np.max(np.maximum(np.abs(direct - compound) - floor, 0.0) / scale))


def link_verdict(X, Y, tol: float):
    """Strong log-majorization verdict and the route disagreement for one link."""
    direct = mj.log_majorize(X, Y, tol)
    pa_c = mj.top_products_compound(X)
    pb_c = mj.top_products_compound(Y)
    gap = max(route_gap(direct.products_a, pa_c), route_gap(direct.products_b, pb_c))
    return direct, gap


def _sample_pair(params, rng, index):
    n = draw_n(params, rng)
    c = params.get("c", 1.0)
    if params.get("family") == "commuting":
        A, B = la.random_commuting_pair(n, rng, c)
    else:
        A, B = la.random_pd(n, rng, c), la.random_pd(n, rng, c)
    return {"A": A, "B": B}


def _eval_logmaj(params, inp):
    tol = params.get("tol", 1e-9)
    links = theorem_links(params["theorem"], params, inp["A"], inp["B"])
    margin = math.inf
    per_link = []
    for label, X, Y in links:
        verdict, gap = link_verdict(X, Y, tol)
        # route gap is mapped onto the check tolerance: gap > ROUTE_TOL <=> margin < -tol
        m = min(verdict.strong_margin, -gap * tol / ROUTE_TOL)
        margin = min(margin, m)
        per_link.append({"link": label, "margin": m, "detRelErr": verdict.det_rel_err, "routeGap": gap})
    worst = min(per_link, key=lambda d: d["margin"])
    return Outcome(margin, worst["detRelErr"], worst["routeGap"], {"links": per_link})


register("log-maj", _sample_pair, _eval_logmaj)


def _summ_logmaj(outcomes):
    labels = [d["link"] for d in outcomes[0].extra["links"]]
    return {
        "links": {
            label: {
                "worstMargin": min(o.extra["links"][i]["margin"] for o in outcomes),
                "maxRouteGap": max(o.extra["links"][i]["routeGap"] for o in outcomes),
                "maxDetRelErr": max(o.extra["links"][i]["detRelErr"] for o in outcomes),
            }
            for i, label in enumerate(labels)
        }
    }


def check_log_maj(
    name: str,
    k=None,
    t=None,
    p: float = 1.0,
    q=None,
    trials=200,
    seed=0,
    n=(2, 5),
    c=1.0,
    variant="derived",
    family="random",
    tol=1e-9,
    jobs=1,
    inputs=None,
):
    """Check one log-majorization theorem or chain on sampled PD pairs.

    ``q`` defaults to the largest exponent the theorem allows for the given
    ``p``. The compound route keeps ``n`` at 6 or below by default.
    """
    params = {"theorem": name, "p": p, "n": list(n), "c": c, "tol": tol, "family": family}
    for key, val in (("k", k), ("t", t), ("q", q)):
        if val is not None:
            params[key] = val
    if name == "tilde-chain":
        params["variant"] = variant
    params = validate_logmaj(name, params)
    return run_check("log-maj", params, trials, seed, tol, jobs, inputs, summarize=_summ_logmaj)


# --------------------------------------------------------------------------
# Lie-Trotter limit
# --------------------------------------------------------------------------

DEFAULT_P_GRID = (0.1, 0.05, 0.025, 0.0125)
FIRST_ORDER_BAND = (1.5, 2.5)
EXACT_TOL = 1e-10
EXPONENT_MAX = 50.0


def lie_trotter_errors(k, t, A, B, p_grid=DEFAULT_P_GRID):
    """``e(p) = ||F_{k,t}(e^{pA}, e^{pB})^{1/p} - exp((1-2kt)A + 2ktB)||`` over ``p_grid``."""
    A = la.hermitian(A)
    B = la.hermitian(B)
    w = 2 * k * t
    span = max(p_grid) * max(la.op_norm(A), la.op_norm(B))
    if span > EXPONENT_MAX:
        raise ConditioningError(f"||pA|| = {span:.3g} is too large for the exponentials")
    target = la.expm((1 - w) * A + w * B)
    errs = []
    for p in p_grid:
        X = mn.fkt_mean(la.expm(p * A), la.expm(p * B), k, t)
        errs.append(la.op_norm(P(X, 1 / p) - target))
    return np.array(errs), la.op_norm(target)


def convergence_table(errs, p_grid, scale):
    """Ratios ``e(p)/e(p')`` of consecutive grid points and the observed order."""
    errs = np.asarray(errs)
    exact = bool(np.all(errs <= EXACT_TOL * max(scale, 1.0)))
    ratios = errs[:-1] / np.maximum(errs[1:], 1e-300)
    steps = np.asarray(p_grid[:-1]) / np.asarray(p_grid[1:])
    orders = np.log(ratios) / np.log(steps)
    lo, hi = FIRST_ORDER_BAND
    return {
        "errors": errs.tolist(),
        "ratios": ratios.tolist(),
        "order": float(np.median(orders)),
        "exact": exact,
        "monotone": bool(np.all(np.diff(errs) <= 0)),
        "firstOrderBand": bool(np.all((ratios >= lo) & (ratios <= hi))),
    }


def _sample_lt(params, rng, index):
    n = params.get("dim", 3)
    scale = params.get("scale", 1.0)
    if params.get("family") == "commuting":
        U = la.random_unitary(n, rng)
        a, b = rng.standard_normal(n) * scale, rng.standard_normal(n) * scale
        return {"A": la.sym((U * a) @ U.conj().T), "B": la.sym((U * b) @ U.conj().T)}
    return {"A": la.random_hermitian(n, rng, scale), "B": la.random_hermitian(n, rng, scale)}


def _eval_lt(params, inp):
    grid = tuple(params.get("pGrid", DEFAULT_P_GRID))
    errs, scale = lie_trotter_errors(params["k"], params["t"], inp["A"], inp["B"], grid)
    table = convergence_table(errs, grid, scale)
    if table["exact"]:
        margin = 0.0
    else:
        # convergence means every halving of p shrinks the error by at least the band's lower end
        margin = min(table["ratios"]) / FIRST_ORDER_BAND[0] - 1.0
    return Outcome(margin, float(errs[-1]), float(errs[0]), table)


register("lie-trotter", _sample_lt, _eval_lt)


def _summ_lt(outcomes):
    inexact = [o for o in outcomes if not o.extra["exact"]]
    ratios = np.concatenate([o.extra["ratios"] for o in inexact] or [np.empty(0)])
    return {
        "exactTrials": sum(o.extra["exact"] for o in outcomes),
        "firstOrderBandTrials": sum(o.extra["firstOrderBand"] for o in outcomes),
        "monotoneTrials": sum(o.extra["monotone"] for o in outcomes),
        "ratioRange": [float(ratios.min()), float(ratios.max())] if ratios.size else None,
        "medianOrder": float(np.median([o.extra["order"] for o in inexact])) if inexact else None,
    }


def check_lie_trotter(k, t, trials=50, seed=0, dim=3, p_grid=DEFAULT_P_GRID, family="random", scale=1.0, tol=1e-9, jobs=1, inputs=None):
    """Convergence of ``F_{k,t}(e^{pA}, e^{pB})^{1/p}`` on random Hermitian pairs.

    A trial fails when some ratio ``e(p)/e(p/2)`` drops below 1.5. The
    summary reports how many trials fall in the first-order band [1.5, 2.5].
    """
    if not (0 < k <= 1 and 0 < t <= 1):
        raise SpecError("k and t must lie in (0, 1]")
    params = {"k": k, "t": t, "dim": dim, "pGrid": list(p_grid), "family": family, "scale": scale}
    return run_check("lie-trotter", params, trials, seed, tol, jobs, inputs, summarize=_summ_lt)
