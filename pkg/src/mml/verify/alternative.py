"""Alternative means: singular-value dominance and the exponent range of the
Ando-Hiai property."""

from __future__ import annotations

import numpy as np

from .. import linalg as la
from .. import majorization as mj
from .. import means as mn
from .. import twobytwo as tb
from ..errors import CatalogError, SpecError
from .ando_hiai import ratio_margin
from .report import Outcome, register, run_check
from .sampling import inputs_for, scan_point

GRID_POINTS = 2001
_EPS_FLOOR = 64 * np.finfo(float).eps


def assert_dominated(f: mn.ScalarMonotoneFn, g: mn.ScalarMonotoneFn, upper: float, extra_points=()):
    """Raise ``CatalogError`` unless ``f <= g`` on a dense grid of ``[0, upper]``."""
    x = np.concatenate((np.linspace(0.0, max(upper, 1.0), GRID_POINTS), np.asarray(extra_points, dtype=float)))
    fx, gx = f(x), g(x)
    bad = fx > gx * (1 + 1e-12) + 1e-15
    if np.any(bad):
        x0 = float(x[np.argmax(bad)])
        raise CatalogError(f"f <= g fails at x = {x0:.6g}: f = {float(f(x0)):.6g} > g = {float(g(x0)):.6g}")


def dominance_margins(sf, sg) -> np.ndarray:
    """``(s_j(g) - s_j(f)) / s_j(g)`` per index, with a roundoff floor for vanishing values."""
    floor = _EPS_FLOOR * max(sf[0], sg[0])
    return (sg + floor - sf) / np.maximum(sg, floor if floor > 0 else 1e-300)


def _sample_dom(params, rng, index):
    return inputs_for(params, rng, index)


def _eval_dom(params, inp):
    f = mn.ScalarMonotoneFn.from_dict(params["f"])
    g = mn.ScalarMonotoneFn.from_dict(params["g"])
    A, B = inp["A"], inp["B"]
    Ah, Aih = la.powers(A, 0.5, -0.5)
    M = la.sym(Aih @ la.power(la.sym(Ah @ la.as_psd(B) @ Ah), 0.5) @ Aih)
    w = la.eigvalsh(M)
    assert_dominated(f, g, w[0], np.clip(w, 0.0, None))
    Ff = mn.alternative_mean(A, B, f)
    Fg = mn.alternative_mean(A, B, g)
    sf, sg = la.singular_values(Ff), la.singular_values(Fg)
    dom = dominance_margins(sf, sg)
    verdict = mj.log_majorize(Ff, Fg, params.get("tol", 1e-9))
    j = int(np.argmin(dom))
    margin = min(float(dom[j]), verdict.worst_margin)
    extra = {"indexMargins": dom.tolist(), "weakLogHolds": verdict.weak_holds, "weakLogMargin": verdict.worst_margin}
    return Outcome(margin, float(sf[j]), float(sg[j]), extra)


register("alt-dominance", _sample_dom, _eval_dom)


def _summ_dom(outcomes):
    return {
        "weakLogAllTrue": all(o.extra["weakLogHolds"] for o in outcomes),
        "worstIndexMargin": min(min(o.extra["indexMargins"]) for o in outcomes),
    }


def check_alternative_dominance(
    f: mn.ScalarMonotoneFn,
    g: mn.ScalarMonotoneFn,
    trials=500,
    seed=0,
    n=(2, 6),
    family="psd",
    tol=1e-9,
    jobs=1,
    inputs=None,
):
    """``s_j(A sigma_f B) <= s_j(A sigma_g B)`` for every ``j`` and the implied weak log-majorization.

    ``family="psd"`` lets ``B`` be rank deficient in some trials.

    Raises
    ------
    CatalogError
        If ``f <= g`` fails on ``[0, lambda_max(A^{-1} # B)]`` for a sampled pair.
    """
    params = {"f": f.to_dict(), "g": g.to_dict(), "n": list(n), "family": family, "tol": tol}
    return run_check("alt-dominance", params, trials, seed, tol, jobs, inputs, summarize=_summ_dom)


# --------------------------------------------------------------------------
# exponent range of the Ando-Hiai property
# --------------------------------------------------------------------------


def _sample_scan(params, rng, index):
    x, y = scan_point(index)
    return {"x": x, "y": y}


def _eval_alt_nec(params, inp):
    f = mn.ScalarMonotoneFn.from_dict(params["f"])
    q, x, y = params["q"], inp["x"], inp["y"]
    xq, yq = tb.power_point(x, y, q)
    lhs = tb.phi_f(f, xq, yq)
    rhs = tb.phi_f(f, x, y) ** q
    margin = 1.0 - lhs / rhs
    # the same norms through full matrix evaluation
    A = tb.a_xy(x, y)
    m_lhs = la.op_norm(mn.alternative_mean(la.power(A, q), tb.B_PROJ, f))
    m_rhs = la.op_norm(mn.alternative_mean(A, tb.B_PROJ, f)) ** q
    matrix_margin = ratio_margin(np.log(m_lhs), np.log(m_rhs))
    return Outcome(margin, lhs, rhs, {"matrixMargin": matrix_margin, "routeGap": abs(margin - matrix_margin)})


register("alt-necessity", _sample_scan, _eval_alt_nec)


def check_alternative_necessity(f: mn.ScalarMonotoneFn, q_list=(1.5,), tol=1e-9) -> dict:
    """Scan ``x = 1``, ``y -> 0`` for each ``q``; violations are the witnesses.

    For a non-trivial ``f`` every ``q > 1`` is expected to produce at least
    one violation (the Ando-Hiai property forces ``q <= 1``).
    """
    if f.trivial:
        raise SpecError("the exponent-range scan needs a non-trivial catalog function")
    reports = {}
    n_grid = len(tb.default_y_grid())
    for q in q_list:
        if not q > 0:
            raise SpecError(f"q must be positive, got {q}")
        reports[q] = run_check("alt-necessity", {"f": f.to_dict(), "q": q}, n_grid, 0, tol)
    return reports
