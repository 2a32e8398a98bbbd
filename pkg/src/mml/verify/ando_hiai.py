"""Ando-Hiai checks in norm form, the Grand Furuta inequality and the
one-sided consequence ``F_{k,t}(A,B) <= I  =>  B^{1/x} <= A^{-L}``.

Norm-form margins are ``1 - ||F(A^q, B^q)|| / ||F(A, B)||^q``, computed in
log space. Dividing by the right-hand side makes them invariant under joint
scaling of ``(A, B)``, which is exactly the homogeneity that makes the norm
form equivalent to the implication.
"""

from __future__ import annotations

import math

import numpy as np

from .. import linalg as la
from .. import means as mn
from .. import twobytwo as tb
from ..errors import SpecError
from .report import Outcome, register, run_check
from .sampling import draw_n, inputs_for

PREMISE_DELTA = 1e-6


def ratio_margin(log_lhs: float, log_rhs: float) -> float:
    """``1 - lhs/rhs`` from logarithms."""
    return float(-math.expm1(log_lhs - log_rhs))


def _log_norm(M) -> float:
    return math.log(la.op_norm(M))


# --------------------------------------------------------------------------
# thresholds
# --------------------------------------------------------------------------


def fkt_threshold(k: float, t: float) -> float:
    """``2ktL / (1 - 2kt)`` for ``k, t`` in (0, 1/2]."""
    if not (0 < k <= 0.5 and 0 < t <= 0.5):
        raise SpecError(f"threshold needs k, t in (0, 1/2], got k={k}, t={t}")
    L = mn.homogeneous_l(k, t)
    return 2 * k * t * L / (1 - 2 * k * t)


def natural_threshold(t: float) -> float:
    if not 0 < t < 1:
        raise SpecError(f"t must lie in (0, 1), got {t}")
    return min(t / (1 - t), (1 - t) / t)


def ah_threshold(spec: mn.MeanSpec) -> float:
    """Largest exponent known to give the Ando-Hiai property for ``spec``."""
    if spec.kind == "fkt":
        return fkt_threshold(spec.k, spec.t)
    if spec.kind == "natural":
        return natural_threshold(spec.t)
    if spec.kind == "tilde":
        if spec.k > 0.5:
            raise SpecError("no Ando-Hiai exponent exists for the tilde mean with k > 1/2")
        return 2 * spec.k
    raise SpecError(f"no threshold is known for the {spec.kind} mean")


# --------------------------------------------------------------------------
# one-variable Ando-Hiai property
# --------------------------------------------------------------------------


def ah_norms(spec: mn.MeanSpec, q: float, A, B):
    """``(log ||F(A^q, B^q)||, q log ||F(A, B)||)``."""
    F1 = mn.mean_apply(spec, A, B)
    Fq = mn.mean_apply(spec, la.power(A, q), la.power(B, q))
    return _log_norm(Fq), q * _log_norm(F1)


def _sample_ah(params, rng, index):
    return inputs_for(params, rng, index)


def _eval_ah(params, inp):
    spec = mn.MeanSpec.from_dict(params["spec"])
    log_lhs, log_rhs = ah_norms(spec, params["q"], inp["A"], inp["B"])
    return Outcome(ratio_margin(log_lhs, log_rhs), math.exp(log_lhs), math.exp(log_rhs))


register("ah", _sample_ah, _eval_ah)


def check_ah_property(
    spec: mn.MeanSpec,
    q: float,
    trials: int = 500,
    seed: int = 0,
    n=(2, 6),
    family: str = "random",
    tol: float = 1e-9,
    jobs: int = 1,
    inputs=None,
):
    """Norm form ``||F(A^q, B^q)|| <= ||F(A, B)||^q`` on sampled pairs.

    Raises
    ------
    SpecError
        If ``spec`` is not jointly homogeneous or ``q <= 0``.
    """
    if not spec.homogeneous:
        raise SpecError("the norm form needs a jointly homogeneous mean (L = 1 + 2t - 4kt)")
    if not q > 0:
        raise SpecError(f"q must be positive, got {q}")
    params = {"spec": spec.to_dict(), "q": q, "n": list(n), "family": family}
    return run_check("ah", params, trials, seed, tol, jobs, inputs)


# --------------------------------------------------------------------------
# two-variable version for the spectral mean
# --------------------------------------------------------------------------


def two_var_exponent(t: float, r: float, s: float) -> tuple[float, float]:
    a = r * t / (s * (1 - t) + r * t)
    return a, r * (1 - a) + s * a


def two_var_regime(t: float, r: float, s: float) -> bool:
    """Whether ``(t, r, s)`` lies in the range where the implication is proven."""
    if t <= 0.5 and 0 < s <= t / (1 - t) and 0 < r <= s * (1 - t) / t:
        return True
    if t >= 0.5 and 0 < r <= (1 - t) / t and 0 < s <= r * t / (1 - t):
        return True
    return t == 0.5 and 0 < r <= 1 and 0 < s <= 1


def _eval_two_var(params, inp):
    t, r, s = params["t"], params["r"], params["s"]
    a, expo = two_var_exponent(t, r, s)
    A, B = inp["A"], inp["B"]
    lhs = mn.natural_mean(la.power(A, r), la.power(B, s), a)
    log_lhs = _log_norm(lhs)
    log_rhs = expo * _log_norm(mn.natural_mean(A, B, t))
    return Outcome(ratio_margin(log_lhs, log_rhs), math.exp(log_lhs), math.exp(log_rhs))


register("two-var-ah", _sample_ah, _eval_two_var)


def check_two_variable_ah(
    t: float, r: float, s: float, trials=500, seed=0, n=(2, 6), family="random", tol=1e-9, jobs=1, inputs=None
):
    """``||A^r nat_a B^s|| <= ||A nat_t B||^{r(1-a)+sa}``, ``a = rt/(s(1-t)+rt)``."""
    if not 0 < t < 1:
        raise SpecError(f"t must lie in (0, 1), got {t}")
    if not (r > 0 and s > 0):
        raise SpecError("r and s must be positive")
    params = {"t": t, "r": r, "s": s, "n": list(n), "family": family}
    return run_check("two-var-ah", params, trials, seed, tol, jobs, inputs)


# --------------------------------------------------------------------------
# Grand Furuta inequality
# --------------------------------------------------------------------------


def furuta_sides(A, B, p, s, alpha, r):
    """``(lhs, rhs)`` of the Grand Furuta inequality ``lhs <= rhs``."""
    Ar2, Ama2 = la.powers(A, r / 2, -alpha / 2)
    inner = la.power(la.sym(Ama2 @ la.power(B, p) @ Ama2), s)
    expo = (1 - alpha + r) / ((p - alpha) * s + r)
    lhs = la.power(la.sym(Ar2 @ inner @ Ar2), expo)
    return lhs, la.power(A, 1 - alpha + r)


def _sample_furuta(params, rng, index):
    n = draw_n(params, rng)
    A, B = la.random_ordered_pair(n, rng, params.get("c", 2.0), params.get("cFloor", 0.0))
    p, s = rng.uniform(1.0, 3.0, size=2)
    alpha = rng.uniform(0.0, 1.0)
    r = rng.uniform(alpha, alpha + 2.0)
    return {"A": A, "B": B, "p": float(p), "s": float(s), "alpha": float(alpha), "r": float(r)}


def _eval_furuta(params, inp):
    lhs, rhs = furuta_sides(inp["A"], inp["B"], inp["p"], inp["s"], inp["alpha"], inp["r"])
    gap = la.eigvalsh(rhs - lhs)[-1]
    scale = la.op_norm(rhs)
    return Outcome(gap / scale, la.op_norm(lhs), scale)


register("grand-furuta", _sample_furuta, _eval_furuta)


def check_grand_furuta(trials=500, seed=0, n=(2, 6), c=2.0, c_floor=0.0, tol=1e-9, jobs=1, inputs=None):
    """Sampled ordered pairs ``0 <= B <= A`` with ``p, s in [1, 3]``, ``alpha in [0, 1]``, ``r in [alpha, alpha+2]``."""
    params = {"n": list(n), "c": c, "cFloor": c_floor}
    return run_check("grand-furuta", params, trials, seed, tol, jobs, inputs)


# --------------------------------------------------------------------------
# F_{k,t}(A,B) <= I  =>  B^{1/x} <= A^{-L}
# --------------------------------------------------------------------------


def see_exponent(k: float, t: float) -> float:
    """``1/x`` with ``x = 1/(2kt) - (1-k)/(Lk)``; equals the AH threshold."""
    L = mn.homogeneous_l(k, t)
    return 1.0 / (1.0 / (2 * k * t) - (1 - k) / (L * k))


def normalize_premise(k, t, A, B, delta=PREMISE_DELTA):
    """Scale ``(A, B)`` jointly so that ``||F_{k,t}(A, B)|| = 1/(1+delta)``."""
    lam = 1.0 / ((1 + delta) * la.op_norm(mn.fkt_mean(A, B, k, t)))
    return lam * la.hermitian(A), lam * la.hermitian(B)


def _eval_see(params, inp):
    k, t = params["k"], params["t"]
    A, B = normalize_premise(k, t, inp["A"], inp["B"], params.get("delta", PREMISE_DELTA))
    L = mn.homogeneous_l(k, t)
    rhs = la.power(A, -L)
    lhs = la.power(B, see_exponent(k, t))
    gap = la.eigvalsh(rhs - lhs)[-1]
    scale = la.op_norm(rhs)
    return Outcome(gap / scale, la.op_norm(lhs), scale)


register("eq-see", _sample_ah, _eval_see)


def check_eq_see(k, t, trials=500, seed=0, n=(2, 6), family="random", tol=1e-9, jobs=1, inputs=None):
    if not (0 < k <= 0.5 and 0 < t <= 0.5):
        raise SpecError(f"needs k, t in (0, 1/2], got k={k}, t={t}")
    params = {"k": k, "t": t, "n": list(n), "family": family}
    return run_check("eq-see", params, trials, seed, tol, jobs, inputs)


def family_log_excess(spec: mn.MeanSpec, q: float, x: float, y: float) -> float:
    """``log ||F(A^q, B^q)|| - q log ||F(A, B)||`` at ``(A_{x,y}, diag(1, 0))`` by full matrix evaluation.

    This is ``-g(q)`` of the scalar theory, computed through ``mean_apply``.
    """
    log_lhs, log_rhs = ah_norms(spec, q, tb.a_xy(x, y), tb.B_PROJ)
    return log_lhs - log_rhs


def scale_invariance_gap(spec: mn.MeanSpec, q: float, A, B, lam: float) -> float:
    """Change of the AH margin under ``(A, B) -> (lam A, lam B)``."""
    m0 = ratio_margin(*ah_norms(spec, q, A, B))
    m1 = ratio_margin(*ah_norms(spec, q, lam * np.asarray(A), lam * np.asarray(B)))
    return abs(m1 - m0)
