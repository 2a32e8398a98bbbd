"""Identity checks for the (k, t)-spectral geometric mean.

Margins are ``-(relative residual)`` so a trial fails when a residual exceeds
the tolerance.
"""

import numpy as np

from .. import linalg as la
from .. import means as mn
from .report import Outcome, register, run_check
from .sampling import draw_n


def rel(X, Y) -> float:
    return la.op_norm(X - Y) / max(la.op_norm(Y), 1e-300)


# --------------------------------------------------------------------------
# basic properties (1)-(7) and the determinant identity
# --------------------------------------------------------------------------


def _sample_prop22(params, rng, index):
    n = draw_n(params, rng)
    c = params.get("c", 2.0)
    A, B = la.random_pd(n, rng, c), la.random_pd(n, rng, c)
    Ac, Bc = la.random_commuting_pair(n, rng, c)
    return {"A": A, "B": B, "Ac": Ac, "Bc": Bc, "U": la.random_unitary(n, rng)}


def prop22_residuals(k, t, A, B, Ac, Bc, U, lam=3.0, mu=5.0) -> dict:
    """Relative residuals of the basic identities; sandwich margins for (7)."""
    L = mn.homogeneous_l(k, t)
    w = 2 * k * t
    F = mn.fkt_mean(A, B, k, t)
    out = {}
    out["commuting"] = rel(mn.fkt_mean(Ac, Bc, k, t), la.power(Ac, 1 - w) @ la.power(Bc, w))
    out["scaling"] = rel(mn.fkt_mean(lam * A, mu * B, k, t), lam ** (1 - w) * mu**w * F)
    Uh = U.conj().T
    out["unitary"] = rel(Uh @ F @ U, mn.fkt_mean(Uh @ A @ U, Uh @ B @ U, k, t))
    out["selfDuality"] = rel(la.inv(F), mn.fkt_mean(la.inv(A), la.inv(B), k, t))
    G = la.power(mn.geom_mean(la.inv(A), B, k), t)
    Gr = mn.geom_mean(la.power(A, -L), F, 0.5)
    dual = mn.dual_mean(A, B, k, t)
    out["riccatiA"] = rel(Gr, G)
    out["riccatiB"] = rel(mn.geom_mean(la.inv(dual), la.power(B, L), 0.5), G)
    out["factorA"] = rel(Gr @ la.power(A, L) @ Gr, F)
    Gri = la.inv(Gr)
    out["factorB"] = rel(Gri @ la.power(B, L) @ Gri, dual)
    logdet = lambda M: float(np.sum(np.log(la.eigvalsh(M))))
    det_expected = (1 - w) * logdet(A) + w * logdet(B)
    out["determinant"] = abs(np.expm1(logdet(F) - det_expected))
    lower, upper, applicable = mn.harmonic_bounds(k, t, A, B)
    sandwich = {"applicable": applicable}
    if applicable:
        sandwich["lower"] = la.loewner_leq(lower, F)[1] / la.op_norm(F)
        sandwich["upper"] = la.loewner_leq(F, upper)[1] / la.op_norm(upper)
    return out, sandwich


def _eval_prop22(params, inp):
    res, sandwich = prop22_residuals(params["k"], params["t"], inp["A"], inp["B"], inp["Ac"], inp["Bc"], inp["U"])
    worst = max(res.values())
    margin = -worst
    if sandwich["applicable"]:
        margin = min(margin, sandwich["lower"], sandwich["upper"])
    return Outcome(margin, worst, 0.0, {"residuals": res, "sandwich": sandwich})


register("prop22", _sample_prop22, _eval_prop22)


def _summ_prop22(outcomes):
    applicable = sum(o.extra["sandwich"]["applicable"] for o in outcomes)
    keys = outcomes[0].extra["residuals"].keys()
    return {
        "sandwichApplicable": applicable,
        "maxResidual": {k: max(o.extra["residuals"][k] for o in outcomes) for k in keys},
    }


def check_prop22(k, t, trials=500, seed=0, n=(2, 6), tol=1e-9, jobs=1, inputs=None):
    params = {"k": k, "t": t, "n": list(n)}
    return run_check("prop22", params, trials, seed, tol, jobs, inputs, summarize=_summ_prop22)


# --------------------------------------------------------------------------
# Riccati characterization
# --------------------------------------------------------------------------


def _sample_pair(params, rng, index):
    n = draw_n(params, rng)
    c = params.get("c", 2.0)
    return {"A": la.random_pd(n, rng, c), "B": la.random_pd(n, rng, c)}


def _eval_riccati(params, inp):
    k, t = params["k"], params["t"]
    A, B = inp["A"], inp["B"]
    r = mn.riccati_residual(k, t, A, B)
    scale = la.op_norm(la.power(mn.geom_mean(la.inv(A), B, k), t))
    return Outcome(-r / scale, r, scale)


register("riccati", _sample_pair, _eval_riccati)


def check_riccati(k, t, trials=500, seed=0, n=(2, 6), tol=1e-9, jobs=1, inputs=None):
    return run_check("riccati", {"k": k, "t": t, "n": list(n)}, trials, seed, tol, jobs, inputs)


# --------------------------------------------------------------------------
# positive similarity and the spectral property of the spectral mean
# --------------------------------------------------------------------------


def similarity_errors(k, t, A, B):
    """Relative spectral mismatch and unitarity residual of the similarity witness."""
    L = mn.homogeneous_l(k, t)
    U, _ = mn.positive_similarity_witness(k, t, A, B)
    F = mn.fkt_mean(A, B, k, t)
    Ft = mn.dual_mean(A, B, k, t)
    Z = la.power(Ft, 0.5) @ U @ la.power(F, 0.5)
    target = la.eigvalsh(mn.geom_mean(la.power(A, L), la.power(B, L), 0.5))
    got = np.linalg.eigvals(Z)
    got = got[np.argsort(-got.real)]
    spec_err = float(np.max(np.abs(got - target) / np.abs(target)))
    unit_err = float(np.linalg.norm(U.conj().T @ U - np.eye(len(target)), 2))
    return spec_err, unit_err


def _eval_similarity(params, inp):
    spec_err, unit_err = similarity_errors(params["k"], params["t"], inp["A"], inp["B"])
    # spectral tolerance is relative 1e-8 and unitarity 1e-10, both mapped onto tol
    tol = params.get("tol", 1e-9)
    margin = min(-spec_err * tol / 1e-8, -unit_err * tol / 1e-10)
    return Outcome(margin, spec_err, unit_err)


register("similarity", _sample_pair, _eval_similarity)


def check_similarity(k, t, trials=200, seed=0, n=(2, 6), tol=1e-9, jobs=1, inputs=None):
    params = {"k": k, "t": t, "n": list(n), "tol": tol}
    return run_check("similarity", params, trials, seed, tol, jobs, inputs)


def spectral_error(A, B) -> float:
    """Relative mismatch between eig((A nat B)^2) and eig(AB)."""
    N = mn.natural_mean(A, B, 0.5)
    lhs = la.eigvalsh(N @ N)
    ab = np.linalg.eigvals(la.hermitian(A) @ la.hermitian(B))
    rhs = np.sort(ab.real)[::-1]
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


def _eval_spectral(params, inp):
    err = spectral_error(inp["A"], inp["B"])
    return Outcome(-err, err, 0.0)


register("spectral", _sample_pair, _eval_spectral)


def check_spectral(trials=500, seed=0, n=(2, 6), tol=1e-9, jobs=1, inputs=None):
    return run_check("spectral", {"n": list(n)}, trials, seed, tol, jobs, inputs)
