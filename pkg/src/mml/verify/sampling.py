"""Input generators shared by the checkers."""

import numpy as np

from .. import linalg as la
from .. import twobytwo as tb


def draw_n(params, rng) -> int:
    lo, hi = params.get("n", [2, 6])
    return int(rng.integers(lo, hi + 1))


def pd_pair(params, rng):
    n = draw_n(params, rng)
    c = params.get("c", 2.0)
    return la.random_pd(n, rng, c), la.random_pd(n, rng, c)


def pd_psd_pair(params, rng, p_singular=0.3):
    """PD ``A`` and a ``B`` that is rank deficient with probability ``p_singular``."""
    n = draw_n(params, rng)
    c = params.get("c", 2.0)
    A = la.random_pd(n, rng, c)
    if rng.uniform() < p_singular:
        B = la.random_psd(n, rng, rank=int(rng.integers(1, n)), c=c)
    else:
        B = la.random_pd(n, rng, c)
    return A, B


# pinned members of the 2x2 family used as the first trials
PINNED_2X2 = ((1.0, 4.0), (1.0, 100.0))


def family_point(rng, index, lo=-3.0, hi=3.0):
    if index < len(PINNED_2X2):
        return PINNED_2X2[index]
    return float(np.exp(rng.uniform(lo, hi))), float(np.exp(rng.uniform(lo, hi)))


def family_pair(rng, index):
    x, y = family_point(rng, index)
    return tb.a_xy(x, y), tb.B_PROJ.copy(), x, y


def scan_point(index):
    """``x = 1`` and the ``index``-th point of the default ``y -> 0`` grid (cyclic)."""
    grid = tb.default_y_grid()
    return 1.0, float(grid[index % len(grid)])


def near_commuting_pair(params, rng, eps=1e-3):
    """Commuting pair with a relative Hermitian perturbation of size ``eps`` on ``B``."""
    n = draw_n(params, rng)
    A, B = la.random_commuting_pair(n, rng, params.get("c", 2.0))
    H = la.random_hermitian(n, rng)
    H = H / la.op_norm(H)
    B = la.hermitian(B + eps * la.min_eig(B) * H)
    return A, B


FAMILIES = ("random", "2x2", "scan", "commuting", "near-commuting", "psd")


def inputs_for(params, rng, index) -> dict:
    """Pair inputs according to ``params["family"]`` (one of ``FAMILIES``)."""
    family = params.get("family", "random")
    if family == "2x2":
        A, B, x, y = family_pair(rng, index)
        return {"A": A, "B": B, "x": x, "y": y}
    if family == "scan":
        x, y = scan_point(index)
        return {"A": tb.a_xy(x, y), "B": tb.B_PROJ.copy(), "x": x, "y": y}
    if family == "near-commuting":
        A, B = near_commuting_pair(params, rng)
        return {"A": A, "B": B}
    if family == "commuting":
        n = draw_n(params, rng)
        A, B = la.random_commuting_pair(n, rng, params.get("c", 2.0))
        return {"A": A, "B": B}
    if family == "psd":
        A, B = pd_psd_pair(params, rng)
        return {"A": A, "B": B}
    if family != "random":
        raise ValueError(f"unknown input family {family!r}")
    A, B = pd_pair(params, rng)
    return {"A": A, "B": B}
