"""Closed-form scalar theory of the 2x2 family ``A_{x,y}``, ``B = diag(1, 0)``.

``A_{x,y} = [[x+y, y-x], [y-x, x+y]]`` has eigenvalues ``2x, 2y`` with
eigenvectors ``(1, -1)/sqrt2`` and ``(1, 1)/sqrt2``; its powers stay in the
family, ``A_{x,y}^q = A_{(2x)^q/2, (2y)^q/2}``. Everything here is evaluated
in log space so that scans can reach ``y = 1e-6`` and beyond.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateError, RangeError

B_PROJ = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)

BISECTION_MAX_ITER = 200


def a_xy(x: float, y: float) -> np.ndarray:
    if not (x > 0 and y > 0):
        raise ValueError("x and y must be positive")
    return np.array([[x + y, y - x], [y - x, x + y]], dtype=complex)


def default_y_grid(lo_exp: int = -6, hi_exp: int = -1, per_decade: int = 6) -> np.ndarray:
    """Geometric grid from ``10**hi_exp`` down to ``10**lo_exp``."""
    num = (hi_exp - lo_exp) * per_decade + 1
    return np.logspace(hi_exp, lo_exp, num)


def power_point(x: float, y: float, q: float) -> tuple[float, float]:
    """Parameters of ``A_{x,y}^q``."""
    lx = q * math.log(2 * x) - math.log(2)
    ly = q * math.log(2 * y) - math.log(2)
    return math.exp(lx), math.exp(ly)


def log_phi(k: float, t: float, L: float, x: float, y: float) -> float:
    """``log ||F_{k,t,L}(A_{x,y}, B)||``."""
    num = np.logaddexp(L * math.log(2 * x), L * math.log(2 * y))
    return float(num - math.log(2) - 2 * t * (1 - k) * math.log(x + y))


def phi_value(k: float, t: float, L: float, x: float, y: float) -> float:
    """``((2x)^L + (2y)^L) / (2 (x+y)^{2t(1-k)})``."""
    return math.exp(log_phi(k, t, L, x, y))


def _split(x, y):
    # x = s(1-d)/2, y = s(1+d)/2
    return (y - x) / (x + y)


def _logcosh(z):
    z = abs(z)
    if z > 20:
        return z - math.log(2) + math.log1p(math.exp(-2 * z))
    return math.log1p(2 * math.sinh(z / 2) ** 2)


def h_value(x: float, y: float, L: float) -> float:
    """``h_{x,y}(L) = log(((2x)^L + (2y)^L) / (2 (x+y)^{L/2})) - (L/4) log(4xy)``.

    Evaluated as ``(L/4) log(1 - d^2) + log cosh(L atanh d)`` with
    ``d = (y-x)/(x+y)``, which is exact algebra and keeps full relative
    accuracy when ``x`` and ``y`` nearly coincide.
    """
    d = _split(x, y)
    return 0.25 * L * math.log1p(-d * d) + _logcosh(L * math.atanh(d))


def h_derivative_at_zero(x: float, y: float) -> float:
    """``(1/4) log(4xy / (x+y)^2)``."""
    d = _split(x, y)
    return 0.25 * math.log1p(-d * d)


def find_lxy(x: float, y: float, tol: float = 1e-12) -> float:
    """Positive root ``L_{x,y}`` of ``h_{x,y}`` in (0, 1) by bisection.

    ``h`` is convex in ``L`` with ``h(0) = 0``, ``h'(0) < 0`` and ``h(1) > 0``
    for ``x != y``, so it is negative exactly on ``(0, L_{x,y})``.
    """
    if x == y or _split(x, y) == 0.0:
        raise DegenerateError("h vanishes identically when x == y")
    lo, hi = 0.0, 1.0
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if h_value(x, y, mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def g_value(k: float, t: float, L: float, x: float, y: float, q: float) -> float:
    """``q log phi(x, y) - log phi(A^q point)``; negative means the norm form of AH fails at q."""
    xq, yq = power_point(x, y, q)
    return q * log_phi(k, t, L, x, y) - log_phi(k, t, L, xq, yq)


def tilde_counterexample(k: float, x: float = 1.0, y: float = 4.0, q_grid=None):
    """Concrete Ando-Hiai failure of the tilde mean for ``k`` in (1/2, 1).

    With ``L = 2 - 2k`` and ``t = 1/2`` the function ``g(q)`` has ``g(0) = 0``
    and ``g'(0) = h_{x,y}(L) < 0`` when ``L < L_{x,y}``.

    Returns
    -------
    q_star : float
        Largest point of the descending grid ``0.5, 0.25, ...`` with ``g < 0``.
    margin : float
        ``-g(q_star) > 0``.
    """
    if x == y:
        raise DegenerateError("x and y must differ")
    L = 2.0 - 2.0 * k
    lxy = find_lxy(x, y)
    if not 0 < L < lxy:
        raise RangeError(f"L = 2 - 2k = {L:.6g} is not below L_xy = {lxy:.6g}; choose k closer to 1")
    if q_grid is None:
        q_grid = [0.5**i for i in range(1, 60)]
    for q in q_grid:
        g = g_value(k, 0.5, L, x, y, q)
        if g < 0:
            return q, -g
    raise RangeError("no negative value of g on the grid")


def necessity_scan(k: float, t: float, q: float, y_grid=None, x: float = 1.0):
    """Scan ``y -> 0`` at fixed ``x`` for a failure of the norm form of AH.

    Returns a dict ``{"x", "y", "q", "lhs", "rhs", "margin"}`` for the first
    grid point with ``phi(A^q point) > phi(x, y)^q`` or ``None``.
    """
    if q == 1 or abs(t * (1 - k) - 0.5) < 1e-15:
        return None
    L = 1.0 + 2.0 * t - 4.0 * k * t
    for y in default_y_grid() if y_grid is None else y_grid:
        g = g_value(k, t, L, x, y, q)
        if g < 0:
            xq, yq = power_point(x, y, q)
            lhs = phi_value(k, t, L, xq, yq)
            rhs = phi_value(k, t, L, x, y) ** q
            return {"x": x, "y": float(y), "q": q, "lhs": lhs, "rhs": rhs, "margin": 1.0 - lhs / rhs}
    return None


def two_var_weight(t: float, r: float, s: float) -> float:
    return r * t / (s * (1 - t) + r * t)


def two_var_necessity_scan(t: float, r: float, s: float = 1.0, y_grid=None, x: float = 1.0):
    """Scan for a failure of ``||A^r nat_a B^s|| <= ||A nat_t B||^{r(1-a)+sa}``.

    On the family ``||A_{x,y} nat_a B|| = (x+y)^{1-a}`` and ``B^s = B``.
    """
    a = two_var_weight(t, r, s)
    expo = r * (1 - a) + s * a
    for y in default_y_grid() if y_grid is None else y_grid:
        xr, yr = power_point(x, y, r)
        log_lhs = (1 - a) * math.log(xr + yr)
        log_rhs = expo * (1 - t) * math.log(x + y)
        if log_lhs > log_rhs:
            lhs, rhs = math.exp(log_lhs), math.exp(log_rhs)
            return {"x": x, "y": float(y), "r": r, "s": s, "t": t, "lhs": lhs, "rhs": rhs, "margin": 1.0 - lhs / rhs}
    return None


def phi_f(f, x: float, y: float) -> float:
    """``|| diag(a, b) A_{x,y} diag(a, b) ||`` with ``a = f(1/sqrt(x+y))``, ``b = f(0)``."""
    a = float(f(1.0 / math.sqrt(x + y)))
    b = float(f(0.0))
    p = a * a * (x + y)
    r = b * b * (x + y)
    c = a * b * (y - x)
    return 0.5 * (p + r) + math.hypot(0.5 * (p - r), c)


def alternative_necessity_scan(f, q: float, y_grid=None, x: float = 1.0):
    """First ``y`` on the grid with ``phi_f(A^q point) > phi_f(x, y)^q``, or ``None``."""
    for y in default_y_grid() if y_grid is None else y_grid:
        xq, yq = power_point(x, y, q)
        lhs = phi_f(f, xq, yq)
        rhs = phi_f(f, x, y) ** q
        if lhs > rhs:
            return {"x": x, "y": float(y), "q": q, "lhs": lhs, "rhs": rhs, "margin": 1.0 - lhs / rhs}
    return None
