import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mml import linalg as la

settings.register_profile("mml", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("mml")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pd_pair(seed, n=3, c=2.0):
    r = np.random.default_rng(seed)
    return la.random_pd(n, r, c), la.random_pd(n, r, c)


def assert_close(X, Y, rtol=1e-10, atol=0.0):
    X, Y = np.asarray(X), np.asarray(Y)
    err = np.linalg.norm(X - Y, 2) if X.ndim == 2 else np.max(np.abs(X - Y))
    scale = np.linalg.norm(Y, 2) if Y.ndim == 2 else np.max(np.abs(Y))
    assert err <= rtol * scale + atol, f"error {err:.3e} exceeds {rtol:.1e} * {scale:.3e} + {atol:.1e}"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for i in sorted(lines):
            terminalreporter.write_line(lines[i])
