"""Check registry, trial runner and report types."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import linalg as la

DEFAULT_TOL = 1e-9


@dataclass
class Outcome:
    """Result of evaluating one check on one set of inputs."""

    margin: float
    lhs: float = float("nan")
    rhs: float = float("nan")
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Check:
    """A theorem turned into ``sample`` (params, rng, index) -> inputs and ``evaluate`` (params, inputs) -> Outcome."""

    name: str
    sample: Callable
    evaluate: Callable


REGISTRY: dict[str, Check] = {}


def register(name, sample, evaluate) -> Check:
    check = Check(name, sample, evaluate)
    REGISTRY[name] = check
    return check


def trial_rng(base_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(base_seed), int(index)])


def serialize_inputs(inputs: dict) -> dict:
    out = {}
    for key, val in inputs.items():
        if isinstance(val, np.ndarray) and val.ndim == 2:
            out[key] = la.matrix_to_json(val)
        elif isinstance(val, (np.floating, np.integer)):
            out[key] = val.item()
        else:
            out[key] = val
    return out


def deserialize_inputs(data: dict) -> dict:
    out = {}
    for key, val in data.items():
        if isinstance(val, dict) and {"n", "re"} <= val.keys():
            out[key] = la.matrix_from_json(val)
        else:
            out[key] = val
    return out


def _json_float(x):
    # JSON has no NaN or infinities
    if x is None or not np.isfinite(x):
        return None
    return float(x)


@dataclass
class ViolationRecord:
    check: str
    seed: list
    inputs: dict
    params: dict
    lhs: float
    rhs: float
    margin: float

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "seed": list(self.seed),
            "inputs": self.inputs,
            "params": self.params,
            "lhs": _json_float(self.lhs),
            "rhs": _json_float(self.rhs),
            "margin": _json_float(self.margin),
        }

    @classmethod
    def from_dict(cls, d) -> "ViolationRecord":
        return cls(d["check"], list(d["seed"]), d["inputs"], d["params"], d["lhs"], d["rhs"], d["margin"])


@dataclass
class CheckReport:
    check: str
    params: dict
    trials: int
    violations: list
    worst_margin: float
    tol: float = DEFAULT_TOL
    elapsed: float = 0.0
    summary: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        # elapsed time is left out so reruns serialize byte-identically
        d = {
            "check": self.check,
            "params": self.params,
            "trials": self.trials,
            "tol": self.tol,
            "worstMargin": _json_float(self.worst_margin),
            "violations": [v.to_dict() for v in self.violations],
        }
        if self.summary:
            d["summary"] = self.summary
        return d


def evaluate_inputs(name: str, params: dict, inputs: dict) -> Outcome:
    return REGISTRY[name].evaluate(params, inputs)


def run_trial(name: str, params: dict, base_seed: int, index: int):
    check = REGISTRY[name]
    inputs = check.sample(params, trial_rng(base_seed, index), index)
    return inputs, check.evaluate(params, inputs)


def run_check(
    name: str,
    params: dict,
    trials: int = 500,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
    inputs: dict | None = None,
    keep: int = 20,
    summarize: Callable | None = None,
) -> CheckReport:
    """Run ``trials`` independent trials of a registered check.

    Trial ``i`` draws its inputs from ``trial_rng(seed, i)``, so the report
    does not depend on ``jobs``. With fixed ``inputs`` a single trial runs on
    them. At most ``keep`` violation records are stored (the worst ones).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    check = REGISTRY[name]
    start = time.perf_counter()

    if inputs is not None:
        results = [(inputs, check.evaluate(params, inputs))]
    elif jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda i: run_trial(name, params, seed, i), range(trials)))
    else:
        results = [run_trial(name, params, seed, i) for i in range(trials)]

    worst = float("inf")
    bad = []
    for i, (inp, out) in enumerate(results):
        worst = min(worst, out.margin)
        if out.margin < -tol:
            bad.append((out.margin, i, inp, out))
    bad.sort(key=lambda item: (item[0], item[1]))
    # fixed inputs cannot be regenerated from a seed
    violations = [
        ViolationRecord(
            name, [] if inputs is not None else [int(seed), int(i)], serialize_inputs(inp), params, out.lhs, out.rhs, out.margin
        )
        for _, i, inp, out in bad[:keep]
    ]
    summary = {"violationCount": len(bad)}
    if summarize is not None:
        summary.update(summarize([out for _, out in results]))
    return CheckReport(name, params, len(results), violations, worst, tol, time.perf_counter() - start, summary)


def replay(record: ViolationRecord) -> Outcome:
    """Regenerate the inputs from the recorded seed and re-evaluate."""
    base, index = record.seed
    return run_trial(record.check, record.params, base, index)[1]


def reverify(record: ViolationRecord) -> Outcome:
    """Re-evaluate from the serialized inputs (independent of the sampler)."""
    return evaluate_inputs(record.check, record.params, deserialize_inputs(record.inputs))
