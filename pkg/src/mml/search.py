"""Counterexample campaigns for the open exponent ranges and the order question
between the spectral and the tilde mean.

A campaign samples parameters from a box restricted to the target's gap
region and a pair of matrices from a fixed strategy mix, evaluates the
corresponding verify checker and keeps every margin. Candidate violations
count only after re-verification from their serialized inputs. Results are
evidence about open problems, not resolutions of them.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from . import majorization as mj
from . import means as mn
from . import twobytwo as tb
from .errors import IoError, MMLError, SpecError
from .verify.ando_hiai import natural_threshold, two_var_regime
from .verify.report import (
    Outcome,
    ViolationRecord,
    _json_float,
    deserialize_inputs,
    evaluate_inputs,
    register,
    reverify,
    serialize_inputs,
    trial_rng,
)

SCHEMA_VERSION = 1
TARGETS = ("ahGapNaturalT", "twoVarAh", "tildeGapSmallK", "orderNaturalVsTilde")
STRATEGY_WEIGHTS = (("random", 0.5), ("near-commuting", 0.3), ("2x2-adjacent", 0.2))
NEAR_COMMUTING_EPS = 1e-3
MAX_N = 16
MAX_REJECTIONS = 10_000
CONFIRM_FACTOR = 10.0
KEEP_VIOLATIONS = 50
HIST_EDGES = (-math.inf, -1.0, -1e-1, -1e-2, -1e-3, -1e-6, -1e-9, 1e-9, 1e-6, 1e-3, 1e-2, 1e-1, 1.0, math.inf)

# box coordinates each target accepts, with defaults
_BOX_KEYS = {
    "ahGapNaturalT": {"t": (0.05, 0.95), "q": (0.0, 1.0), "n": (2, 6)},
    "twoVarAh": {"t": (0.05, 0.95), "r": (0.0, 1.0), "s": (0.0, 1.0), "n": (2, 6)},
    "tildeGapSmallK": {"k": (0.05, 0.5), "q": (0.0, 1.0), "n": (2, 6)},
    "orderNaturalVsTilde": {"t": (0.05, 0.95), "k": (0.05, 0.95), "n": (2, 6)},
}
# open parameter domains; the gap conditions come on top
_DOMAIN = {"t": (0.0, 1.0), "k": (0.0, 1.0), "q": (0.0, 1.0), "r": (0.0, 1.0), "s": (0.0, 1.0)}


# --------------------------------------------------------------------------
# order between the spectral and the tilde mean
# --------------------------------------------------------------------------


def order_relation(X, Y, tol: float = 1e-9):
    """Loewner and log-majorization relation of ``X = A nat_t B`` and ``Y = A ~#_k B``.

    Returns ``(margin, lowner, logmaj)``. ``margin`` is the larger of the two
    normalized gaps ``lambda_min(Y - X)`` and ``lambda_min(X - Y)``, so it is
    negative exactly when the pair is Loewner incomparable.
    """
    scale = max(la.op_norm(X), la.op_norm(Y))
    up = la.eigvalsh(Y - X)[-1] / scale
    down = la.eigvalsh(X - Y)[-1] / scale
    le, ge = up >= -tol, down >= -tol
    lowner = {(True, True): "equal", (True, False): "natural<=tilde", (False, True): "natural>=tilde"}.get(
        (bool(le), bool(ge)), "incomparable"
    )
    fwd, bwd = mj.log_majorize(X, Y, tol), mj.log_majorize(Y, X, tol)
    logmaj = {(True, True): "equal", (True, False): "natural<tilde", (False, True): "natural>tilde"}.get(
        (fwd.strong_holds, bwd.strong_holds), "incomparable"
    )
    return float(max(up, down)), lowner, logmaj


def _sample_order(params, rng, index):
    lo, hi = params.get("n", [2, 6])
    n = int(rng.integers(lo, hi + 1))
    return {"A": la.random_pd(n, rng), "B": la.random_pd(n, rng)}


def _eval_order(params, inp):
    X = mn.natural_mean(inp["A"], inp["B"], params["t"])
    Y = mn.tilde_mean(inp["A"], inp["B"], params["k"])
    margin, lowner, logmaj = order_relation(X, Y, params.get("tol", 1e-9))
    return Outcome(margin, la.op_norm(X), la.op_norm(Y), {"lowner": lowner, "logMaj": logmaj})


register("order-natural-tilde", _sample_order, _eval_order)


# --------------------------------------------------------------------------
# campaign description
# --------------------------------------------------------------------------


@dataclass
class Campaign:
    """A search target with its parameter box, trial budget and seed.

    ``box`` maps coordinate names to ``[lo, hi]``. Missing coordinates take
    target defaults. ``tie_kt`` (order target only) forces ``k = t``.
    """

    target: str
    box: dict = field(default_factory=dict)
    budget: int = 1000
    base_seed: int = 0
    output_path: str | None = None
    tol: float = 1e-9
    tie_kt: bool = False

    def __post_init__(self):
        validate_campaign(self)

    def full_box(self) -> dict:
        out = {key: list(val) for key, val in _BOX_KEYS[self.target].items()}
        for key, val in self.box.items():
            out[key] = [float(val[0]), float(val[1])] if key != "n" else [int(val[0]), int(val[1])]
        return out

    def effective_box(self) -> dict:
        """The box intersected with the parameter domain (and ``k <= 1/2`` for the tilde gap)."""
        box = self.full_box()
        for key, (lo, hi) in box.items():
            if key in _DOMAIN:
                dlo, dhi = _DOMAIN[key]
                box[key] = [max(lo, dlo), min(hi, dhi)]
        if self.target == "tildeGapSmallK":
            box["k"][1] = min(box["k"][1], 0.5)
        return box

    def to_dict(self) -> dict:
        d = {
            "schemaVersion": SCHEMA_VERSION,
            "target": self.target,
            "box": self.full_box(),
            "budget": self.budget,
            "baseSeed": self.base_seed,
            "outputPath": self.output_path,
            "tol": self.tol,
        }
        if self.target == "orderNaturalVsTilde":
            d["tieKT"] = self.tie_kt
        return d

    @classmethod
    def from_dict(cls, d) -> "Campaign":
        if not isinstance(d, dict):
            raise SpecError("campaign must be a JSON object")
        version = d.get("schemaVersion")
        if version != SCHEMA_VERSION:
            raise SpecError(f"unsupported campaign schemaVersion {version!r}")
        allowed = {"schemaVersion", "target", "box", "budget", "baseSeed", "outputPath", "tol", "tieKT"}
        extra = set(d) - allowed
        if extra:
            raise SpecError(f"unknown campaign fields: {', '.join(sorted(extra))}")
        if "target" not in d:
            raise SpecError("campaign needs a target")
        return cls(
            d["target"],
            box=d.get("box", {}),
            budget=d.get("budget", 1000),
            base_seed=d.get("baseSeed", 0),
            output_path=d.get("outputPath"),
            tol=d.get("tol", 1e-9),
            tie_kt=d.get("tieKT", False),
        )

    @classmethod
    def load(cls, path) -> "Campaign":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise IoError(f"cannot read campaign file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise SpecError(f"campaign file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def validate_campaign(c: Campaign):
    """Raise ``SpecError`` unless the campaign is runnable.

    The box must be well formed and must meet the target's gap region; the
    sampler then draws only from the intersection.
    """
    if c.target not in TARGETS:
        raise SpecError(f"unknown target {c.target!r}; choose from {', '.join(TARGETS)}")
    if isinstance(c.budget, bool) or not isinstance(c.budget, int) or c.budget < 1:
        raise SpecError(f"budget must be an integer >= 1, got {c.budget!r}")
    if isinstance(c.base_seed, bool) or not isinstance(c.base_seed, int) or c.base_seed < 0:
        raise SpecError(f"baseSeed must be a non-negative integer, got {c.base_seed!r}")
    if not (_is_number(c.tol) and c.tol > 0):
        raise SpecError("tol must be a positive number")
    if c.tie_kt and c.target != "orderNaturalVsTilde":
        raise SpecError("tieKT applies to the orderNaturalVsTilde target only")
    if not isinstance(c.box, dict):
        raise SpecError("box must be an object of [lo, hi] ranges")
    keys = _BOX_KEYS[c.target]
    for key, val in c.box.items():
        if key not in keys:
            raise SpecError(f"target {c.target} has no box coordinate {key!r}")
        if not (isinstance(val, (list, tuple)) and len(val) == 2 and all(_is_number(v) for v in val)):
            raise SpecError(f"box[{key!r}] must be [lo, hi]")
        if val[0] > val[1]:
            raise SpecError(f"box[{key!r}] has lo > hi")
    lo_n, hi_n = c.full_box()["n"]
    if not (1 <= lo_n <= hi_n <= MAX_N):
        raise SpecError(f"box['n'] must satisfy 1 <= lo <= hi <= {MAX_N}")
    box = c.effective_box()
    for key, (lo, hi) in box.items():
        if lo > hi or (key in _DOMAIN and hi <= _DOMAIN[key][0]):
            raise SpecError(f"box[{key!r}] does not meet the domain of {key}")
    probe = np.random.default_rng(0)
    if not any(_draw_params(c, box, probe) is not None for _ in range(2000)):
        raise SpecError(f"the box does not meet the gap region of {c.target}")


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------


def _uniform(rng, lo, hi) -> float:
    return float(lo + (hi - lo) * rng.uniform())


def _draw_params(c: Campaign, box: dict, rng):
    """One draw of the target parameters, or ``None`` when it misses the gap region."""
    if c.target == "ahGapNaturalT":
        t = _uniform(rng, *box["t"])
        if not 0 < t < 1:
            return None
        lo, hi = max(box["q"][0], natural_threshold(t)), min(box["q"][1], 1.0)
        q = _uniform(rng, lo, hi)
        return {"t": t, "q": q} if lo < q < hi else None
    if c.target == "tildeGapSmallK":
        k = _uniform(rng, *box["k"])
        if not 0 < k <= 0.5:
            return None
        lo, hi = max(box["q"][0], 2 * k), min(box["q"][1], 1.0)
        q = _uniform(rng, lo, hi)
        return {"k": k, "q": q} if lo < q < hi else None
    if c.target == "twoVarAh":
        t, r, s = (_uniform(rng, *box[key]) for key in ("t", "r", "s"))
        if not (0 < t < 1 and 0 < r <= 1 and 0 < s <= 1) or two_var_regime(t, r, s):
            return None
        return {"t": t, "r": r, "s": s}
    t = _uniform(rng, *box["t"])
    k = t if c.tie_kt else _uniform(rng, *box["k"])
    if not (0 < t < 1 and 0 < k < 1):
        return None
    return {"t": t, "k": k}


def _adjacent_pair(rng):
    """``A_{x,y}`` and ``diag(1, 0)`` with small PSD perturbations."""
    x, y = np.exp(rng.uniform(-4.0, 4.0, size=2))
    eps = 10.0 ** rng.uniform(-6.0, -1.0)
    A = tb.a_xy(float(x), float(y))
    H = la.random_hermitian(2, rng)
    A = la.sym(A + eps * la.min_eig(A) * H / la.op_norm(H))
    E = la.random_psd(2, rng, rank=2, c=1.0)
    B = la.sym(tb.B_PROJ + eps * E / la.op_norm(E))
    return A, B


def _draw_pair(box, rng):
    u = rng.uniform()
    lo, hi = box["n"]
    if u < STRATEGY_WEIGHTS[0][1]:
        n = int(rng.integers(lo, hi + 1))
        return "random", la.random_pd(n, rng), la.random_pd(n, rng)
    if u < STRATEGY_WEIGHTS[0][1] + STRATEGY_WEIGHTS[1][1]:
        n = int(rng.integers(lo, hi + 1))
        A, B = la.random_commuting_pair(n, rng)
        H = la.random_hermitian(n, rng)
        B = la.sym(B + NEAR_COMMUTING_EPS * la.min_eig(B) * H / la.op_norm(H))
        return "near-commuting", A, B
    A, B = _adjacent_pair(rng)
    return "2x2-adjacent", A, B


def check_for(c: Campaign, theta: dict) -> tuple[str, dict]:
    """Registered verify check and its parameters for one parameter draw."""
    if c.target == "ahGapNaturalT":
        return "ah", {"spec": mn.natural(theta["t"]).to_dict(), "q": theta["q"]}
    if c.target == "tildeGapSmallK":
        return "ah", {"spec": mn.tilde(theta["k"]).to_dict(), "q": theta["q"]}
    if c.target == "twoVarAh":
        return "two-var-ah", dict(theta)
    return "order-natural-tilde", {"t": theta["t"], "k": theta["k"], "tol": c.tol}


def sample_trial(c: Campaign, index: int):
    """Deterministic draw for trial ``index``: ``(check, params, strategy, inputs)``."""
    rng = trial_rng(c.base_seed, index)
    box = c.effective_box()
    for _ in range(MAX_REJECTIONS):
        theta = _draw_params(c, box, rng)
        if theta is not None:
            break
    else:
        raise SpecError("rejection sampling failed to meet the gap region")
    strategy, A, B = _draw_pair(box, rng)
    name, params = check_for(c, theta)
    return name, params, strategy, {"A": A, "B": B}


def run_trial(c: Campaign, index: int):
    name, params, strategy, inputs = sample_trial(c, index)
    return name, params, strategy, inputs, evaluate_inputs(name, params, inputs)


# --------------------------------------------------------------------------
# results
# --------------------------------------------------------------------------


def margin_histogram(margins) -> list:
    counts, _ = np.histogram(np.clip(margins, -1e300, 1e300), bins=np.array(HIST_EDGES, dtype=float))
    return [
        {"lo": _json_float(lo), "hi": _json_float(hi), "count": int(cnt)}
        for lo, hi, cnt in zip(HIST_EDGES[:-1], HIST_EDGES[1:], counts)
    ]


@dataclass
class CampaignResult:
    campaign: dict
    trials_run: int
    best_margin: float
    best_trial: int | None
    violations: list
    violation_count: int
    unconfirmed: int
    histogram: list
    strategy_counts: dict
    frequencies: dict = field(default_factory=dict)
    aborted: dict | None = None

    @property
    def found(self) -> bool:
        return self.violation_count > 0

    def summary(self) -> str:
        what = self.campaign["target"]
        if self.found:
            head = f"{what}: violation found ({self.violation_count} confirmed in {self.trials_run} trials)"
        else:
            head = f"{what}: no violation found in {self.trials_run} trials"
        tail = f"; best margin {self.best_margin:.3e}" if self.trials_run else ""
        if self.aborted:
            tail += f"; aborted at trial {self.aborted['trial']}: {self.aborted['error']}"
        return head + tail

    def to_dict(self) -> dict:
        d = {
            "schemaVersion": SCHEMA_VERSION,
            "campaign": self.campaign,
            "trialsRun": self.trials_run,
            "bestMargin": _json_float(self.best_margin),
            "bestTrial": self.best_trial,
            "violationCount": self.violation_count,
            "violations": [v.to_dict() for v in self.violations],
            "unconfirmed": self.unconfirmed,
            "histogram": self.histogram,
            "strategyCounts": self.strategy_counts,
            "aborted": self.aborted,
            "summary": self.summary(),
        }
        if self.frequencies:
            d["frequencies"] = self.frequencies
        return d

    @classmethod
    def from_dict(cls, d) -> "CampaignResult":
        if d.get("schemaVersion") != SCHEMA_VERSION:
            raise SpecError(f"unsupported result schemaVersion {d.get('schemaVersion')!r}")
        best = d["bestMargin"]
        return cls(
            d["campaign"],
            d["trialsRun"],
            math.inf if best is None else best,
            d["bestTrial"],
            [ViolationRecord.from_dict(v) for v in d["violations"]],
            d["violationCount"],
            d["unconfirmed"],
            d["histogram"],
            d["strategyCounts"],
            d.get("frequencies", {}),
            d.get("aborted"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path):
        try:
            with open(path, "w") as fh:
                fh.write(self.dumps())
        except OSError as exc:
            raise IoError(f"cannot write campaign result to {path}: {exc}") from exc


def _safe_trial(c, index):
    try:
        return run_trial(c, index)
    except (MMLError, ValueError, np.linalg.LinAlgError) as exc:
        return exc


def run_campaign(c: Campaign, jobs: int = 1, write: bool = True) -> CampaignResult:
    """Run ``c.budget`` trials and persist the result at ``c.output_path``.

    Trial ``i`` depends only on ``(baseSeed, i)``; results are reduced in
    trial order, so ``jobs`` does not change the output. A candidate with
    margin below ``-tol`` becomes a violation only if re-evaluation from its
    serialized inputs gives a margin below ``-10 tol``.
    """
    validate_campaign(c)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda i: _safe_trial(c, i), range(c.budget)))
    else:
        results = [_safe_trial(c, i) for i in range(c.budget)]

    aborted = None
    for i, res in enumerate(results):
        if isinstance(res, Exception):
            aborted = {"trial": i, "error": f"{type(res).__name__}: {res}"}
            results = results[:i]
            break

    margins = np.array([res[4].margin for res in results]) if results else np.zeros(0)
    strategies = {name: 0 for name, _ in STRATEGY_WEIGHTS}
    freq = {"lowner": {}, "logMaj": {}}
    candidates = []
    unconfirmed = 0
    for i, (name, params, strategy, inputs, out) in enumerate(results):
        strategies[strategy] += 1
        if c.target == "orderNaturalVsTilde":
            for key in ("lowner", "logMaj"):
                freq[key][out.extra[key]] = freq[key].get(out.extra[key], 0) + 1
        if out.margin < -c.tol:
            record = ViolationRecord(name, [c.base_seed, i], serialize_inputs(inputs), params, out.lhs, out.rhs, out.margin)
            if reverify(record).margin < -CONFIRM_FACTOR * c.tol:
                candidates.append((out.margin, i, record))
            else:
                unconfirmed += 1
    candidates.sort(key=lambda item: (item[0], item[1]))

    if len(margins):
        best_trial = int(np.argmin(margins))
        best = float(margins[best_trial])
    else:
        best_trial, best = None, math.inf
    if c.target == "orderNaturalVsTilde":
        lw = freq["lowner"]
        freq["lownerOrderRefuted"] = bool(lw.get("incomparable", 0) or (lw.get("natural<=tilde", 0) and lw.get("natural>=tilde", 0)))
    result = CampaignResult(
        c.to_dict(),
        len(results),
        best,
        best_trial,
        [rec for _, _, rec in candidates[:KEEP_VIOLATIONS]],
        len(candidates),
        unconfirmed,
        margin_histogram(margins),
        strategies,
        freq if c.target == "orderNaturalVsTilde" else {},
        aborted,
    )
    if write and c.output_path:
        result.save(c.output_path)
    return result


def replay_trial(c: Campaign, record: ViolationRecord) -> Outcome:
    """Regenerate a campaign violation from its seed pair and re-evaluate."""
    base, index = record.seed
    if base != c.base_seed:
        raise SpecError("record was produced with a different baseSeed")
    return run_trial(c, index)[4]


# --------------------------------------------------------------------------
# local refinement of a witness
# --------------------------------------------------------------------------


def _flatten(record: ViolationRecord) -> dict:
    """Continuous coordinates of a record, each mapped to a float."""
    theta = {}
    params = record.params
    if record.check == "ah":
        for key in ("k", "t"):
            if params["spec"].get(key) is not None:
                theta["spec." + key] = float(params["spec"][key])
        theta["q"] = float(params["q"])
    else:
        for key in ("t", "k", "r", "s"):
            if key in params:
                theta[key] = float(params[key])
    if "x" in record.inputs and "y" in record.inputs:
        theta["x"] = float(record.inputs["x"])
        theta["y"] = float(record.inputs["y"])
    return theta


def _materialize(record: ViolationRecord, theta: dict, base_inputs: dict, pert: dict):
    params = json.loads(json.dumps(record.params))
    for key, val in theta.items():
        if key.startswith("spec."):
            params["spec"][key[5:]] = val
        elif key in ("x", "y"):
            continue
        else:
            params[key] = val
    inputs = dict(base_inputs)
    if "x" in theta:
        inputs["x"], inputs["y"] = theta["x"], theta["y"]
        inputs["A"] = tb.a_xy(theta["x"], theta["y"])
    for key, D in pert.items():
        inputs[key] = la.sym(base_inputs[key] + D)
    return params, inputs


def _in_domain(theta: dict) -> bool:
    for key, val in theta.items():
        name = key.split(".")[-1]
        if name in ("t", "k") and not 0 < val < 1:
            return False
        if not val > 0:
            return False
    return True


def _project(theta: dict, campaign: Campaign | None) -> dict:
    """Clip the coordinates into the campaign's effective box and gap region."""
    if campaign is None:
        return theta
    box = campaign.effective_box()
    out = dict(theta)
    for key, val in theta.items():
        name = key.split(".")[-1]
        if name in box and name != "n":
            out[key] = min(max(val, box[name][0]), box[name][1])
    eps = 1e-12
    if campaign.target == "ahGapNaturalT":
        out["q"] = min(max(out["q"], natural_threshold(out["spec.t"]) + eps), 1 - eps)
    elif campaign.target == "tildeGapSmallK":
        out["spec.k"] = min(out["spec.k"], 0.5)
        out["q"] = min(max(out["q"], 2 * out["spec.k"] + eps), 1 - eps)
    return out


def _hermitian_basis(n: int):
    for i in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1
        yield E
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = E[j, i] = 1
            yield E
            E = np.zeros((n, n), dtype=complex)
            E[i, j], E[j, i] = 1j, -1j
            yield E


def _feasible_theta(theta, campaign) -> bool:
    if not _in_domain(theta):
        return False
    if campaign is not None and campaign.target == "twoVarAh":
        return not two_var_regime(theta["t"], theta["r"], theta["s"])
    return True


def refine_witness(record: ViolationRecord, steps: int = 20, campaign: Campaign | None = None, h0: float = 0.05) -> ViolationRecord:
    """Coordinate descent that only accepts strictly more negative margins.

    Coordinates are the record's continuous parameters (``q``, ``k``, ``t``,
    ``r``, ``s``), ``(x, y)`` for members of the 2x2 family, and Hermitian
    perturbations of the matrix inputs otherwise. With a ``campaign`` every
    move is projected onto its effective box and gap region. The returned
    record carries its final inputs, so ``reverify`` reproduces its margin.
    """
    if steps <= 0:
        return record
    base_inputs = deserialize_inputs(record.inputs)
    theta = _project(_flatten(record), campaign)
    two_by_two = "x" in theta
    pert = {}
    if not two_by_two:
        for key in ("A", "B"):
            if isinstance(base_inputs.get(key), np.ndarray):
                pert[key] = np.zeros_like(base_inputs[key])

    def score(th, pt):
        if not _feasible_theta(th, campaign):
            return math.inf, None
        try:
            params, inputs = _materialize(record, th, base_inputs, pt)
            for key in pt:
                if la.min_eig(inputs[key]) <= 0:
                    return math.inf, None
            out = evaluate_inputs(record.check, params, inputs)
        except (MMLError, ValueError, np.linalg.LinAlgError):
            return math.inf, None
        return (out.margin if math.isfinite(out.margin) else math.inf), (params, inputs, out)

    best, state = score(theta, pert)
    if state is None or not best < record.margin:
        best, state = record.margin, None
    h = h0
    for _ in range(steps):
        improved = False
        for key in list(theta):
            for sign in (1.0, -1.0):
                trial = dict(theta)
                trial[key] = theta[key] * math.exp(sign * h)
                trial = _project(trial, campaign)
                m, st = score(trial, pert)
                if m < best:
                    best, state, theta, improved = m, st, trial, True
        for key in pert:
            scale = la.op_norm(base_inputs[key])
            for E in _hermitian_basis(base_inputs[key].shape[0]):
                for sign in (1.0, -1.0):
                    trial = dict(pert)
                    trial[key] = pert[key] + sign * h * scale * E
                    m, st = score(theta, trial)
                    if m < best:
                        best, state, pert, improved = m, st, trial, True
        if not improved:
            h /= 2
    if state is None:
        return record
    params, inputs, out = state
    return ViolationRecord(record.check, [], serialize_inputs(inputs), params, out.lhs, out.rhs, out.margin)


def pinned_tilde_witness(k: float = 0.95, x: float = 1.0, y: float = 4.0) -> ViolationRecord:
    """The 2x2 Ando-Hiai failure of the tilde mean as a matrix-route violation record."""
    q, _ = tb.tilde_counterexample(k, x, y)
    params = {"spec": mn.tilde(k).to_dict(), "q": q}
    inputs = {"A": tb.a_xy(x, y), "B": tb.B_PROJ.copy(), "x": x, "y": y}
    out = evaluate_inputs("ah", params, inputs)
    return ViolationRecord("ah", [], serialize_inputs(inputs), params, out.lhs, out.rhs, out.margin)
