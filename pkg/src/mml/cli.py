"""Command-line front end: ``mml verify``, ``mml sweep`` and ``mml search``.

Exit codes are 0 for a clean run, 1 when violations were found and 2 for
usage or configuration errors. Reports never contain timings, so reruns
with the same flags write identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import linalg as la
from . import means as mn
from . import search as sr
from . import twobytwo as tb
from . import verify as vf
from .errors import IoError, MMLError
from .verify.sampling import FAMILIES

EXIT_CLEAN, EXIT_VIOLATIONS, EXIT_USAGE = 0, 1, 2
SUITES = (
    "prop22",
    "riccati",
    "similarity",
    "ah",
    "two-var-ah",
    "grand-furuta",
    "eq-see",
    "log-maj",
    "lie-trotter",
    "norms",
    "alternative",
    "all",
)
SWEEP_CHECKS = tuple(s for s in SUITES if s != "all") + ("hsign",)
MEAN_CHOICES = ("geom", "natural", "tilde", "fkt", "fktl", "wasserstein", "alt-power", "alt-affine")
MAX_GRID = 10_000
PARAM_FLAGS = ("k", "t", "l", "q", "r", "s", "p", "mean", "theorem", "variant", "family")


class UsageError(MMLError):
    """Flags are inconsistent or malformed."""


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Everything a run depends on; serializes to JSON and back to flags."""

    command: str
    target: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    trials: int | None = None
    n: list | None = None
    tol: float = 1e-9
    format: str = "json"
    out: str | None = None
    jobs: int = 1
    a_file: str | None = None
    b_file: str | None = None
    grid: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d) -> "RunConfig":
        return cls(**d)

    def to_argv(self) -> list:
        """Flags that parse back into this configuration."""
        argv = [self.command, self.target]
        for key in PARAM_FLAGS:
            if key in self.params:
                argv += [f"--{key}", _fmt(self.params[key])]
        argv += ["--seed", str(self.seed), "--tol", repr(self.tol), "--format", self.format, "--jobs", str(self.jobs)]
        if self.trials is not None:
            argv += ["--trials", str(self.trials)]
        if self.n is not None:
            argv += ["--n", f"{self.n[0]}-{self.n[1]}"]
        for flag, val in (("--out", self.out), ("--a-file", self.a_file), ("--b-file", self.b_file)):
            if val is not None:
                argv += [flag, val]
        for g in self.grid:
            argv += ["--grid", g]
        return argv


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _default_seed() -> int:
    raw = os.environ.get("MML_SEED")
    if raw is None:
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise UsageError(f"MML_SEED must be an integer, got {raw!r}") from None
    if seed < 0:
        raise UsageError("MML_SEED must be non-negative")
    return seed


def _parse_n(text):
    if text is None:
        return None
    parts = text.replace(":", "-").split("-")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"--n expects N or LO-HI, got {text!r}") from None
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2 or not 1 <= vals[0] <= vals[1]:
        raise UsageError(f"--n expects N or LO-HI with 1 <= LO <= HI, got {text!r}")
    return vals


def _q_value(text):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mml", description="Matrix means: checks, sweeps and counterexample campaigns.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--k", type=float)
        p.add_argument("--t", type=float)
        p.add_argument("--l", type=float, help="exponent L of F_{k,t,L}")
        p.add_argument("--q", type=_q_value, help="Ando-Hiai exponent or 'auto' for the proven threshold")
        p.add_argument("--r", type=float)
        p.add_argument("--s", type=float)
        p.add_argument("--p", type=float, help="outer exponent for log-majorization and norm chains")
        p.add_argument("--mean", choices=MEAN_CHOICES)
        p.add_argument("--theorem", choices=vf.THEOREMS, help="log-maj: restrict to one theorem")
        p.add_argument("--variant", choices=("derived", "literal"), help="tilde chains with k > 1/2")
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--n", help="dimension N or range LO-HI")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--format", choices=("json", "csv"), default=None)
        p.add_argument("--out", help="report path")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--a-file", dest="a_file", help="JSON matrix file for A (single fixed trial)")
        p.add_argument("--b-file", dest="b_file", help="JSON matrix file for B")

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("target", choices=SUITES, metavar="SUITE")
    common(pv)
    ps = sub.add_parser("sweep", help="run one check over a parameter grid (CSV)")
    ps.add_argument("target", choices=SWEEP_CHECKS, metavar="CHECK")
    ps.add_argument("--grid", action="append", default=[], help="NAME=v1,v2,... or NAME=LO:HI:COUNT[:log]")
    common(ps)
    pc = sub.add_parser("search", help="run a counterexample campaign from a JSON file")
    pc.add_argument("target", metavar="CAMPAIGN")
    pc.add_argument("--out", help="result path (overrides outputPath)")
    pc.add_argument("--jobs", type=int, default=1)
    return parser


def config_from_args(ns) -> RunConfig:
    params = {key: getattr(ns, key) for key in PARAM_FLAGS if getattr(ns, key, None) is not None}
    seed = ns.seed if getattr(ns, "seed", None) is not None else _default_seed()
    if seed < 0:
        raise UsageError("--seed must be non-negative")
    trials = getattr(ns, "trials", None)
    if trials is not None and trials < 1:
        raise UsageError("--trials must be >= 1")
    if ns.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    fmt = getattr(ns, "format", None) or ("csv" if ns.command == "sweep" else "json")
    a_file, b_file = getattr(ns, "a_file", None), getattr(ns, "b_file", None)
    if (a_file is None) != (b_file is None):
        raise UsageError("--a-file and --b-file must be given together")
    return RunConfig(
        command=ns.command,
        target=ns.target,
        params=params,
        seed=seed,
        trials=trials,
        n=_parse_n(getattr(ns, "n", None)),
        tol=getattr(ns, "tol", 1e-9),
        format=fmt,
        out=ns.out,
        jobs=ns.jobs,
        a_file=a_file,
        b_file=b_file,
        grid=list(getattr(ns, "grid", [])),
    )


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------


class _Ctx:
    """Resolved flags for one suite run."""

    def __init__(self, cfg: RunConfig, overrides: dict | None = None):
        self.cfg = cfg
        self.p = dict(cfg.params)
        self.p.update(overrides or {})
        self.inputs = None
        if cfg.a_file:
            try:
                self.inputs = {"A": la.load_matrix(cfg.a_file), "B": la.load_matrix(cfg.b_file)}
            except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
                raise IoError(f"cannot read matrix files: {exc}") from exc

    def get(self, key, default=None):
        return self.p.get(key, default)

    def given(self, key) -> bool:
        return key in self.p

    def run(self, fn, default_trials, *args, n_default=(2, 6), pair=True, family=True, **kwargs):
        kw = dict(kwargs)
        kw["trials"] = self.cfg.trials or default_trials
        kw["seed"] = self.cfg.seed
        kw["tol"] = self.cfg.tol
        kw["jobs"] = self.cfg.jobs
        kw["n"] = tuple(self.cfg.n) if self.cfg.n else n_default
        if family and self.given("family"):
            kw["family"] = self.p["family"]
        if pair:
            kw["inputs"] = self.inputs
        return fn(*args, **kw)


def _fixed_pair_only(ctx, suite):
    if ctx.inputs is not None:
        raise UsageError(f"suite {suite} does not take --a-file/--b-file")


def _suite_prop22(ctx):
    return [ctx.run(vf.check_prop22, 500, ctx.get("k", 0.3), ctx.get("t", 0.6), family=False)]


def _suite_riccati(ctx):
    return [ctx.run(vf.check_riccati, 500, ctx.get("k", 0.3), ctx.get("t", 0.6), family=False)]


def _suite_similarity(ctx):
    reports = [ctx.run(vf.check_similarity, 200, ctx.get("k", 0.3), ctx.get("t", 0.6), family=False)]
    if not (ctx.given("k") or ctx.given("t")):
        reports.append(ctx.run(vf.check_spectral, 500, family=False))
    return reports


def mean_spec_from(ctx) -> mn.MeanSpec:
    kind = ctx.get("mean", "fkt")
    k, t = ctx.get("k"), ctx.get("t")
    if kind == "fkt":
        return mn.MeanSpec("fkt", k=k if k is not None else 0.25, t=t if t is not None else 0.25)
    if kind == "fktl":
        return mn.MeanSpec("fktl", k=k, t=t, L=ctx.get("l"))
    if kind == "tilde":
        return mn.MeanSpec("tilde", k=k if k is not None else 0.25)
    if kind == "alt-power":
        return mn.MeanSpec("alt", fn=mn.power_fn(t if t is not None else 0.5))
    if kind == "alt-affine":
        return mn.MeanSpec("alt", fn=mn.affine_fn(t if t is not None else 0.5))
    return mn.MeanSpec(kind, t=t if t is not None else 0.5)


def _suite_ah(ctx):
    spec = mean_spec_from(ctx)
    q = ctx.get("q", "auto")
    if q == "auto":
        q = vf.ah_threshold(spec)
    return [ctx.run(vf.check_ah_property, 500, spec, q)]


def _suite_two_var(ctx):
    t = ctx.get("t", 0.25)
    if not 0 < t < 1:
        raise UsageError("--t must lie in (0, 1)")
    # default to the corner of the proven range
    s = ctx.get("s", min(t / (1 - t), 1.0) if t <= 0.5 else 1.0)
    r = ctx.get("r", min(s * (1 - t) / t, 1.0) if t <= 0.5 else (1 - t) / t)
    return [ctx.run(vf.check_two_variable_ah, 500, t, r, s)]


def _suite_furuta(ctx):
    _fixed_pair_only(ctx, "grand-furuta")
    return [ctx.run(vf.check_grand_furuta, 500, pair=False, family=False)]


def _suite_see(ctx):
    return [ctx.run(vf.check_eq_see, 500, ctx.get("k", 0.25), ctx.get("t", 0.25))]


# theorem -> default (k, t) points when no --k/--t is given
_LOGMAJ_DEFAULTS = {
    "lmF": [(0.25, 0.25)],
    "ah": [(None, 0.3)],
    "kah": [(0.3, None)],
    "lgF": [(0.25, 0.25)],
    "lmiF-chain": [(0.25, 0.25), (0.7, 0.7)],
    "GT36-refinement": [(None, 0.3), (None, 0.7)],
    "tilde-chain": [(0.3, None), (0.7, None)],
}


def _suite_logmaj(ctx):
    names = [ctx.get("theorem")] if ctx.given("theorem") else list(vf.THEOREMS)
    q = ctx.get("q")
    if q == "auto":
        q = None
    reports = []
    for name in names:
        if ctx.given("k") or ctx.given("t"):
            points = [(ctx.get("k"), ctx.get("t"))]
        else:
            points = _LOGMAJ_DEFAULTS[name]
        for k, t in points:
            reports.append(
                ctx.run(
                    vf.check_log_maj, 200, name, k=k, t=t, p=ctx.get("p", 1.0), q=q, variant=ctx.get("variant", "derived"), n_default=(2, 5)
                )
            )
    return reports


def _suite_lie_trotter(ctx):
    _fixed_pair_only(ctx, "lie-trotter")
    dim = ctx.cfg.n[0] if ctx.cfg.n else 3
    if ctx.cfg.n and ctx.cfg.n[0] != ctx.cfg.n[1]:
        raise UsageError("lie-trotter takes a single dimension --n N")
    kw = {"family": ctx.p["family"]} if ctx.given("family") else {}
    cfg = ctx.cfg
    return [
        vf.check_lie_trotter(
            ctx.get("k", 0.25), ctx.get("t", 0.25), trials=cfg.trials or 50, seed=cfg.seed, dim=dim, tol=cfg.tol, jobs=cfg.jobs, **kw
        )
    ]


def _suite_norms(ctx):
    k, t = ctx.get("k", 0.25), ctx.get("t", 0.25)
    reports = [ctx.run(vf.check_norm_sequence, 100, k, t, p0=ctx.get("p", 2.0))]
    mean = "tilde" if ctx.get("mean") == "tilde" else "natural"
    if mean == "tilde":
        reports.append(ctx.run(vf.check_uab_refinement, 500, mean="tilde", k=k, p=ctx.get("p", 1.0), variant=ctx.get("variant", "derived")))
    else:
        reports.append(ctx.run(vf.check_uab_refinement, 500, t=ctx.get("t", 0.3), p=ctx.get("p", 1.0)))
    return reports


def _suite_alternative(ctx):
    t = ctx.get("t", 0.5)
    kw = {} if ctx.given("family") else {"family": "psd"}
    return [ctx.run(vf.check_alternative_dominance, 500, mn.power_fn(t), mn.affine_fn(t), **kw)]


_SUITES = {
    "prop22": _suite_prop22,
    "riccati": _suite_riccati,
    "similarity": _suite_similarity,
    "ah": _suite_ah,
    "two-var-ah": _suite_two_var,
    "grand-furuta": _suite_furuta,
    "eq-see": _suite_see,
    "log-maj": _suite_logmaj,
    "lie-trotter": _suite_lie_trotter,
    "norms": _suite_norms,
    "alternative": _suite_alternative,
}


# parameter flags each suite reads; anything else is a usage error
_ACCEPTS = {
    "prop22": {"k", "t"},
    "riccati": {"k", "t"},
    "similarity": {"k", "t"},
    "ah": {"k", "t", "l", "q", "mean", "family"},
    "two-var-ah": {"t", "r", "s", "family"},
    "grand-furuta": set(),
    "eq-see": {"k", "t", "family"},
    "log-maj": {"k", "t", "p", "q", "theorem", "variant", "family"},
    "lie-trotter": {"k", "t", "family"},
    "norms": {"k", "t", "p", "mean", "variant", "family"},
    "alternative": {"t", "family"},
}


def run_suite(cfg: RunConfig, suite: str, overrides: dict | None = None) -> list:
    ctx = _Ctx(cfg, overrides)
    if suite != "all":
        extra = sorted(set(ctx.p) - _ACCEPTS[suite])
        if extra:
            raise UsageError(f"suite {suite} does not take {', '.join('--' + k for k in extra)}")
    if suite == "all":
        if ctx.p:
            raise UsageError("suite 'all' runs every suite at its defaults; drop the parameter flags")
        if ctx.inputs is not None:
            raise UsageError("suite 'all' does not take --a-file/--b-file")
        return [rep for name in SUITES[:-1] for rep in _SUITES[name](ctx)]
    return _SUITES[suite](ctx)


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _report_row(rep) -> dict:
    return {
        "check": rep.check,
        "params": json.dumps(rep.params, sort_keys=True),
        "trials": rep.trials,
        "worstMargin": repr(rep.worst_margin),
        "violations": rep.summary.get("violationCount", len(rep.violations)),
    }


def _csv_text(rows: list, columns: list) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _report_config(cfg: RunConfig) -> dict:
    # worker count must not change output bytes
    d = cfg.to_dict()
    del d["jobs"]
    return d


def _summary_line(rep) -> str:
    count = rep.summary.get("violationCount", len(rep.violations))
    verdict = "PASS" if rep.ok else "FAIL"
    return f"{verdict} {rep.check} {json.dumps(rep.params, sort_keys=True)} trials={rep.trials} worstMargin={rep.worst_margin:.3e} violations={count}"


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> int:
    reports = run_suite(cfg, cfg.target)
    for rep in reports:
        print(_summary_line(rep))
    if cfg.out:
        if cfg.format == "csv":
            text = _csv_text([_report_row(r) for r in reports], ["check", "params", "trials", "worstMargin", "violations"])
        else:
            doc = {"config": _report_config(cfg), "reports": [r.to_dict() for r in reports]}
            text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        _write(text, cfg.out)
    return EXIT_CLEAN if all(r.ok for r in reports) else EXIT_VIOLATIONS


def parse_grid(specs: list) -> list:
    """``["q=0.1,0.2", "t=0:1:5"]`` -> list of dicts, the Cartesian product of the axes."""
    if not specs:
        raise UsageError("sweep needs at least one --grid NAME=VALUES")
    axes = []
    for spec in specs:
        name, sep, values = spec.partition("=")
        name = name.strip().lower()
        if not sep or not name or not values:
            raise UsageError(f"malformed grid {spec!r}")
        if name not in ("k", "t", "l", "q", "r", "s", "p", "x", "y"):
            raise UsageError(f"cannot sweep over {name!r}")
        try:
            if ":" in values:
                parts = values.split(":")
                if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
                    raise ValueError
                lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
                if len(parts) == 4:
                    if lo <= 0 or hi <= 0:
                        raise ValueError
                    axis = np.geomspace(lo, hi, count) if count > 0 else []
                else:
                    axis = np.linspace(lo, hi, count) if count > 0 else []
                axis = [float(v) for v in axis]
            else:
                axis = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"malformed grid {spec!r}") from None
        if not axis or not all(math.isfinite(v) for v in axis):
            raise UsageError(f"grid {spec!r} is empty or not finite")
        if any(name == other for other, _ in axes):
            raise UsageError(f"axis {name!r} given twice")
        axes.append((name, axis))
    size = math.prod(len(a) for _, a in axes)
    if size > MAX_GRID:
        raise UsageError(f"grid has {size} points; the limit is {MAX_GRID}")
    names = [n for n, _ in axes]
    return [dict(zip(names, combo)) for combo in itertools.product(*(a for _, a in axes))]


def _hsign_row(point, L_default):
    x, y = point.get("x", 1.0), point.get("y", 1.0)
    L = point.get("l", L_default)
    if L is None:
        raise UsageError("hsign needs --l or an l axis")
    if not (x > 0 and y > 0 and L > 0):
        raise UsageError("hsign needs x, y, L > 0")
    h = tb.h_value(x, y, L)
    return 1, h, int(h < 0)


def cmd_sweep(cfg: RunConfig) -> int:
    points = parse_grid(cfg.grid)
    names = list(points[0])
    rows, any_bad = [], False
    for point in points:
        if cfg.target == "hsign":
            # a sign map: negative entries are not violations of anything
            trials, worst, bad = _hsign_row(point, cfg.params.get("l"))
        else:
            if "x" in point or "y" in point:
                raise UsageError("x and y axes belong to the hsign sweep")
            reports = run_suite(cfg, cfg.target, point)
            trials = sum(r.trials for r in reports)
            worst = min(r.worst_margin for r in reports)
            bad = sum(r.summary.get("violationCount", len(r.violations)) for r in reports)
            any_bad = any_bad or bad > 0
        row = {name: repr(point[name]) for name in names}
        row.update({"trials": trials, "worstMargin": repr(float(worst)), "violations": bad})
        rows.append(row)
    if cfg.format == "json":
        text = json.dumps({"config": _report_config(cfg), "rows": rows}, indent=2, sort_keys=True) + "\n"
    else:
        text = _csv_text(rows, names + ["trials", "worstMargin", "violations"])
    _write(text, cfg.out)
    return EXIT_VIOLATIONS if any_bad else EXIT_CLEAN


def cmd_search(cfg: RunConfig) -> int:
    campaign = sr.Campaign.load(cfg.target)
    if cfg.out:
        campaign.output_path = cfg.out
    if campaign.output_path is None:
        campaign.output_path = str(Path(cfg.target).with_suffix(".result.json"))
    result = sr.run_campaign(campaign, jobs=cfg.jobs)
    print(result.summary())
    print(f"result written to {campaign.output_path}")
    return EXIT_VIOLATIONS if result.aborted else EXIT_CLEAN


_COMMANDS = {"verify": cmd_verify, "sweep": cmd_sweep, "search": cmd_search}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_CLEAN
    try:
        cfg = config_from_args(ns)
        return _COMMANDS[cfg.command](cfg)
    except (MMLError, ValueError) as exc:
        print(f"mml: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
