import json
import math

import numpy as np
import pytest

from mml import means as mn
from mml import search as sr
from mml import verify as vf
from mml.errors import IoError, SpecError
from mml.verify.report import ViolationRecord, deserialize_inputs, serialize_inputs


def small(target, budget=60, **kw):
    return sr.Campaign(target, budget=budget, base_seed=kw.pop("base_seed", 3), **kw)


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------


@pytest.mark.parametrize(
    "kw",
    [
        {"target": "ahGapNaturalT", "budget": 0},
        {"target": "ahGapNaturalT", "budget": 1.5},
        {"target": "nope"},
        {"target": "ahGapNaturalT", "box": {"q": [0.9, 0.1]}},
        {"target": "ahGapNaturalT", "box": {"k": [0.1, 0.2]}},
        {"target": "ahGapNaturalT", "box": {"n": [1, 40]}},
        {"target": "ahGapNaturalT", "box": {"q": [0.0, 0.2], "t": [0.5, 0.5]}},
        {"target": "tildeGapSmallK", "box": {"k": [0.95, 0.95]}},
        {"target": "twoVarAh", "tie_kt": True},
        {"target": "ahGapNaturalT", "base_seed": -1},
    ],
)
def test_invalid_campaigns_rejected(kw):
    with pytest.raises(SpecError):
        sr.Campaign(**kw)


def test_tilde_box_clipped_to_small_k():
    c = sr.Campaign("tildeGapSmallK", box={"k": [0.3, 0.95]}, budget=20)
    assert c.effective_box()["k"] == [0.3, 0.5]
    res = sr.run_campaign(c, write=False)
    assert res.trials_run == 20
    for i in range(20):
        _, params, _, _, _ = sr.run_trial(c, i)
        k = params["spec"]["k"]
        assert 0.3 <= k <= 0.5 and 2 * k < params["q"] < 1


def test_gap_region_sampling():
    c = small("ahGapNaturalT", budget=50)
    for i in range(50):
        _, params, _, _, _ = sr.run_trial(c, i)
        t = params["spec"]["t"]
        assert vf.natural_threshold(t) < params["q"] < 1
    c = small("twoVarAh", budget=50)
    for i in range(50):
        _, params, _, _, _ = sr.run_trial(c, i)
        assert 0 < params["r"] <= 1 and 0 < params["s"] <= 1
        assert not vf.two_var_regime(params["t"], params["r"], params["s"])


def test_campaign_json_round_trip(tmp_path):
    c = sr.Campaign("orderNaturalVsTilde", box={"t": [0.5, 0.9]}, budget=10, base_seed=4, output_path=str(tmp_path / "o.json"), tie_kt=True)
    d = c.to_dict()
    assert d["schemaVersion"] == sr.SCHEMA_VERSION and d["tieKT"] is True
    assert sr.Campaign.from_dict(json.loads(json.dumps(d))).to_dict() == d
    path = tmp_path / "c.json"
    path.write_text(json.dumps(d))
    assert sr.Campaign.load(path).to_dict() == d
    with pytest.raises(SpecError):
        sr.Campaign.from_dict({**d, "extra": 1})
    with pytest.raises(SpecError):
        sr.Campaign.from_dict({**d, "schemaVersion": 99})
    with pytest.raises(IoError):
        sr.Campaign.load(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(SpecError):
        sr.Campaign.load(tmp_path / "bad.json")


# --------------------------------------------------------------------------
# running
# --------------------------------------------------------------------------


@pytest.mark.parametrize("target", sr.TARGETS)
def test_deterministic_and_jobs_invariant(target):
    c = small(target)
    a = sr.run_campaign(c, jobs=1, write=False).dumps()
    b = sr.run_campaign(c, jobs=1, write=False).dumps()
    d = sr.run_campaign(c, jobs=4, write=False).dumps()
    assert a == b == d
    res = sr.CampaignResult.from_dict(json.loads(a))
    assert res.trials_run == c.budget and res.aborted is None
    assert sum(res.strategy_counts.values()) == c.budget
    assert sum(bin_["count"] for bin_ in res.histogram) == c.budget
    assert "elapsed" not in a


@pytest.mark.parametrize("target", ["ahGapNaturalT", "twoVarAh", "tildeGapSmallK"])
def test_no_false_positives(target):
    c = small(target, budget=150, base_seed=11)
    res = sr.run_campaign(c, write=False)
    for rec in res.violations:
        assert vf.reverify(rec).margin < -sr.CONFIRM_FACTOR * c.tol
        assert sr.replay_trial(c, rec).margin == rec.margin
    if res.violations:
        assert res.best_margin == pytest.approx(min(r.margin for r in res.violations))
    assert res.summary().startswith(f"{target}: violation found") == res.found


def test_result_persisted(tmp_path):
    out = tmp_path / "res.json"
    c = small("ahGapNaturalT", budget=15, output_path=str(out))
    res = sr.run_campaign(c)
    assert out.read_text() == res.dumps()
    bad = small("ahGapNaturalT", budget=3, output_path=str(tmp_path / "nodir" / "x.json"))
    with pytest.raises(IoError):
        sr.run_campaign(bad)


def test_order_target_frequencies_and_tie():
    c = sr.Campaign("orderNaturalVsTilde", box={"t": [0.55, 0.95]}, budget=80, base_seed=2, tie_kt=True)
    res = sr.run_campaign(c, write=False)
    lw, lg = res.frequencies["lowner"], res.frequencies["logMaj"]
    assert sum(lw.values()) == sum(lg.values()) == 80
    # at k = t the two means are Loewner incomparable, yet one side log-majorizes the other
    assert lw.get("incomparable", 0) == 80 and res.frequencies["lownerOrderRefuted"]
    # near-commuting pairs may agree to tolerance; the direction never reverses
    assert set(lg) <= {"natural>tilde", "equal"} and lg["natural>tilde"] > 40
    low = sr.run_campaign(sr.Campaign("orderNaturalVsTilde", box={"t": [0.05, 0.45]}, budget=40, tie_kt=True), write=False)
    assert set(low.frequencies["logMaj"]) <= {"natural<tilde", "equal"} and low.frequencies["logMaj"]["natural<tilde"] > 20


def test_order_relation_examples():
    A = np.diag([2.0, 3.0])
    assert sr.order_relation(A, A)[1:] == ("equal", "equal")
    assert sr.order_relation(A, 2 * A)[1] == "natural<=tilde"
    margin, lowner, _ = sr.order_relation(np.diag([1.0, 3.0]), np.diag([2.0, 2.0]))
    assert lowner == "incomparable" and margin < 0


# --------------------------------------------------------------------------
# refinement
# --------------------------------------------------------------------------


def test_pinned_witness_and_refinement():
    rec = sr.pinned_tilde_witness()
    assert rec.margin < 0
    assert vf.reverify(rec).margin == pytest.approx(rec.margin, abs=1e-12)
    assert sr.refine_witness(rec, steps=0) is rec
    better = sr.refine_witness(rec, steps=10)
    assert better.margin <= rec.margin
    assert vf.reverify(better).margin == pytest.approx(better.margin, abs=1e-12)


def test_refine_random_witness_stays_in_box():
    c = sr.Campaign("ahGapNaturalT", box={"t": [0.3, 0.4], "q": [0.7, 0.9]}, budget=5)
    name, params, _, inputs, out = sr.run_trial(c, 0)
    # promote a non-violating trial to a record so refinement has a start point
    rec = ViolationRecord(name, [c.base_seed, 0], serialize_inputs(inputs), params, out.lhs, out.rhs, out.margin)
    ref = sr.refine_witness(rec, steps=3, campaign=c)
    assert ref.margin <= rec.margin
    t, q = ref.params["spec"]["t"], ref.params["q"]
    assert 0.3 <= t <= 0.4 and 0.7 <= q <= 0.9 and q > vf.natural_threshold(t)
    assert vf.reverify(ref).margin == pytest.approx(ref.margin, abs=1e-12)
    assert isinstance(deserialize_inputs(ref.inputs)["A"], np.ndarray)


def test_histogram_bins():
    hist = sr.margin_histogram(np.array([-2.0, -0.5, 0.0, 1e-4, 5.0]))
    assert sum(b["count"] for b in hist) == 5
    assert hist[0]["lo"] is None and hist[-1]["hi"] is None
    assert all(math.isfinite(b["lo"]) for b in hist[1:])


def test_tilde_spec_in_campaign_records():
    c = small("tildeGapSmallK", budget=2)
    _, params, _, _, _ = sr.run_trial(c, 1)
    assert mn.MeanSpec.from_dict(params["spec"]).kind == "tilde"
