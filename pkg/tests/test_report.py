import csv
import io
import json
import math

import numpy as np

import smcperiod as sp


def small_analysis():
    seq = sp.generate(sp.GeneratorSpec(kind="periodic", length=120, seed=7))
    return sp.analyze_sequence(seq, d=3, config=sp.EstimationConfig(s=3, m_max=10))


def test_build_report_rows_and_order():
    analysis = small_analysis()
    report = sp.build_report(analysis, metadata={"length": 120})
    n_cycles = len(analysis.models)
    assert len(report.rows) == 3 * 4 * n_cycles
    # ordered by (k, state, cycle); k is 1-indexed
    assert report.rows[0].k == 1 and report.rows[0].state == "A"
    assert report.rows[0].cycle == 1
    assert report.rows[-1].k == 3 and report.rows[-1].state == "T"
    assert report.rows[-1].cycle == n_cycles
    assert report.metadata["d"] == 3
    assert report.metadata["length"] == 120
    # p column mirrors logp
    for row in report.rows[:60]:
        assert row.p == (math.exp(row.logp) if math.isfinite(row.logp) else 0.0)


def test_csv_shape_and_values():
    analysis = small_analysis()
    report = sp.build_report(analysis)
    buf = io.StringIO()
    sp.write_csv(report, buf)
    lines = buf.getvalue().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    assert all("=" in c for c in comments)
    body = [l for l in lines if not l.startswith("#")]
    assert body[0] == "state,k,cycle,p,logp,R,color"
    rows = list(csv.DictReader(body))
    assert len(rows) == len(report.rows)
    first = rows[0]
    assert first["state"] == "A" and first["k"] == "1" and first["cycle"] == "1"
    # cycle 1 has no ratio and no color
    assert first["R"] == "" and first["color"] == ""
    # a colored row parses back numerically
    some = rows[5]
    assert some["color"] in ("green", "red")
    assert float(some["R"]) > 0


def test_json_is_strict_and_mirrors_csv():
    analysis = small_analysis()
    report = sp.build_report(analysis, metadata={"sequence": "x"})
    buf = io.StringIO()
    sp.write_json(report, buf)
    doc = json.loads(buf.getvalue())    # would fail on NaN/Infinity literals
    assert doc["schema_version"] == 1
    assert doc["metadata"]["sequence"] == "x"
    assert len(doc["rows"]) == len(report.rows)
    r0 = doc["rows"][0]
    assert r0["R"] is None and r0["color"] is None
    assert set(r0) == {"state", "k", "cycle", "p", "logp", "R", "color"}


def test_json_handles_zero_probability():
    # an impossible repeat gives p = 0, logp = -inf; JSON must stay valid
    states = sp.StateSpace(("A", "B"))
    P = np.array([[0.0, 1.0], [1.0, 0.0]])
    H = np.zeros((2, 2, 2))
    H[0, 0, 1] = 1.0
    H[1, 1, 0] = 1.0
    det = sp.SemiMarkovModel(states, P, H)
    profile = sp.ratio_series(sp.cycle_probabilities(det, 1, 5, "exact-entry"))
    ann_a = sp.color_regions(profile, "A")
    ann_b = sp.color_regions(profile, "B")
    analysis = sp.SequenceAnalysis(d=1, variant="exact-entry",
                                   profiles={0: profile},
                                   annotations={(0, "A"): ann_a, (0, "B"): ann_b},
                                   models=[])
    report = sp.build_report(analysis)
    buf = io.StringIO()
    sp.write_json(report, buf)
    doc = json.loads(buf.getvalue())
    a_rows = [r for r in doc["rows"] if r["state"] == "A"]
    assert a_rows[0]["p"] == 0.0 and a_rows[0]["logp"] is None
