import csv
import json
import math

import numpy as np
import pytest

from rwepidemic import cli
from rwepidemic.harness import (ExperimentConfig, TrialSummary, aggregate, classify_regime,
                                geometric_cdf, ks_geometric, read_jsonl, run_experiment,
                                run_trials, write_jsonl)
from rwepidemic.igraph import build_upsilon
from rwepidemic.rrg import generate_regular, load_graph
from rwepidemic.theory import giant_fraction, phi_threshold, sample_lambda


def test_classify_regime():
    assert classify_regime(0.5, 200) == "subcritical"
    assert classify_regime(2, 200) == "supercritical"
    assert classify_regime(3 * math.log(200), 200) == "full"


def test_geometric_cdf():
    q = 0.3
    assert geometric_cdf(0, q) == 0
    assert geometric_cdf(1, q) == pytest.approx(q)
    assert geometric_cdf(2.5, q) == pytest.approx(1 - 0.7 ** 2)


def test_ks_needs_samples():
    with pytest.raises(ValueError):
        ks_geometric([1] * 99, 0.5)


def test_ks_rejects_degenerate():
    assert not ks_geometric([1] * 200, 0.001).passed


def test_ks_null_rate():
    """Under the null the 1%-level test rejects about 1% of the time."""
    reps, N, q = 1000, 300, 0.2
    rejections = sum(
        not ks_geometric(sample_lambda(26, q, seed=s).edge_weights()[:N], q).passed
        for s in range(reps))
    # at most nominal 1% plus three binomial standard errors
    assert rejections <= reps * 0.01 + 3 * math.sqrt(reps * 0.01 * 0.99)


def test_ks_detects_wrong_rate():
    z = sample_lambda(30, 0.01, seed=1).edge_weights()
    assert ks_geometric(z, 0.01).passed
    assert not ks_geometric(z, 0.02).passed


def test_upsilon_weights_geometric():
    # pooled weights from several walk graphs fit Geom(1/(theta n))
    n = 10_000
    g = generate_regular(n, 3, 2)
    pooled = np.concatenate([build_upsilon(g, 10, 1.0, seed=s)[0].edge_weights()
                             for s in range(8)])
    assert ks_geometric(pooled, 1 / (2 * n)).passed


def _cfg(**kw):
    d = dict(kind="completion", n=400, r=3, k=8, trials=6, base_seed=5)
    d.update(kw)
    return ExperimentConfig(**d)


def test_config_validation():
    with pytest.raises(ValueError):
        _cfg(kind="nope")
    with pytest.raises(ValueError):
        _cfg(xi=10, phi=2)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"n": 10, "bogus": 1})
    assert _cfg(phi=2.0).xi_value >= 1


def test_trials_reproducible():
    a = [s.to_json() for s in run_trials(_cfg())]
    b = [s.to_json() for s in run_trials(_cfg())]
    assert a == b
    c = [s.to_json() for s in run_trials(_cfg(base_seed=6))]
    assert c[:-1] == a[1:]  # trial i depends on base_seed + i only


def test_workers_do_not_change_results():
    one = [s.to_json() for s in run_trials(_cfg(kind="lemma_audit", xi=30, trials=4))]
    two = [s.to_json() for s in run_trials(_cfg(kind="lemma_audit", xi=30, trials=4, workers=2))]
    assert one == two


def test_trial_errors_recorded():
    s = run_trials(_cfg(n=11, r=3, trials=1))[0]  # n r odd
    assert s.error and "odd" in s.error


def test_aggregate_from_jsonl(tmp_path):
    cfg = _cfg(kind="regimes", phi=2.0, trials=8)
    summaries, rep = run_experiment(cfg)
    p = tmp_path / "t.jsonl"
    write_jsonl(summaries, p)
    back = read_jsonl(p)
    assert aggregate(cfg, back) == rep
    assert rep["M_k"]["n"] + rep["censored"] + rep["errors"] == 8
    assert rep["regime"] == "supercritical" and 0 < rep["C_pred"] < 1


def test_summary_round_trip():
    s = TrialSummary(seed=3, M_k=4, T_k=None, lemmas={"time_distance": True})
    assert TrialSummary.from_json(s.to_json()) == s


def test_meeting_kind():
    summaries, rep = run_experiment(_cfg(kind="meeting_time", k=2, rho=0.5, trials=20))
    assert all(s.meet_time is not None and s.meet_time >= 0 for s in summaries)
    assert 0 < rep["meet_mean_over_theta_n"] and rep["psi"] == pytest.approx(2 / 3)


# CLI --------------------------------------------------------------------

def test_cli_gen_and_typical(tmp_path, capsys):
    g = tmp_path / "g.txt"
    assert cli.main(["gen", "--n", "200", "--r", "3", "--seed", "1", "--out", str(g)]) == 0
    assert load_graph(g).adj.tobytes() == generate_regular(200, 3, 1).adj.tobytes()
    capsys.readouterr()
    cli.main(["typical", "--graph", str(g)])
    rep = json.loads(capsys.readouterr().out)
    assert rep["connected"] and "lambda2" in rep


def test_cli_run_config_and_override(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"kind": "completion", "n": 300, "k": 6, "trials": 3, "base_seed": 1}))
    out, rep = tmp_path / "o.jsonl", tmp_path / "r.json"
    cli.main(["run", "--config", str(conf), "--trials", "2", "--out", str(out), "--report", str(rep)])
    lines = out.read_text().splitlines()
    assert len(lines) == 2 and json.loads(lines[0])["seed"] == 1
    assert json.loads(rep.read_text())["config"]["trials"] == 2


def test_cli_sweep_csv(tmp_path):
    out = tmp_path / "s.csv"
    cli.main(["sweep", "--n", "400", "--k", "10", "--trials", "3", "--phi-list", "0.5", "2",
              "--out", str(out)])
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["phi", "xi", "mean_Mk", "frac_large", "C_pred"]
    assert len(rows) == 3 and rows[1][3] == ""
    phi = phi_threshold(10, 400, 3, 1.0, int(rows[2][1]))
    assert float(rows[2][4]) == pytest.approx(giant_fraction(phi), abs=1e-12)


def test_cli_rejects_xi_and_phi():
    with pytest.raises(SystemExit):
        cli.main(["run", "--xi", "5", "--phi", "2", "--out", "x"])
