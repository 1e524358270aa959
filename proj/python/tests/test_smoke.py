import csv
import math
import os

import pytest

import jointde


def test_fdr_select_accepts_prefix():
    d, efdr = jointde.fdr_select([0.99, 0.2, 0.97, 0.5], 0.05)
    assert d == [1, 0, 1, 0]
    assert efdr == pytest.approx(0.02)


def test_gd_matches_dirichlet_under_reduction():
    alpha = [1.5, 2.0, 0.7]
    x = [0.2, 0.5, 0.3]
    a = alpha[:2]
    b = [alpha[1] + alpha[2], alpha[2]]
    assert jointde.gd_logpdf(x, a, b) == pytest.approx(jointde.dirichlet_logpdf(x, alpha), abs=1e-12)
    s = jointde.sample_gd(a, b, seed=7)
    assert len(s) == 3 and sum(s) == pytest.approx(1.0)


def test_rj_round_trip():
    v = [0.5, 0.3, 0.2]
    born, logj = jointde.rj_birth(v, 0.25, 1)
    assert logj == pytest.approx(2 * math.log(0.75))
    back, delta = jointde.rj_death(born, 1)
    assert delta == pytest.approx(0.25)
    assert back == pytest.approx(v, abs=1e-12)


def test_sampler_matches_oracle_on_tiny_instance():
    catalog = [("t1", 100), ("t2", 100), ("t3", 100)]
    reads_a = [[(0, 0.02), (1, 0.02)], [(0, 0.02)], [(2, 0.02)]]
    reads_b = [[(1, 0.02)], [(1, 0.02), (2, 0.02)]]
    exact = jointde.oracle(catalog, reads_a, reads_b, fixed_pi=0.5)
    mc = jointde.posterior(catalog, reads_a, reads_b, iters=40000, burnin=1000, fixed_pi=0.5)
    for p, q in zip(exact["p_de"], mc["p_de"]):
        assert abs(p - q) < 0.03


def test_pipeline_writes_reports(tmp_path):
    sim = jointde.simulate(transcripts=30, n_de=6, reads_per_condition=3000, seed=2, out_dir="x")
    files = sim["files"]
    for name in ("catalog", "cond_a", "cond_b", "truth"):
        (tmp_path / f"{name}.tsv").write_text(files[name])
    out = tmp_path / "out"
    res = jointde.run(
        str(tmp_path / "catalog.tsv"),
        [str(tmp_path / "cond_a.tsv")],
        [str(tmp_path / "cond_b.tsv")],
        str(out),
        chains=2,
        iters=600,
        burnin=100,
        thin=2,
    )
    assert len(res["p_de"]) == 30
    assert sum(res["theta_mean"]) == pytest.approx(1.0, abs=1e-9)
    for name in ("estimates.tsv", "decisions.tsv", "diagnostics.csv", "acf.csv"):
        assert os.path.getsize(out / name) > 0
    with open(out / "estimates.tsv") as f:
        rows = list(csv.DictReader(f, delimiter="\t"))
    assert [r["transcript_id"] for r in rows] == res["transcript_id"]
