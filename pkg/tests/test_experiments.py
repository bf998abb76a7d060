import csv
import json
import math

import pytest

from qwsearch.experiments import (
    PRule,
    SweepConfig,
    aas_statistics,
    emit_figure1_data,
    marked_vertex,
    run_sweep,
    sample_connected,
)


def _read_series(path):
    lines = path.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    rows = list(csv.reader(l for l in lines if not l.startswith("#")))
    return comments, rows[0], rows[1:]


def test_p_rules():
    assert PRule("list", [0.1, 0.2]).probabilities(100) == [0.1, 0.2]
    assert PRule("exp", [0.5]).probabilities(100) == [pytest.approx(0.1)]
    assert PRule("logfactor", [2]).probabilities(100) == [pytest.approx(2 * math.log(100) / 100)]
    with pytest.raises(ValueError):
        PRule("logfactor", [50]).probabilities(10)
    with pytest.raises(ValueError):
        PRule("bogus", [1])


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig((10,), PRule("list", [0.5]), trials_per_cell=0)
    with pytest.raises(ValueError):
        SweepConfig((10,), PRule("list", [0.5]), rate_kinds=("wrong",))
    with pytest.raises(ValueError):
        SweepConfig((10,), PRule("list", [1.5]))


def test_k4_baseline(tmp_path):
    rep = run_sweep(SweepConfig((4,), PRule("list", [1.0]), trials_per_cell=1))
    assert [r.rate_kind for r in rep.records] == ["exact", "simplified"]
    exact = rep.records[0]
    assert exact.p_max >= 0.9
    files = emit_figure1_data(rep, tmp_path)
    comments, header, rows = _read_series(tmp_path / exact.series_name)
    assert header == ["t", "t_rescaled", "probability"]
    assert float(rows[0][1]) == 0.0 and float(rows[0][2]) == pytest.approx(0.25, abs=1e-12)
    assert rows[-1][1] == "1.0"
    keys = [c.split(":")[0][2:] for c in comments]
    for key in ("n", "p", "seed", "rate_kind", "T"):
        assert key in keys
    assert tmp_path / "summary.csv" in files


def test_record_count_and_baseline():
    cfg = SweepConfig((20, 30), PRule("list", [0.5, 0.8]), trials_per_cell=3, base_seed=9)
    rep = run_sweep(cfg)
    assert len(rep.records) == 2 * 2 * 3 * 2
    for r in rep.records:
        if r.rate_kind == "exact":
            assert r.p_max >= 1 / r.n
    for c in rep.cells:
        assert c.w_inequality_passes == c.trials


def test_summary_counts(tmp_path):
    rep = run_sweep(SweepConfig((24,), PRule("list", [0.5]), trials_per_cell=10, base_seed=3))
    emit_figure1_data(rep, tmp_path)
    with open(tmp_path / "summary.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["n", "p", "rate_kind", "trials", "mean_pmax", "std_pmax", "mean_tstar", "rejections"]
    assert [r["trials"] for r in rows] == ["10", "10"]
    exact = [r.p_max for r in rep.records if r.rate_kind == "exact"]
    assert len(exact) == 10
    assert float(rows[0]["mean_pmax"]) == pytest.approx(sum(exact) / 10)
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["closeness_threshold"] == 0.1
    assert meta["comparisons"][0]["n"] == 24


def test_byte_reproducible(tmp_path):
    cfg = SweepConfig((16, 20), PRule("exp", [0.3]), trials_per_cell=2, base_seed=5, time_grid_size=301)
    a, b = tmp_path / "a", tmp_path / "b"
    fa = emit_figure1_data(run_sweep(cfg), a)
    fb = emit_figure1_data(run_sweep(cfg), b)
    assert [f.name for f in fa] == [f.name for f in fb]
    for x, y in zip(fa, fb):
        assert x.read_bytes() == y.read_bytes()


def test_order_and_thread_independence():
    base = dict(p_rule=PRule("list", [0.4, 0.7]), trials_per_cell=3, base_seed=77, time_grid_size=401)
    fwd = run_sweep(SweepConfig((18, 26), threads=1, **base))
    rev = run_sweep(SweepConfig((26, 18), threads=3, **base))
    key = lambda row: (row["n"], row["p"], row["rate_kind"])
    assert sorted(fwd.summary_rows(), key=key) == sorted(rev.summary_rows(), key=key)


def test_failed_cell_does_not_stop_sweep():
    rep = run_sweep(SweepConfig((40,), PRule("list", [0.001, 0.6]), trials_per_cell=1))
    assert rep.cells[0].failed and rep.cells[0].rejections == 50
    assert not rep.cells[1].failed
    assert len(rep.records) == 2
    assert rep.metadata()["failed_cells"] == [{"n": 40, "p": 0.001}]


def test_rejection_cap_is_configurable():
    rep = run_sweep(SweepConfig((40,), PRule("list", [0.001]), trials_per_cell=1, max_rejections=7))
    assert rep.cells[0].failed and rep.cells[0].rejections == 7
    assert rep.metadata()["max_rejections"] == 7
    with pytest.raises(ValueError):
        SweepConfig((40,), PRule("list", [0.5]), max_rejections=0)


def test_rejection_resampling_is_counted():
    tg = sample_connected(30, 0.1, 0, 0, 0)
    assert tg.graph is not None
    assert tg.rejections >= 0
    assert marked_vertex(1, 30, 0, 0) == marked_vertex(1, 30, 0, 0)


def test_fixed_marked_policy():
    rep = run_sweep(SweepConfig((12,), PRule("list", [0.9]), trials_per_cell=2, marked_policy=3))
    assert {r.marked for r in rep.records} == {3}


def test_resonant_rate_kind():
    rep = run_sweep(SweepConfig((30,), PRule("list", [0.5]), trials_per_cell=1, rate_kinds=("exact", "resonant")))
    assert [r.rate_kind for r in rep.records] == ["exact", "resonant"]


def test_comparison_flags_larger_discrepancy():
    rep = run_sweep(SweepConfig((60,), PRule("exp", [0.3, 0.6]), trials_per_cell=2, base_seed=1))
    comps = rep.comparisons()
    assert len(comps) == 2
    assert sum(c["larger_discrepancy"] for c in comps) == 1
    worst = max(comps, key=lambda c: abs(c["difference"]))
    assert worst["larger_discrepancy"]


def test_aas_statistics_small_grid():
    cells = aas_statistics([64, 128], PRule("logfactor", [8]), trials=4, C=2.0, base_seed=2)
    assert len(cells) == 2
    for c in cells:
        assert c.trials == 4
        assert c.w_inequality_rate == 1.0
        assert set(c.pass_rates) == {"lambda1_bound_ok", "opnorm_ok", "second_ok", "overlap_ok"}


def test_emit_reports_bad_destination(tmp_path):
    rep = run_sweep(SweepConfig((4,), PRule("list", [1.0]), trials_per_cell=1))
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match=str(blocker)):
        emit_figure1_data(rep, blocker / "sub")
