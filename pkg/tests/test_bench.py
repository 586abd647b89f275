import csv

import pytest
from hypothesis import given, strategies as st

from rsabc.bench import (FEASIBLE_TIMEOUT, NO_SOLUTION_TIMEOUT, PLAIN_BB, SOLVED, CalibrationRow,
                         MicroSuiteSpec, SuiteEntry, TauInput, calibrate_eps, calibration_summary,
                         compare_strategies, compute_tau, config_digest, load_suite, micro_suite,
                         run_best_of, tau_input, write_calibration_csv, write_comparison_csv,
                         write_suite)
from rsabc.bnc import solve_bnc
from rsabc.config import SolverConfig
from rsabc.fixtures import fixture
from rsabc.instance import serialize_instance

times = st.floats(0, 1e4, allow_nan=False)
gaps = st.floats(0, 1)


def test_tau_cases():
    assert compute_tau(TauInput(2.0, 0.0, SOLVED)) == 2.0
    assert compute_tau(TauInput(4.0, 0.5, FEASIBLE_TIMEOUT)) == 5.5
    assert compute_tau(TauInput(10.0, 1.0, NO_SOLUTION_TIMEOUT)) == 20.0


@given(times, gaps)
def test_tau_ordering(t, g):
    solved = compute_tau(TauInput(t, 0.0, SOLVED))
    feas = compute_tau(TauInput(t, g, FEASIBLE_TIMEOUT))
    none = compute_tau(TauInput(t, 1.0, NO_SOLUTION_TIMEOUT))
    assert solved <= feas <= none
    assert feas == pytest.approx(t * (1.25 + 0.25 * g))


@given(times, gaps, gaps)
def test_tau_monotone_in_gap(t, g1, g2):
    lo, hi = sorted((g1, g2))
    assert compute_tau(TauInput(t, lo, FEASIBLE_TIMEOUT)) <= compute_tau(TauInput(t, hi, FEASIBLE_TIMEOUT))


@pytest.mark.parametrize("args", [(-1.0, 0.0, SOLVED), (1.0, 1.5, FEASIBLE_TIMEOUT),
                                  (1.0, 0.2, SOLVED), (1.0, 0.0, "Timeout")])
def test_tau_input_validation(args):
    with pytest.raises(ValueError):
        TauInput(*args)


def test_tau_input_from_results():
    ok = solve_bnc(fixture("INST-A"))
    assert tau_input(ok).outcome == SOLVED
    assert tau_input(solve_bnc(fixture("INST-C"))).outcome == SOLVED
    none = solve_bnc(fixture("RING-4"), time_limit=0.0)
    assert tau_input(none) == TauInput(none.wall_minutes, 1.0, NO_SOLUTION_TIMEOUT)


def test_best_of_keeps_the_smallest_tau():
    cfg = SolverConfig()
    rec = run_best_of(fixture("RING-4"), cfg, 3)
    assert rec.digest == config_digest(cfg) and rec.result.status == "Optimal"
    assert rec.tau == rec.result.wall_minutes


def test_config_digest_tracks_changes():
    assert config_digest(SolverConfig()) == config_digest(SolverConfig())
    assert config_digest(SolverConfig()) != config_digest(SolverConfig(h=7))


def test_suite_round_trip(tmp_path):
    inst = fixture("DIAMOND-2D")
    (tmp_path / "d.rsa").write_text(serialize_instance(inst))
    write_suite(tmp_path / "s.txt", [("d.rsa", 4), ("INST-A", 0)])
    entries = load_suite(tmp_path / "s.txt")
    assert [e.seed for e in entries] == [4, 0]
    assert entries[0].inst.same_data(inst) and entries[1].name == "INST-A"


@pytest.mark.parametrize("text", ["", "# only a comment\n", "INST-A 1 2\n", "missing.rsa 0\n"])
def test_bad_suites(tmp_path, text):
    (tmp_path / "s.txt").write_text(text)
    with pytest.raises((ValueError, OSError)):
        load_suite(tmp_path / "s.txt")


def test_micro_suite_is_seeded_and_sized():
    spec = MicroSuiteSpec(count=5, seed=1)
    a, b = micro_suite(spec), micro_suite(spec)
    assert [i.name for i in a] == [i.name for i in b] and len(a) == 5
    for inst in a:
        assert inst.graph.n <= 6 and inst.graph.m <= 10 and inst.n_demands <= 3 and inst.slots <= 6


def _suite():
    return [SuiteEntry(n, fixture(n), 0) for n in ("DIAMOND-2D", "RING-4")]


def test_calibration_with_huge_eps_emits_no_cuts():
    rows = calibrate_eps(_suite(), "nonOverBySum", grid=(0.0, 50.0), runs=3)
    assert [r.eps for r in rows] == [0.0, 50.0]
    assert rows[1].cuts == 0 and len(rows[1].taus) == 2
    summary = calibration_summary(rows)
    assert summary["best"] <= summary["median"] <= summary["worst"]
    assert summary["best_eps"] in (0.0, 50.0)


def test_compare_rows_and_csv(tmp_path):
    rows = compare_strategies(_suite(), ["eff", "brute-force"], h_grid=(5,), time_limit=0.5, runs=2)
    assert [(r.strategy, r.h) for r in rows] == [(PLAIN_BB, None), ("eff", 5), ("brute-force", 5)]
    assert all(r.timeouts == 0 and set(r.taus) == {"DIAMOND-2D", "RING-4"} for r in rows)
    write_comparison_csv(tmp_path / "c.csv", rows)
    got = list(csv.reader(open(tmp_path / "c.csv")))
    assert got[0] == ["strategy", "h", "sum_tau", "timeouts"] and got[1][:2] == ["B&B", ""]


def test_compare_drops_instances_where_everything_timed_out():
    rows = compare_strategies(_suite(), ["eff"], h_grid=(5,), time_limit=0.0, runs=2)
    assert all(r.taus == {} and r.sum_tau == 0.0 and r.timeouts == 0 for r in rows)


def test_calibration_csv(tmp_path):
    write_calibration_csv(tmp_path / "k.csv", [CalibrationRow("farSlotsOff", 0.3, 1.25, 7)])
    assert open(tmp_path / "k.csv").read().splitlines() == ["family,eps,sum_tau,cuts",
                                                            "farSlotsOff,0.3,1.250000,7"]


def test_empty_suites_rejected():
    with pytest.raises(ValueError):
        calibrate_eps([], "farSlotsOff")
    with pytest.raises(ValueError):
        compare_strategies([], ["eff"])
