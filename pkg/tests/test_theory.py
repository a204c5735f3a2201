import pandas as pd
import pytest

from src import config as settings
from src.bench.runner import ConfigError
from src.bench.theory import (
    THEORY_KINDS,
    TheoryCheck,
    TheoryReport,
    run_theory_check,
    run_theory_checks,
)


def test_closed_form_check_passes():
    report = run_theory_check("zipf_closed_form", {"sizes": (10, 1000)})
    assert report.passed
    assert len(report.checks) == 2


def test_hash_independence_check():
    report = run_theory_check("hash_independence")
    assert report.passed
    assert report.params["toy_prime"] == 5


def test_static_optimality_check():
    report = run_theory_check(
        "static_optimality", {"sizes": (100, 10_000)}
    )
    assert report.passed


def test_learned_depth_first_two_ranks_are_exact():
    report = run_theory_check(
        "learned_depth", {"n": 60, "trials": 30, "indices": (1, 2, 10)}
    )
    exact = [c for c in report.checks if "every trial" in c.label]
    assert len(exact) == 2
    assert all(check.passed for check in exact)
    assert all(check.empirical == 1.0 for check in exact)


def test_learned_depth_clips_ranks_to_n():
    report = run_theory_check(
        "learned_depth", {"n": 20, "trials": 5, "indices": (1, 100)}
    )
    labels = [check.label for check in report.checks]
    assert "mean depth(e_1)" in labels
    assert "mean depth(e_100)" not in labels


def test_random_depth_single_key():
    report = run_theory_check("random_depth", {"n": 1, "trials": 5})
    assert [check.label for check in report.checks] == [
        "mean zero-based depth(key 1)"
    ]
    assert report.passed


def test_random_depth_default_ranks_are_distinct():
    report = run_theory_check("random_depth", {"n": 2, "trials": 20})
    assert [check.label for check in report.checks] == [
        "mean zero-based depth(key 1)",
        "mean zero-based depth(key 2)",
    ]


def test_topk_drops_k_above_n():
    report = run_theory_check("topk", {"n": 50, "m": 2000, "trials": 3})
    assert len(report.checks) == 1
    assert report.checks[0].label.startswith("k=10:")


def test_topk_with_every_key_known():
    # ks (10, 100) both exceed n, so the check runs at k = n.
    report = run_theory_check("topk", {"n": 3, "m": 300, "trials": 2})
    assert len(report.checks) == 1
    assert report.checks[0].label.startswith("k=3:")


def test_random_cost_bound_small():
    report = run_theory_check("random_cost_bound", {"n": 100, "trials": 60})
    assert len(report.checks) == 3
    assert report.passed


def test_zipf_constant_analytic_only():
    report = run_theory_check(
        "zipf_constant",
        {"sizes": (1000, 10_000, 100_000, 1_000_000), "empirical_sizes": ()},
    )
    assert report.passed


def test_unknown_kind_and_param():
    with pytest.raises(ConfigError):
        run_theory_check("no_such_check")
    with pytest.raises(ConfigError):
        run_theory_check("zipf_closed_form", {"bogus": 1})


def test_none_params_fall_back_to_defaults():
    report = run_theory_check(
        "zipf_closed_form", {"sizes": (10,), "seed": None}
    )
    assert report.params["seed"] == settings.BENCH_SEED


def test_run_theory_checks_filters_params():
    reports = run_theory_checks(
        ["zipf_closed_form", "hash_independence"], {"n": 10, "trials": 3}
    )
    assert [r.kind for r in reports] == [
        "zipf_closed_form",
        "hash_independence",
    ]
    assert "n" not in reports[0].params


def test_report_output(tmp_path):
    report = TheoryReport("demo", {})
    report.add(TheoryCheck("ok", 1.0, 1.0, 0.0, True))
    report.add(TheoryCheck("bad", 2.0, 1.0, 0.1, False, note="why"))
    assert not report.passed
    summary = report.summary()
    assert summary.startswith("demo: FAIL")
    assert "[FAIL] bad" in summary and "(why)" in summary

    path = report.write_csv(tmp_path / "out" / "theory.csv")
    frame = pd.read_csv(path)
    assert frame["kind"].tolist() == ["demo", "demo"]
    assert frame["passed"].tolist() == [True, False]


@pytest.mark.slow
@pytest.mark.parametrize("kind", list(THEORY_KINDS))
def test_theory_kind_passes_at_default_scale(kind):
    report = run_theory_check(kind)
    assert report.passed, report.summary()
