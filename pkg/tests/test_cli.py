import pandas as pd
import pytest

from src import cli
from src.analytics import AnalyticsError
from src.bench.theory import TheoryCheck, TheoryReport
from src.workload import write_trace_csv


def _synthetic_args(out, *extra):
    return [
        "bench",
        "synthetic",
        "--n",
        "30",
        "--m",
        "300",
        "--trials",
        "2",
        "--structures",
        "learned_treap,splay",
        "--out",
        str(out),
        *extra,
    ]


def test_synthetic_writes_csv(tmp_path):
    out = tmp_path / "synthetic.csv"
    assert cli.main(_synthetic_args(out)) == cli.EXIT_OK
    frame = pd.read_csv(out)
    assert set(frame["structure"]) == {"learned_treap", "splay"}
    assert (frame["m"] == 300).all()


def test_shuffled_flag_adds_dual_structure(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(_synthetic_args(out, "--shuffled")) == cli.EXIT_OK
    assert "shuffled_learned_treap" in set(pd.read_csv(out)["structure"])


def test_n_list_sweeps_sizes(tmp_path):
    out = tmp_path / "n.csv"
    args = _synthetic_args(out)
    args[args.index("30")] = "20,40"
    assert cli.main(args) == cli.EXIT_OK
    assert set(pd.read_csv(out)["n"]) == {20, 40}


def test_oracle_flag(tmp_path):
    out = tmp_path / "o.csv"
    assert cli.main(_synthetic_args(out, "--oracle", "topk:5")) == 0
    assert set(pd.read_csv(out)["oracle"]) == {"topk:5"}


def test_unknown_structure_exits_with_config_error(tmp_path):
    args = _synthetic_args(tmp_path / "x.csv")
    args[args.index("learned_treap,splay")] = "learned_treap,avl"
    assert cli.main(args) == cli.EXIT_BAD_INPUT


def test_malformed_oracle_is_rejected_by_parser(tmp_path):
    with pytest.raises(SystemExit) as info:
        cli.main(_synthetic_args(tmp_path / "x.csv", "--oracle", "mult:x"))
    assert info.value.code == 2


def test_trace_command(tmp_path):
    trace = write_trace_csv(tmp_path / "t.csv", [3, 1, 3, 3, 2])
    out = tmp_path / "trace.csv"
    code = cli.main(
        [
            "bench",
            "trace",
            "--trace",
            str(trace),
            "--trials",
            "1",
            "--out",
            str(out),
        ]
    )
    assert code == cli.EXIT_OK
    frame = pd.read_csv(out)
    assert (frame.loc[frame["trial"] == "0", "n"] == 3).all()


def test_trace_command_bad_file(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("key\n1\nnot-a-key\n")
    code = cli.main(
        ["bench", "trace", "--trace", str(path), "--out", str(tmp_path / "o")]
    )
    assert code == cli.EXIT_BAD_INPUT


def test_error_sweep_command(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    args = _synthetic_args(out)
    args[1] = "error-sweep"
    code = cli.main(args + ["--deltas", "1,4"])
    assert code == cli.EXIT_OK
    assert set(pd.read_csv(out)["oracle"]) == {"mult:1", "mult:4"}
    assert "learned_treap: cost by delta" in capsys.readouterr().out


def test_error_sweep_rejects_small_delta(tmp_path):
    args = _synthetic_args(tmp_path / "s.csv")
    args[1] = "error-sweep"
    assert cli.main(args + ["--deltas", "0.5"]) == cli.EXIT_BAD_INPUT


def test_alpha_sweep_command(tmp_path):
    out = tmp_path / "alpha.csv"
    args = _synthetic_args(out)
    args[1] = "alpha-sweep"
    assert cli.main(args + ["--alphas", "1,2"]) == cli.EXIT_OK
    assert set(pd.read_csv(out)["alpha"]) == {1.0, 2.0}


def test_history_round_trip(tmp_path, capsys):
    db = f"sqlite:///{tmp_path / 'history.db'}"
    out = tmp_path / "r.csv"
    assert cli.main(_synthetic_args(out, "--db", db)) == cli.EXIT_OK
    capsys.readouterr()
    assert cli.main(["bench", "history", "--db", db]) == cli.EXIT_OK
    listing = capsys.readouterr().out
    assert "bench synthetic" in listing
    assert "rows=4" in listing


def test_history_show_and_delete(tmp_path, capsys):
    db = f"sqlite:///{tmp_path / 'history.db'}"
    assert cli.main(_synthetic_args(tmp_path / "r.csv", "--db", db)) == 0
    capsys.readouterr()

    show = ["bench", "history", "--db", db, "--show", "1"]
    assert cli.main([*show, "--log-level", "WARNING"]) == 0
    shown = capsys.readouterr().out.splitlines()
    assert shown[0].startswith("1\tbench synthetic\t")
    assert len(shown) == 1 + 4
    assert shown[1].startswith("learned_treap\ttrial=0\tn=30")

    assert cli.main(["bench", "history", "--db", db, "--delete", "1"]) == 0
    assert "Deleted run 1." in capsys.readouterr().out
    assert cli.main(["bench", "history", "--db", db]) == 0
    assert "No recorded runs." in capsys.readouterr().out


def test_history_unknown_run_id(tmp_path):
    db = f"sqlite:///{tmp_path / 'history.db'}"
    for action in ("--show", "--delete"):
        code = cli.main(["bench", "history", "--db", db, action, "5"])
        assert code == cli.EXIT_BAD_INPUT


def test_history_needs_database(monkeypatch):
    monkeypatch.setattr(cli.settings, "RESULTS_DATABASE_URL", None)
    assert cli.main(["bench", "history"]) == cli.EXIT_BAD_INPUT


def test_verify_theory_pass(tmp_path, capsys):
    out = tmp_path / "theory.csv"
    code = cli.main(
        ["verify", "theory", "--kind", "zipf_closed_form", "--out", str(out)]
    )
    assert code == cli.EXIT_OK
    assert "zipf_closed_form: PASS" in capsys.readouterr().out
    assert pd.read_csv(out)["passed"].all()


def test_verify_theory_unknown_kind():
    assert cli.main(["verify", "theory", "--kind", "nope"]) == 2


def test_verify_theory_failure_exit_code(monkeypatch):
    failing = TheoryReport("fake", {})
    failing.add(TheoryCheck("always", 0.0, 1.0, 0.0, False))
    monkeypatch.setattr(
        cli, "run_theory_checks", lambda kinds, params: [failing]
    )
    code = cli.main(["verify", "theory", "--kind", "zipf_closed_form"])
    assert code == cli.EXIT_THEORY_FAILED


def test_verify_theory_single_key_random_depth():
    code = cli.main(
        [
            "verify",
            "theory",
            "--kind",
            "random_depth",
            "--n",
            "1",
            "--trials",
            "3",
        ]
    )
    assert code == cli.EXIT_OK


def test_analytics_errors_exit_with_bad_input(monkeypatch):
    def reject(kinds, params):
        raise AnalyticsError("k must be in 1..5, got 9")

    monkeypatch.setattr(cli, "run_theory_checks", reject)
    code = cli.main(["verify", "theory", "--kind", "topk"])
    assert code == cli.EXIT_BAD_INPUT


def test_unexpected_errors_propagate(monkeypatch, tmp_path):
    def boom(config):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "run_synthetic", boom)
    with pytest.raises(RuntimeError):
        cli.main(_synthetic_args(tmp_path / "x.csv"))
