"""Command-line surface: ingestion, reports, determinism, exit codes."""

import csv
import json

import pytest

from hogforge.cli import build_parser, ingest, main
from hogforge.errors import DuplicateId

from conftest import CORPUS_DIR, VOCAB_DIR

GOOD_ROW = {"id": "good", "code": "int f(int n) { int s = 0; for (int i = 0; i < n; i = i + 1) { s = s + i; } return s; }",
            "label": 1, "inputs": [[3]]}


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write((row if isinstance(row, str) else json.dumps(row)) + "\n")


@pytest.fixture
def small_corpus(tmp_path):
    path = tmp_path / "corpus.jsonl"
    rows = [
        GOOD_ROW,
        {"id": "other", "code": "int g(int a, int b) { int c = a * b; return c + a; }",
         "label": 0, "inputs": [[2, 3]]},
    ]
    write_jsonl(path, rows)
    return path


def test_ingest_happy_path(small_corpus):
    rows, errors = ingest(small_corpus)
    assert not errors
    assert [r["id"] for r in rows] == ["good", "other"]
    assert rows[0]["unit"].identifiers


def test_ingest_collects_recoverable_errors(tmp_path):
    path = tmp_path / "bad.jsonl"
    write_jsonl(path, [
        GOOD_ROW,
        "this is not json",
        {"id": "nolabel", "code": "int f() { return 1; }", "inputs": []},
        {"id": "badcode", "code": "int f( {", "label": 1, "inputs": []},
        {"id": "badinputs", "code": "int f() { return 1; }", "label": 1,
         "inputs": [[True]]},
        {"id": 7, "code": "int f() { return 1; }", "label": 1, "inputs": []},
    ])
    rows, errors = ingest(path)
    assert [r["id"] for r in rows] == ["good"]
    assert len(errors) == 5
    lines = [e["line"] for e in errors]
    assert lines == [2, 3, 4, 5, 6]
    assert all(e["error"] for e in errors)


def test_ingest_duplicate_id_fatal(tmp_path):
    path = tmp_path / "dup.jsonl"
    write_jsonl(path, [GOOD_ROW, GOOD_ROW])
    with pytest.raises(DuplicateId):
        ingest(path)


def run_cli(*argv):
    return main(list(argv))


def test_attack_report_schema(small_corpus, tmp_path):
    out = tmp_path / "report.json"
    code = run_cli("attack", "--corpus", str(small_corpus),
                   "--victim", "constant:0.9", "--budget", "40",
                   "--seed", "3", "--out", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert report["tool"] == "hogforge"
    assert report["seed"] == 3
    assert report["wall_clock_seconds"] is None
    assert report["config"]["budget"] == 40
    assert {o["sample_id"] for o in report["outcomes"]} == {"good", "other"}
    for o in report["outcomes"]:
        assert set(o) >= {"sample_id", "status", "success", "queries_used",
                          "adversarial_code", "substitution", "transforms",
                          "channel_trace"}
    metrics = report["metrics"]
    assert metrics["samples_total"] == 2
    assert out.read_text().endswith("\n")


def test_attack_deterministic_byte_identical(small_corpus, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run_cli("attack", "--corpus", str(small_corpus),
                       "--victim", "token-bag", "--budget", "120",
                       "--seed", "9", "--jobs", "1", "--out", str(out)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_attack_csv_columns(small_corpus, tmp_path):
    out = tmp_path / "r.json"
    csv_path = tmp_path / "r.csv"
    run_cli("attack", "--corpus", str(small_corpus), "--victim",
            "constant:0.9", "--budget", "10", "--out", str(out),
            "--csv", str(csv_path))
    rows = list(csv.DictReader(open(csv_path)))
    assert len(rows) == 2
    assert list(rows[0]) == [
        "sample_id", "status", "success", "skipped", "true_label",
        "final_label", "p_orig", "p_adv", "delta_drop", "queries_used",
        "budget_exhausted", "substitution", "transforms"]


def test_attack_timings_flag(small_corpus, tmp_path):
    out = tmp_path / "r.json"
    run_cli("attack", "--corpus", str(small_corpus), "--victim",
            "constant:0.9", "--budget", "5", "--out", str(out), "--timings")
    assert json.loads(out.read_text())["wall_clock_seconds"] > 0


def test_attack_ingest_errors_in_report(tmp_path):
    path = tmp_path / "c.jsonl"
    write_jsonl(path, [GOOD_ROW, "garbage"])
    out = tmp_path / "r.json"
    assert run_cli("attack", "--corpus", str(path), "--victim",
                   "constant:0.9", "--budget", "5", "--out", str(out)) == 0
    report = json.loads(out.read_text())
    assert report["ingest_errors"][0]["line"] == 2


def test_attack_duplicate_id_exits_nonzero(tmp_path, capsys):
    path = tmp_path / "c.jsonl"
    write_jsonl(path, [GOOD_ROW, GOOD_ROW])
    assert run_cli("attack", "--corpus", str(path), "--victim",
                   "constant:0.9", "--out", str(tmp_path / "r.json")) == 2
    assert "duplicate" in capsys.readouterr().err


def test_attack_unknown_victim_exits_nonzero(small_corpus, tmp_path):
    assert run_cli("attack", "--corpus", str(small_corpus), "--victim",
                   "nosuch", "--out", str(tmp_path / "r.json")) == 2


def test_global_budget_requires_sequential(small_corpus, tmp_path):
    assert run_cli("attack", "--corpus", str(small_corpus), "--victim",
                   "constant:0.9", "--global-budget", "50", "--jobs", "2",
                   "--out", str(tmp_path / "r.json")) == 2


def test_global_budget_caps_total(small_corpus, tmp_path):
    out = tmp_path / "r.json"
    assert run_cli("attack", "--corpus", str(small_corpus), "--victim",
                   "constant:0.9", "--budget", "500", "--global-budget", "30",
                   "--out", str(out)) == 0
    report = json.loads(out.read_text())
    assert sum(o["queries_used"] for o in report["outcomes"]) <= 30


def test_seed_precedence_env_vs_flag(small_corpus, tmp_path, monkeypatch):
    out = tmp_path / "r.json"
    monkeypatch.setenv("HOGFORGE_SEED", "77")
    run_cli("attack", "--corpus", str(small_corpus), "--victim",
            "constant:0.9", "--budget", "5", "--out", str(out))
    assert json.loads(out.read_text())["seed"] == 77
    run_cli("attack", "--corpus", str(small_corpus), "--victim",
            "constant:0.9", "--budget", "5", "--seed", "5",
            "--out", str(out))
    assert json.loads(out.read_text())["seed"] == 5


def test_transform_command(tmp_path, capsys):
    src = tmp_path / "unit.c"
    src.write_text(GOOD_ROW["code"])
    assert run_cli("transform", "--input", str(src),
                   "--op", "For2While") == 0
    shown = capsys.readouterr().out
    assert "while" in shown
    assert "for" not in shown


def test_transform_inapplicable_reports_reason(tmp_path, capsys):
    src = tmp_path / "unit.c"
    src.write_text("int f(int x) { int y = x; return y; }")
    assert run_cli("transform", "--input", str(src),
                   "--op", "For2While") == 0
    assert "inapplicable" in capsys.readouterr().out.lower()


def test_transform_unknown_op(tmp_path):
    src = tmp_path / "unit.c"
    src.write_text(GOOD_ROW["code"])
    assert run_cli("transform", "--input", str(src), "--op", "NoSuch") == 2


def test_metrics_command_pairs(tmp_path, capsys):
    orig = tmp_path / "orig.jsonl"
    adv = tmp_path / "adv.jsonl"
    write_jsonl(orig, [GOOD_ROW])
    adv_row = dict(GOOD_ROW)
    adv_row["code"] = GOOD_ROW["code"].replace("s", "q")
    write_jsonl(adv, [adv_row])
    assert run_cli("metrics", "--orig", str(orig), "--adv", str(adv)) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["pairs"][0]["id"] == "good"
    assert payload["pairs"][0]["match_ast"] == pytest.approx(1.0)
    assert payload["means"]["codebleu"] < 1.0


def test_rank_command(tmp_path, capsys):
    corpus = tmp_path / "c.jsonl"
    write_jsonl(corpus, [GOOD_ROW])
    assert run_cli("rank", "--corpus", str(corpus), "--sample", "good",
                   "--identifier", "s",
                   "--vocab", str(VOCAB_DIR / "planted_vocab.txt"),
                   "--top", "5") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 5
    assert all("\t" in line for line in lines)


def test_compare_search_trajectories(tmp_path):
    out = tmp_path / "cmp.json"
    traj = tmp_path / "traj.jsonl"
    corpus = CORPUS_DIR / "executable.jsonl"
    assert run_cli("compare-search", "--corpus", str(corpus),
                   "--sample", "copy_n", "--victim", "planted",
                   "--vocab", str(VOCAB_DIR / "planted_vocab.txt"),
                   "--strategies", "pso,random", "--runs", "2",
                   "--seed", "13", "--dump-trajectories", str(traj),
                   "--out", str(out)) == 0
    report = json.loads(out.read_text())
    assert set(report["strategies"]) == {"pso", "random"}
    for line in traj.read_text().splitlines():
        row = json.loads(line)
        assert set(row) == {"strategy", "seed", "iteration",
                            "best_position", "best_fitness"}
        assert isinstance(row["best_position"], list)


def test_sweep_lambda_rejects_nonpositive(small_corpus, tmp_path):
    assert run_cli("sweep-lambda", "--corpus", str(small_corpus),
                   "--victim", "constant:0.9", "--values", "0.0",
                   "--out", str(tmp_path / "s.json")) == 2


def test_sweep_lambda_table(small_corpus, tmp_path):
    out = tmp_path / "s.json"
    assert run_cli("sweep-lambda", "--corpus", str(small_corpus),
                   "--victim", "token-bag", "--values", "1.0,2.0",
                   "--budget", "60", "--seed", "3", "--out", str(out)) == 0
    report = json.loads(out.read_text())
    assert [row["lambda"] for row in report["table"]] == [1.0, 2.0]
    assert set(report["runs"]) == {"1.0", "2.0"}


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as status:
        build_parser().parse_args(["--version"])
    assert status.value.code == 0


def test_report_outcomes_sorted_by_sample_id(tmp_path):
    path = tmp_path / "c.jsonl"
    rows = [
        {"id": "zz", "code": "int f(int a) { return a; }", "label": 0,
         "inputs": []},
        {"id": "aa", "code": "int g(int b) { return b; }", "label": 0,
         "inputs": []},
    ]
    write_jsonl(path, rows)
    out = tmp_path / "r.json"
    run_cli("attack", "--corpus", str(path), "--victim", "constant:0.1",
            "--budget", "5", "--out", str(out))
    report = json.loads(out.read_text())
    assert [o["sample_id"] for o in report["outcomes"]] == ["aa", "zz"]
