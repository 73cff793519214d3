import json

import pytest

from squareham.cli import run_command
from squareham.graphcore import graph_from_edgelist_text


def run(*argv: str) -> int:
    return run_command(list(argv))


def write_graph(tmp_path, name: str, n: int, p: float, seed: int) -> str:
    path = str(tmp_path / name)
    assert run("generate", "-n", str(n), "-p", str(p), "--seed", str(seed),
               "--out", path) == 0
    return path


def test_generate_writes_graph_and_manifest_sidecar(tmp_path) -> None:
    out = tmp_path / "g.edges"
    assert run("generate", "-n", "12", "-p", "0.5", "--seed", "3",
               "--out", str(out)) == 0
    g = graph_from_edgelist_text(out.read_text())
    assert g.n == 12
    manifest = json.loads((tmp_path / "g.edges.manifest.json").read_text())
    for key in ("command", "argv", "config", "seed", "version",
                "wall_clock_seconds", "outputs"):
        assert key in manifest
    assert manifest["command"] == "generate"
    assert manifest["seed"] == 3


def test_generate_without_out_prints_to_stdout(capsys) -> None:
    assert run("generate", "-n", "6", "-p", "1.0", "--seed", "0") == 0
    text = capsys.readouterr().out
    g = graph_from_edgelist_text(text)
    assert g.n == 6 and g.edge_count == 15


def test_seeded_outputs_are_byte_identical_across_runs(tmp_path) -> None:
    a, b = tmp_path / "a.edges", tmp_path / "b.edges"
    for out in (a, b):
        assert run("generate", "-n", "40", "-p", "0.3", "--seed", "9",
                   "--out", str(out)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_attack_reports_the_class_and_removed_count(tmp_path, capsys) -> None:
    graph = write_graph(tmp_path, "g.edges", 30, 0.5, 1)
    assert run("attack", "--graph", graph, "--gamma", "0.1", "--seed", "2") == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"v1", "v2", "removed_edge_count", "graph"}
    assert len(payload["v1"]) + len(payload["v2"]) == 30


def test_attack_rejects_gamma_out_of_range(tmp_path) -> None:
    graph = write_graph(tmp_path, "g.edges", 10, 0.5, 0)
    assert run("attack", "--graph", graph, "--gamma", "0.6", "--seed", "0") == 2


def test_profile_csv_has_one_row_per_vertex(tmp_path, capsys) -> None:
    before = write_graph(tmp_path, "before.edges", 15, 0.8, 4)
    after = str(tmp_path / "after.edges")
    assert run("attack", "--graph", before, "--gamma", "0.0", "--seed", "4",
               "--format", "edgelist", "--out", after) == 0
    assert run("profile", "--before", before, "--after", after,
               "--format", "csv") == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "vertex,before,after,retained"
    assert len(lines) == 16


def test_find_then_verify_round_trips(tmp_path, capsys) -> None:
    graph = write_graph(tmp_path, "g.edges", 100, 0.6, 12)
    cert = str(tmp_path / "cert.json")
    assert run("find", "--graph", graph, "--seed", "0", "--out", cert) == 0
    assert run("verify", "--graph", graph, "--certificate", cert) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is True


def test_verify_fails_against_a_different_graph(tmp_path, capsys) -> None:
    graph = write_graph(tmp_path, "g.edges", 100, 0.6, 12)
    other = write_graph(tmp_path, "h.edges", 100, 0.6, 13)
    cert = str(tmp_path / "cert.json")
    assert run("find", "--graph", graph, "--seed", "0", "--out", cert) == 0
    assert run("verify", "--graph", other, "--certificate", cert) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is False


def test_find_failure_emits_a_staged_report_with_exit_one(tmp_path, capsys) -> None:
    graph = write_graph(tmp_path, "g.edges", 40, 0.05, 0)
    assert run("find", "--graph", graph, "--seed", "0") == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["stage"]
    assert "diagnostics" in payload


def test_find_reads_key_value_config_files(tmp_path) -> None:
    graph = write_graph(tmp_path, "g.edges", 100, 0.6, 12)
    config = tmp_path / "pipeline.cfg"
    config.write_text("# tuning\nrestarts = 4\n")
    cert = str(tmp_path / "cert.json")
    assert run("find", "--graph", graph, "--config", str(config),
               "--seed", "1", "--out", cert) == 0
    manifest = json.loads((tmp_path / "cert.json.manifest.json").read_text())
    assert manifest["config"]["restarts"] == 4
    assert manifest["config"]["seed"] == 1


def test_unknown_config_keys_are_a_usage_error(tmp_path) -> None:
    graph = write_graph(tmp_path, "g.edges", 20, 0.5, 0)
    config = tmp_path / "bad.cfg"
    config.write_text("wibble = 3\n")
    assert run("find", "--graph", graph, "--config", str(config)) == 2


def test_connect_embeds_each_requested_pair(tmp_path, capsys) -> None:
    graph = write_graph(tmp_path, "g.edges", 30, 1.0, 0)
    assert run("connect", "--graph", graph, "--pairs", "0,1,2,3",
               "--length", "4", "--seed", "5") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    (emb,) = payload["embeddings"]
    assert emb[:2] == [0, 1] and emb[-2:] == [2, 3]


def test_connect_rejects_malformed_job_strings(tmp_path) -> None:
    graph = write_graph(tmp_path, "g.edges", 10, 1.0, 0)
    assert run("connect", "--graph", graph, "--pairs", "0,1,2") == 2


def test_absorber_build_verify_round_trips(tmp_path, capsys) -> None:
    graph = write_graph(tmp_path, "g.edges", 120, 0.55, 7)
    absorber = str(tmp_path / "absorber.json")
    assert run("absorber", "build", "--graph", graph, "--x", "0,1,2",
               "--seed", "3", "--out", absorber) == 0
    assert run("absorber", "verify", "--graph", graph,
               "--absorber", absorber) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is True
    assert report["subsets_checked"] == 8


def test_absorber_verify_detects_a_mismatched_host(tmp_path) -> None:
    graph = write_graph(tmp_path, "g.edges", 120, 0.55, 7)
    other = write_graph(tmp_path, "h.edges", 120, 0.15, 8)
    absorber = str(tmp_path / "absorber.json")
    assert run("absorber", "build", "--graph", graph, "--x", "0,1,2",
               "--seed", "3", "--out", absorber) == 0
    assert run("absorber", "verify", "--graph", other,
               "--absorber", absorber) == 1


def test_absorber_build_failure_reports_a_stage(tmp_path, capsys) -> None:
    graph = write_graph(tmp_path, "g.edges", 30, 0.5, 0)
    assert run("absorber", "build", "--graph", graph, "--x", "0,1,2",
               "--seed", "0") == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["stage"] == "partition"


def test_gadget_edgelist_matches_the_template_size(capsys) -> None:
    assert run("gadget", "--kind", "square-path", "--length", "8",
               "--format", "edgelist") == 0
    g = graph_from_edgelist_text(capsys.readouterr().out)
    assert g.n == 8 and g.edge_count == 13
    assert run("gadget", "--kind", "backbone", "--blocks", "3") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["labels"] == 12
    assert len(payload["edges"]) == 21


def test_gadget_rejects_missing_parameters() -> None:
    assert run("gadget", "--kind", "pseudo-path", "--length", "7") == 2
    assert run("gadget", "--kind", "square-path") == 2
    assert run("gadget", "--kind", "backbone", "--blocks", "1") == 2


def test_experiment_json_and_csv_agree_on_seed_count(tmp_path) -> None:
    js, cs = tmp_path / "r.json", tmp_path / "r.csv"
    assert run("experiment", "-n", "40", "-p", "0.5", "--gamma", "0.1",
               "--seeds", "2", "--out", str(js)) == 0
    assert run("experiment", "-n", "40", "-p", "0.5", "--gamma", "0.1",
               "--seeds", "2", "--format", "csv", "--out", str(cs)) == 0
    report = json.loads(js.read_text())
    assert len(report["per_seed"]) == 2
    assert len(cs.read_text().strip().split("\n")) == 3


def test_experiment_jobs_do_not_change_the_bytes(tmp_path) -> None:
    one, two = tmp_path / "one.json", tmp_path / "two.json"
    base = ["experiment", "-n", "40", "-p", "0.5", "--gamma", "0.1",
            "--seeds", "3"]
    assert run(*base, "--jobs", "1", "--out", str(one)) == 0
    assert run(*base, "--jobs", "2", "--out", str(two)) == 0
    assert one.read_bytes() == two.read_bytes()


def test_cover_reports_paths_and_leftover(tmp_path, capsys) -> None:
    graph = write_graph(tmp_path, "g.edges", 60, 0.7, 2)
    assert run("cover", "--graph", graph, "--seed", "1") == 0
    payload = json.loads(capsys.readouterr().out)
    assert "paths" in payload and "leftover" in payload
    covered = sum(len(p) for p in payload["paths"]) + len(payload["leftover"])
    assert covered == 60


def test_missing_input_files_exit_three(tmp_path) -> None:
    assert run("find", "--graph", str(tmp_path / "absent.edges")) == 3
    assert run("verify", "--graph", str(tmp_path / "absent.edges"),
               "--certificate", str(tmp_path / "nope.json")) == 3


def test_malformed_graph_files_are_usage_errors(tmp_path) -> None:
    bad = tmp_path / "bad.edges"
    bad.write_text("3 5\n0 1\n")
    assert run("find", "--graph", str(bad)) == 2


def test_argparse_failures_surface_as_exit_two(capsys) -> None:
    assert run() == 2
    assert run("generate", "-n", "5") == 2
    capsys.readouterr()


def test_version_flag_exits_cleanly(capsys) -> None:
    assert run("--version") == 0
    assert capsys.readouterr().out.strip()
