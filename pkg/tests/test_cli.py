import json
from pathlib import Path

import pytest

from astra.cli import main
from astra.config import load_config
from astra.pipeline import compose, read_prompt, run_pipeline

from generators import e2e_workspace


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("ASTRA_MODEL_ENDPOINT", raising=False)
    monkeypatch.delenv("ASTRA_EMBED_ENDPOINT", raising=False)


def only_run(root: Path) -> Path:
    runs = list((root / "runs").iterdir())
    assert len(runs) == 1
    return runs[0]


def test_usage_errors():
    assert main([]) == 2
    assert main(["bogus"]) == 2
    assert main(["resolve", "--file", "x"]) == 2
    assert main(["resolve", "--file", "x", "--accept", "--reject"]) == 2
    assert main(["--help"]) == 0


def test_blank_prompt_exit_3(tmp_path, fixtures, capsys):
    argv = e2e_workspace(fixtures, tmp_path)
    (tmp_path / "edit_prompt.txt").write_text(" \n\n")
    assert main(argv) == 3
    assert "error [" in capsys.readouterr().err


def test_missing_file_exit_3(tmp_path, capsys):
    assert main(["ast", "--file", str(tmp_path / "nope.cpp")]) == 3
    assert capsys.readouterr().err.startswith("error [io]")


def test_run_yes_matches_golden(tmp_path, fixtures, capsys):
    argv = e2e_workspace(fixtures, tmp_path)
    assert main(argv + ["--yes"]) == 0
    target = tmp_path / "simulation.cpp"
    assert target.read_bytes() == (fixtures / "e2e" / "simulation.golden.cpp").read_bytes()
    run = only_run(tmp_path)
    assert sorted(p.name for p in run.iterdir()) == [
        "code.txt", "prompt.txt", "proposal.json", "response.txt", "run.json"]
    summary = json.loads((run / "run.json").read_text())
    assert summary["intent"]["kind"] == "edit"
    assert summary["focus"] == ["Simulation", "init_data"]
    assert summary["decision"] == "accept"
    assert "ParallelFor" in capsys.readouterr().out
    assert not (tmp_path / "simulation.cpp.astra.bak").exists()


def test_run_no_records_only(tmp_path, fixtures):
    argv = e2e_workspace(fixtures, tmp_path)
    original = (tmp_path / "simulation.cpp").read_bytes()
    assert main(argv + ["--no"]) == 0
    assert (tmp_path / "simulation.cpp").read_bytes() == original
    run = only_run(tmp_path)
    assert (run / "proposal.json").is_file()
    assert json.loads((run / "run.json").read_text())["decision"] == "recorded"


def test_explain_writes_no_proposal(tmp_path, fixtures):
    argv = e2e_workspace(fixtures, tmp_path)
    argv[argv.index("--prompt-file") + 1] = str(tmp_path / "explain_prompt.txt")
    original = (tmp_path / "simulation.cpp").read_bytes()
    assert main(argv + ["--yes"]) == 0
    assert (tmp_path / "simulation.cpp").read_bytes() == original
    run = only_run(tmp_path)
    assert not (run / "proposal.json").exists()
    assert json.loads((run / "run.json").read_text())["intent"]["kind"] == "explain"


def pipeline_config(fixtures, tmp_path):
    return load_config(env={}, overrides={
        "index_path": str(fixtures / "e2e" / "index.json"),
        "model.kind": "replay", "model.replay_dir": str(fixtures / "e2e" / "replay"),
        "run_root": str(tmp_path / "runs")})


@pytest.mark.parametrize("answers,decision,golden", [
    (["x", "a"], "accept", True), (["r"], "reject", False), (["s"], "skip", None)])
def test_interactive_review(tmp_path, fixtures, answers, decision, golden):
    e2e_workspace(fixtures, tmp_path)
    target = tmp_path / "simulation.cpp"
    original = target.read_bytes()
    asked = iter(answers)
    outcome = run_pipeline(tmp_path / "edit_prompt.txt", target,
                           pipeline_config(fixtures, tmp_path), interactive=True,
                           ask=lambda _: next(asked))
    assert outcome.decision == decision
    if golden is True:
        assert target.read_bytes() == (fixtures / "e2e" / "simulation.golden.cpp").read_bytes()
    elif golden is False:
        assert target.read_bytes() == original
    else:
        assert "<<<<<<< current" in target.read_text()
        assert (tmp_path / "simulation.cpp.astra.bak").read_bytes() == original


def test_apply_and_resolve_commands(tmp_path, fixtures, capsys):
    e2e_workspace(fixtures, tmp_path)
    target = tmp_path / "simulation.cpp"
    original = target.read_bytes()
    src = fixtures / "e2e" / "generated_function.txt"
    argv = ["apply", "--file", str(target), "--class", "Simulation", "--function",
            "init_data", "--from", str(src), "--label", "codellama:13b-instruct"]
    assert main(argv) == 0
    assert ">>>>>>> astra:codellama:13b-instruct" in target.read_text()
    assert main(["resolve", "--file", str(target), "--reject"]) == 0
    assert target.read_bytes() == original
    assert main(argv) == 0
    assert main(["resolve", "--file", str(target), "--accept"]) == 0
    assert target.read_bytes() == (fixtures / "e2e" / "simulation.golden.cpp").read_bytes()
    assert main(["resolve", "--file", str(target), "--accept"]) == 3
    assert "error [edit_applier]" in capsys.readouterr().err


def test_ast_json(fixtures, capsys):
    f = fixtures / "e2e" / "simulation.cpp"
    assert main(["ast", "--file", str(f), "--class", "Simulation", "--function",
                 "init_data", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["focus"]["range"] == [8, 24]
    assert any(c["name"] == "Simulation" for c in out["classes"])


def test_ast_text(fixtures, capsys):
    f = fixtures / "e2e" / "simulation.cpp"
    assert main(["ast", "--file", str(f), "--function", "init_data",
                 "--class", "Simulation"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("TARGET FUNCTION:\n")
    assert "(lines 8–24)" in out


def test_query_json(tmp_path, fixtures, capsys):
    p = tmp_path / "q.txt"
    p.write_text("fill a MultiFab in parallel")
    assert main(["query", "--index", str(fixtures / "e2e" / "index.json"),
                 "--prompt-file", str(p), "--json", "--top-k", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [r["rank"] for r in out] == [1, 2]
    assert out[0]["score"] >= out[1]["score"]


def test_index_command(tmp_path, fixtures, capsys):
    out = tmp_path / "idx.json"
    assert main(["index", "--corpus", str(fixtures / "corpus"), "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["chunks"]) == 20
    assert main(["index", "--corpus", str(fixtures / "corpus"), "--out", str(out),
                 "--embedder-dim", "64"]) == 0
    p = tmp_path / "q.txt"
    p.write_text("copy")
    # index built at dim 64, queried at the default dim
    assert main(["query", "--index", str(out), "--prompt-file", str(p)]) == 3
    assert "error [embedding]" in capsys.readouterr().err


def test_prompt_command(tmp_path, fixtures, capsys):
    e2e_workspace(fixtures, tmp_path)
    cfg = pipeline_config(fixtures, tmp_path)
    assert main(["prompt", "--prompt-file", str(tmp_path / "edit_prompt.txt"),
                 "--index", cfg.index_path, "--file", str(tmp_path / "simulation.cpp")]) == 0
    out = capsys.readouterr().out
    from astra.indexer import load_index
    expected = compose(read_prompt(tmp_path / "edit_prompt.txt"), cfg,
                       load_index(cfg.index_path), tmp_path / "simulation.cpp").text
    assert out == expected


def test_generate_command(tmp_path, fixtures, capsys):
    argv = e2e_workspace(fixtures, tmp_path)
    argv[0] = "generate"
    argv = argv[:argv.index("--run-root")] + ["--out", str(tmp_path / "code.cpp")]
    assert main(argv) == 0
    assert (tmp_path / "code.cpp").read_text() == \
        (fixtures / "e2e" / "generated_function.txt").read_text().rstrip("\n") + "\n"


def test_replay_miss_exit_3(tmp_path, fixtures, capsys):
    argv = e2e_workspace(fixtures, tmp_path)
    (tmp_path / "edit_prompt.txt").write_text("Modify init_data to do something else")
    assert main(argv + ["--yes"]) == 3
    assert "error [model_client]" in capsys.readouterr().err


def test_eval_command(tmp_path, fixtures, capsys):
    d = fixtures / "eval" / "bench"
    csv_path = tmp_path / "out.csv"
    assert main(["eval", "--manifest", str(d / "tasks.json"), "--generations",
                 str(d / "generations"), "--models", "model-a,model-b",
                 "--csv", str(csv_path)]) == 0
    out = capsys.readouterr().out
    assert "Vector sum" in out and "Dense matmul" in out
    assert len(csv_path.read_text().splitlines()) == 9
    assert main(["eval", "--manifest", str(d / "tasks.json"), "--generations",
                 str(d / "generations"), "--models", "model-a,model-z"]) == 3
