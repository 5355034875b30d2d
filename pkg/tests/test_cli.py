import json
from pathlib import Path

import pytest

from ein.cli import main
from ein.config import ConfigValidationError, build_config, load_config, parse_config_text
from ein.corpus import Corpus, Document, save_corpus
from ein.experiment import EXIT_CONFIG, EXIT_DATA, EXIT_OK, sha256_file

BUNDLED = Path(__file__).resolve().parents[1] / "configs" / "synthetic.cfg"
_PATH_KEYS = ("corpus.path", "embeddings.path", "lexicon.", "analysis.wordlist.", "analysis.corpus.")


def bundled_raw():
    raw = parse_config_text(BUNDLED.read_text(encoding="utf-8"))
    for k, v in raw.items():
        if k.startswith(_PATH_KEYS):
            raw[k] = str((BUNDLED.parent / v).resolve())
    return raw


def write_cfg(tmp_path, name="exp.cfg", drop=(), **over):
    raw = bundled_raw()
    raw["output.dir"] = str(tmp_path / "out")
    for k in drop:
        raw.pop(k, None)
    raw.update({k.replace("__", "."): str(v) for k, v in over.items()})
    p = tmp_path / name
    p.write_text("".join(f"{k} = {v}\n" for k, v in raw.items()), encoding="utf-8")
    return p


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# --- config grammar -----------------------------------------------------------

def test_parse_comments_and_case():
    raw = parse_config_text("# header\nSeed = 3   # inline\n\nlexicon.EmoLex = a#b.tsv\n")
    assert raw == {"seed": "3", "lexicon.EmoLex": "a#b.tsv"}


@pytest.mark.parametrize("text", ["seed = 1\nseed = 2\n", "no equals sign\n", " = 4\n"])
def test_parse_errors(text):
    with pytest.raises(ConfigValidationError):
        parse_config_text(text)


@pytest.mark.parametrize("raw", [
    {"corpus.path": "c.jsonl"},
    {"seed": "0"},
    {"seed": "x", "corpus.path": "c.jsonl"},
    {"seed": "0", "corpus.path": "c", "model.seed": "4"},
    {"seed": "0", "corpus.path": "c", "model.colour": "red"},
    {"seed": "0", "corpus.path": "c", "mystery": "1"},
    {"seed": "0", "corpus.path": "c", "split.kfold": "1"},
    {"seed": "0", "corpus.path": "c", "model.kind": "bert"},
    {"seed": "0", "corpus.path": "c", "lexicon.Roget": "r.tsv"},
    {"seed": "0", "corpus.path": "c", "model.drop_c": "1.5"},
])
def test_invalid_configs(raw):
    with pytest.raises(ConfigValidationError):
        build_config(raw)


def test_build_config_values(tmp_path):
    cfg = build_config({"seed": "5", "corpus.path": "c.jsonl", "model.kind": "lstm",
                        "model.preset": "twitter", "model.epochs": "3",
                        "lexicon.emolex": "e.tsv"}, base=tmp_path, default_name="demo")
    assert cfg.network.dense_a_units == 0 and cfg.network.seed == 5 and cfg.network.epochs == 3
    assert cfg.network.lstm_units == 180
    assert cfg.corpus_path == tmp_path / "c.jsonl"
    assert cfg.output_dir == tmp_path / "runs" / "demo"
    assert list(cfg.lexicon_paths) == ["EmoLex"]


def test_seed_override_and_hash(tmp_path):
    p = write_cfg(tmp_path)
    a, b = load_config(p), load_config(p, seed=7)
    assert b.seed == 7 and b.network.seed == 7
    assert a.config_hash() != b.config_hash()
    assert load_config(p).config_hash() == a.config_hash()


def test_validate_lists_missing_files(tmp_path):
    cfg = load_config(write_cfg(tmp_path, lexicon__EmoLex=tmp_path / "nope.tsv",
                                corpus__path=tmp_path / "gone.jsonl"))
    with pytest.raises(ConfigValidationError, match="nope.tsv.*gone.jsonl|gone.jsonl.*nope.tsv"):
        cfg.validate()


# --- commands ----------------------------------------------------------------

@pytest.fixture(scope="module")
def bundled_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundled")
    assert main(["--config", str(BUNDLED), "--out", str(out), "run"]) == EXIT_OK
    return out


def test_bundled_config_smoke(bundled_run):
    metrics = json.loads((bundled_run / "metrics.json").read_text())
    assert metrics["model"] == "ein" and len(metrics["labels"]) == 5
    assert metrics["test"]["macro_f1"] > 40.0
    for name in ("model.ein", "history.json", "prepare/splits.json", "prepare/emotion_features.csv"):
        assert (bundled_run / name).is_file()


def test_manifest_is_complete_and_hashed(bundled_run):
    man = json.loads((bundled_run / "manifest.json").read_text())
    assert man["complete"] and man["seed"] == 0 and "error" not in man
    assert {s["status"] for s in man["stages"].values()} == {"complete"}
    for rel, art in man["artifacts"].items():
        assert art["complete"] and sha256_file(bundled_run / rel) == art["sha256"]


def test_rerun_is_byte_identical(bundled_run, tmp_path):
    assert main(["--config", str(BUNDLED), "--out", str(tmp_path), "run"]) == EXIT_OK
    for name in ("metrics.json", "model.ein", "history.json", "prepare/splits.json"):
        assert (tmp_path / name).read_bytes() == (bundled_run / name).read_bytes()


def test_global_flags_after_subcommand(capsys, tmp_path):
    p = write_cfg(tmp_path, model__kind="majority")
    code, out, _ = run_cli(capsys, "run", "--config", p, "--out", tmp_path / "o2")
    assert code == EXIT_OK and json.loads(out)["model"] == "majority"


def test_missing_lexicon_fails_before_work(capsys, tmp_path):
    p = write_cfg(tmp_path, lexicon__LIWC=tmp_path / "missing.tsv")
    code, _, err = run_cli(capsys, "--config", p, "run")
    assert code == EXIT_CONFIG and "missing.tsv" in err
    assert not (tmp_path / "out").exists()


def test_w2v_without_embeddings_is_config_error(capsys, tmp_path):
    p = write_cfg(tmp_path, drop=["embeddings.path"], model__kind="w2v_lr")
    assert run_cli(capsys, "--config", p, "run")[0] == EXIT_CONFIG


def test_no_config_is_config_error(capsys):
    assert run_cli(capsys, "run")[0] == EXIT_CONFIG


def test_evaluate_without_model_marks_stage(capsys, tmp_path):
    p = write_cfg(tmp_path, model__kind="majority")
    code, _, err = run_cli(capsys, "--config", p, "evaluate")
    assert code == EXIT_DATA and "[evaluate]" in err
    man = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert man["error"]["stage"] == "evaluate" and not man["complete"]
    assert man["stages"]["evaluate"]["status"] == "failed"
    assert man["stages"]["prepare"]["status"] == "complete"


def test_bad_corpus_is_data_error(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "1", "text": "x"}\n')
    p = write_cfg(tmp_path, corpus__path=bad)
    assert run_cli(capsys, "--config", p, "prepare")[0] == EXIT_DATA


def test_train_then_evaluate(capsys, tmp_path):
    p = write_cfg(tmp_path, model__kind="emotion_rf", classifier__n_trees=10)
    assert run_cli(capsys, "--config", p, "prepare")[0] == EXIT_OK
    assert run_cli(capsys, "--config", p, "train")[0] == EXIT_OK
    code, out, _ = run_cli(capsys, "--config", p, "evaluate")
    assert code == EXIT_OK and json.loads(out)["test"]["macro_f1"] > 60
    man = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert {"train", "evaluate", "prepare"} <= set(man["stages"])
    assert "model.json" in man["artifacts"]


@pytest.mark.parametrize("kind", ["bow_svm", "w2v_lr", "random", "lstm"])
def test_other_model_kinds(capsys, tmp_path, kind):
    p = write_cfg(tmp_path, model__kind=kind, model__epochs=3)
    code, out, _ = run_cli(capsys, "--config", p, "run")
    assert code == EXIT_OK and json.loads(out)["model"] == kind


def test_kfold(capsys, tmp_path):
    p = write_cfg(tmp_path, model__kind="majority", split__kfold=4)
    code, out, _ = run_cli(capsys, "--config", p, "run")
    m = json.loads(out)
    assert code == EXIT_OK and len(m["folds"]) == 4 and sum(m["test_documents"]) == 300


def test_analyze_outputs(capsys, bundled_run, tmp_path):
    code, out, _ = run_cli(capsys, "--config", BUNDLED, "--out", tmp_path, "analyze")
    assert code == EXIT_OK
    top = json.loads(out)["top_emotions"]
    assert top["clickbait"][0] == "surprise" and top["satire"][0] == "disgust"
    rows = {r["wordlist"]: r for r in json.loads((tmp_path / "analysis" / "wordlists.json").read_text())}
    assert rows["hedges"]["ordering"] == ["corpus", "tweets"]
    assert rows["boosters"]["ordering"] == ["tweets", "corpus"]
    tt = json.loads((tmp_path / "analysis" / "ttest.json").read_text())
    assert len(tt["rows"]) == 38 and tt["n_real"] == 60


def test_single_class_analysis(capsys, tmp_path):
    docs = [Document(f"d{i}", " ".join(f"w{i}x{j}" for j in range(40)), "real", "news_articles")
            for i in range(12)]
    save_corpus(Corpus(docs, ["real"]), tmp_path / "one.jsonl")
    p = write_cfg(tmp_path, corpus__path=tmp_path / "one.jsonl", model__kind="majority")
    code, out, _ = run_cli(capsys, "--config", p, "analyze")
    assert code == EXIT_OK
    report = json.loads((tmp_path / "out" / "analysis" / "analysis.json").read_text())
    assert all(r["score"] == 0.0 for r in report["information_gain"])
    assert any(n.startswith("t-test skipped") for n in report["notices"])


def test_project(capsys, bundled_run):
    code, out, _ = run_cli(capsys, "--config", BUNDLED, "--out", bundled_run, "project")
    assert code == EXIT_OK
    lines = (bundled_run / "projection_test.csv").read_text().splitlines()
    assert lines[0] == "id,label,x,y" and len(lines) == 61


def test_project_needs_network(capsys, tmp_path):
    p = write_cfg(tmp_path, model__kind="majority")
    assert run_cli(capsys, "--config", p, "project")[0] == EXIT_CONFIG


def test_stats(capsys):
    code, out, _ = run_cli(capsys, "stats", BUNDLED.parent / "synthetic" / "corpus.jsonl")
    assert code == EXIT_OK
    s = json.loads(out)
    assert s["total"] == 300
    code, out2, _ = run_cli(capsys, "--config", BUNDLED, "stats")
    assert json.loads(out2) == s
