import json

import numpy as np
import pytest

from textrf.cli import main

FAST_CONFIG = {
    "task": "har",
    "modality": "csi",
    "strategy": "TCE",
    "seeds": [0],
    "classes": ["walking", "waving", "falling"],
    "train_total": 30,
    "test_total": 12,
    "train": {"epochs": 8, "lr": 0.01, "batch_size": 10, "hidden": 16, "decay_every": 40},
}

FAST_TAL_CONFIG = {
    "task": "tal",
    "seeds": [0],
    "classes": ["walking", "waving"],
    "tal": {
        "levels": 2,
        "channels": 6,
        "train_recordings": 6,
        "test_recordings": 3,
        "length": 48,
        "epochs": 4,
        "lr": 0.01,
        "batch_size": 3,
    },
}


def write_config(tmp_path, doc, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_gen_counts_and_determinism(tmp_path):
    cfg = write_config(tmp_path, FAST_CONFIG)
    out1, out2 = tmp_path / "d1", tmp_path / "d2"
    assert main(["gen", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["gen", "--config", cfg, "--out", str(out2)]) == 0
    seq1 = (out1 / "train_sequences.bin").read_bytes()
    seq2 = (out2 / "train_sequences.bin").read_bytes()
    assert seq1 == seq2  # byte-identical datasets
    meta = json.loads((out1 / "meta.json").read_text())
    assert len(meta["train_labels"]) == 30
    assert len(meta["test_labels"]) == 12


def test_run_report_structure_and_determinism(tmp_path, capsys):
    cfg = write_config(tmp_path, FAST_CONFIG)
    data = tmp_path / "data"
    main(["gen", "--config", cfg, "--out", str(data)])
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["run", "--config", cfg, "--data", str(data), "--out", str(out1)]) == 0
    assert main(["run", "--config", cfg, "--data", str(data), "--out", str(out2)]) == 0
    csv1 = (out1 / "report.csv").read_bytes()
    csv2 = (out2 / "report.csv").read_bytes()
    assert csv1 == csv2  # byte-identical reports

    lines = csv1.decode().strip().splitlines()
    assert lines[0] == "model,accuracy"
    rows = {line.split(",")[0]: float(line.split(",")[1]) for line in lines[1:]}
    assert set(rows) == {"W", "W+T", "Delta", "W_std", "W+T_std"}
    assert rows["Delta"] == pytest.approx(rows["W+T"] - rows["W"], abs=1e-6)
    assert (out1 / "resolved_config.json").exists()


def test_run_zero_text_weight_delta_zero(tmp_path):
    cfg = write_config(tmp_path, FAST_CONFIG)
    data = tmp_path / "data"
    main(["gen", "--config", cfg, "--out", str(data)])
    out = tmp_path / "r0"
    assert main(
        ["run", "--config", cfg, "--data", str(data), "--out", str(out), "--text-weight", "0"]
    ) == 0
    lines = (out / "report.csv").read_text().strip().splitlines()
    rows = {line.split(",")[0]: float(line.split(",")[1]) for line in lines[1:]}
    assert rows["Delta"] == 0.0
    assert rows["W"] == rows["W+T"]


def test_tal_run_avg_column_is_threshold_mean(tmp_path):
    cfg = write_config(tmp_path, FAST_TAL_CONFIG, "tal.json")
    data, out = tmp_path / "tal_data", tmp_path / "tal_out"
    assert main(["gen", "--config", cfg, "--out", str(data)]) == 0
    assert main(["run", "--config", cfg, "--data", str(data), "--out", str(out)]) == 0
    lines = (out / "report.csv").read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header[0] == "model" and header[-1] == "Avg"
    for line in lines[1:]:
        cells = line.split(",")
        values = [float(v) for v in cells[1:-1]]
        assert float(cells[-1]) == pytest.approx(np.mean(values), abs=1e-6)


def test_ablate_matrix(tmp_path):
    cfg = write_config(tmp_path, FAST_CONFIG)
    data, out = tmp_path / "data", tmp_path / "ab"
    main(["gen", "--config", cfg, "--out", str(data)])
    assert main(
        [
            "ablate",
            "--config",
            cfg,
            "--data",
            str(data),
            "--out",
            str(out),
            "--strategies",
            "TLE,TCE,TDE",
        ]
    ) == 0
    lines = (out / "ablation.csv").read_text().strip().splitlines()
    assert lines[0] == "source,strategy,baseline,fused,delta"
    assert len(lines) == 4  # 3 strategies x 1 source
    baselines = {line.split(",")[2] for line in lines[1:]}
    assert len(baselines) == 1  # baseline is strategy-independent

    # matrix cell equals a standalone run with the same strategy
    solo = tmp_path / "solo"
    main(["run", "--config", cfg, "--data", str(data), "--out", str(solo), "--strategy", "TLE"])
    solo_rows = {
        line.split(",")[0]: float(line.split(",")[1])
        for line in (solo / "report.csv").read_text().strip().splitlines()[1:]
    }
    tle_row = [line for line in lines[1:] if line.split(",")[1] == "TLE"][0]
    assert float(tle_row.split(",")[3]) == pytest.approx(solo_rows["W+T"], abs=1e-6)


def test_embed_cache_round_trip(tmp_path):
    labels = tmp_path / "labels.txt"
    labels.write_text("walking\nwaving\nfalling\n")
    out = tmp_path / "cache.json"
    assert main(["embed", "--labels", str(labels), "--strategy", "TDE", "--dim", "8", "--out", str(out)]) == 0
    from textrf.text import load_embedding_cache

    cache = load_embedding_cache(out)
    assert cache.labels == ["walking", "waving", "falling"]
    assert cache.vectors_per_label == 3
    assert cache.dim == 8


def test_run_with_cache_file(tmp_path):
    labels = tmp_path / "labels.txt"
    labels.write_text("walking\nwaving\nfalling\n")
    cache_path = tmp_path / "cache.json"
    main(["embed", "--labels", str(labels), "--strategy", "TCE", "--dim", "16", "--out", str(cache_path)])
    cfg_doc = dict(FAST_CONFIG, embedding_source=str(cache_path))
    cfg = write_config(tmp_path, cfg_doc, "cache_cfg.json")
    data, out = tmp_path / "data", tmp_path / "out"
    main(["gen", "--config", cfg, "--out", str(data)])
    assert main(["run", "--config", cfg, "--data", str(data), "--out", str(out)]) == 0


def test_report_rerenders_csv(tmp_path, capsys):
    csv = tmp_path / "r.csv"
    csv.write_text("model,accuracy\nW,0.95\nW+T,0.97\n")
    assert main(["report", "--csv", str(csv)]) == 0
    out = capsys.readouterr().out
    assert "model" in out and "W+T" in out


def test_missing_dataset_fails_with_json_error(tmp_path, capsys):
    cfg = write_config(tmp_path, FAST_CONFIG)
    rc = main(["run", "--config", cfg, "--data", str(tmp_path / "nope"), "--out", str(tmp_path / "x")])
    assert rc == 1
    err = capsys.readouterr().err.strip().splitlines()[-1]
    parsed = json.loads(err)
    assert "error" in parsed and "message" in parsed


def test_missing_cache_file_rejected_at_config(tmp_path, capsys):
    cfg_doc = dict(FAST_CONFIG, embedding_source=str(tmp_path / "absent.json"))
    cfg = write_config(tmp_path, cfg_doc, "bad.json")
    rc = main(["gen", "--config", cfg, "--out", str(tmp_path / "d")])
    assert rc == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert "absent.json" in err["message"]


def test_ablate_continues_past_failing_cell(tmp_path):
    cfg = write_config(tmp_path, FAST_CONFIG)
    data, out = tmp_path / "data", tmp_path / "ab_fail"
    main(["gen", "--config", cfg, "--out", str(data)])
    from textrf.experiment import ExperimentConfig, run_ablation

    result = run_ablation(
        ExperimentConfig.from_dict(FAST_CONFIG),
        data,
        out,
        strategies=["TLE", "TCE"],
        sources=[str(tmp_path / "missing.json"), "pseudo"],
    )
    assert len(result["failures"]) == 2  # both cells of the missing source fail
    ok_rows = [r for r in result["rows"] if r[0] == "pseudo"]
    assert len(ok_rows) == 2 and all(np.isfinite(r[2]) for r in ok_rows)
    assert (out / "failures.json").exists()
