import json
import os

import pandas as pd
import pytest

from src.main import EXIT_BIAS, EXIT_ERROR, EXIT_OK, build_parser, main
from src.modules.classifiers import load_model

AUDIT_FLAGS = ["--approaches", "svm_mfcc", "--conditions", "speech,nonspeech", "--seeds", "17",
               "--grid-c", "10", "--grid-gamma", "0.1", "--threads", "1"]


def read_bytes(path):
    with open(path, "rb") as handle:
        return handle.read()


def test_synth_is_deterministic(tmp_path, capsys):
    args = ["--speakers", "2", "--utts", "2", "--snr-a", "30", "--snr-b", "0", "--seed", "7", "--threads", "1"]
    assert main(["synth", "--out", str(tmp_path / "one")] + args) == EXIT_OK
    printed = capsys.readouterr().out.strip().splitlines()[-1]
    assert printed == os.path.join(str(tmp_path / "one"), "manifest.tsv")
    assert main(["synth", "--out", str(tmp_path / "two")] + args) == EXIT_OK
    for rel in ("manifest.tsv", "ground_truth.json", os.path.join("wav", "spkB01", "u001.wav")):
        assert read_bytes(tmp_path / "one" / rel) == read_bytes(tmp_path / "two" / rel)


def test_snr_command(small_synth, tmp_path, capsys):
    out = tmp_path / "snr.csv"
    assert main(["snr", small_synth.manifest_path, "--out", str(out)]) == EXIT_OK
    table = pd.read_csv(out)
    assert len(table) == 24
    groups = pd.read_csv(tmp_path / "snr_groups.csv")
    means = groups[groups["method"] == "percentile"].set_index("group")["mean_db"]
    assert means["A"] - means["B"] >= 15.0
    assert "UTTERANCE-LEVEL SNR PER GROUP" in capsys.readouterr().out


def test_snr_of_silent_corpus_is_clamped(tmp_path):
    from src.modules.corpus import write_wav
    import numpy as np

    lines = []
    for speaker, group in (("s1", "A"), ("s2", "B")):
        rel = f"wav/{speaker}/u000.wav"
        write_wav(str(tmp_path / rel), np.zeros(16000))
        lines.append(f"{speaker}\t{group}\t{rel}")
    (tmp_path / "manifest.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    out = tmp_path / "snr.csv"
    assert main(["snr", str(tmp_path / "manifest.tsv"), "--out", str(out)]) == EXIT_OK
    assert pd.read_csv(out)["snr_db"].tolist() == [-20.0, -20.0]


def test_vad_command(small_synth, tmp_path):
    out = tmp_path / "segments.json"
    assert main(["vad", small_synth.manifest_path, "--out", str(out), "--vad-hangover-frames", "0"]) == EXIT_OK
    records = json.loads(out.read_text(encoding="utf-8"))
    assert {r["utterance_id"] for r in records} == {f"spk{g}0{s}/u00{u}" for g in "AB" for s in range(3) for u in range(4)}
    assert {r["label"] for r in records} == {"speech", "nonspeech"}


def test_features_command(small_synth, tmp_path):
    out = tmp_path / "features.csv"
    code = main(["features", small_synth.manifest_path, "--kind", "sparsity", "--condition", "combined", "--out", str(out)])
    assert code == EXIT_OK
    frame = pd.read_csv(out)
    assert frame.shape == (24, 3 + 129)
    assert set(frame["kind"]) == {"sparsity"}


def test_audit_writes_reports_and_is_reproducible(small_synth, tmp_path, capsys):
    args = ["audit", "--manifest", small_synth.manifest_path, "--output-dir", str(tmp_path),
            "--report-name", "small", "--print-json"] + AUDIT_FLAGS
    code = main(args)
    assert code in (EXIT_OK, EXIT_BIAS)
    first = read_bytes(tmp_path / "small.audit.json")
    payload = json.loads(first)
    assert code == (EXIT_BIAS if payload["flags"]["environment_bias"] else EXIT_OK)
    assert payload["flags"]["snr_gap"] is True
    assert [(r["approach"], r["condition"]) for r in payload["results"]] == [
        ("svm_mfcc", "nonspeech"), ("svm_mfcc", "speech"),
    ]
    assert '"corpus_id": "small"' in capsys.readouterr().out

    text = (tmp_path / "small.audit.txt").read_text(encoding="utf-8")
    row = next(line for line in text.splitlines() if line.strip().startswith("svm_mfcc"))
    assert row.rstrip().endswith("/ -")

    assert main(args) == code
    assert read_bytes(tmp_path / "small.audit.json") == first


def test_audit_keeps_fold_models_on_request(small_synth, tmp_path):
    models = tmp_path / "models"
    code = main(["audit", "--manifest", small_synth.manifest_path, "--output-dir", str(tmp_path),
                 "--report-name", "kept", "--model-dir", str(models)] + AUDIT_FLAGS)
    assert code in (EXIT_OK, EXIT_BIAS)
    for condition in ("speech", "nonspeech"):
        saved = sorted(os.listdir(models / "svm_mfcc" / condition / "seed17"))
        assert saved == [f"spk{g}{i:02d}.json" for g in "AB" for i in range(3)]
    assert load_model(str(models / "svm_mfcc" / "nonspeech" / "seed17" / "spkB01.json")).kind == "svm"


def test_audit_reads_config_file(small_synth, tmp_path):
    config = tmp_path / "audit.conf"
    config.write_text(
        f"manifest={small_synth.manifest_path}\noutput_dir=out\nreport_name=from_file\n"
        "approaches=svm_mfcc\nconditions=speech,nonspeech\nseeds=17\ngrid_c=10\ngrid_gamma=0.1\n",
        encoding="utf-8",
    )
    code = main(["audit", "--config", str(config), "--threads", "1"])
    assert code in (EXIT_OK, EXIT_BIAS)
    assert (tmp_path / "out" / "from_file.audit.json").exists()


def test_audit_errors_exit_with_one(tmp_path):
    assert main(["audit", "--manifest", str(tmp_path / "absent.tsv"), "--output-dir", str(tmp_path)]) == EXIT_ERROR
    assert main(["audit", "--config", str(tmp_path / "absent.conf")]) == EXIT_ERROR
    with pytest.raises(SystemExit) as excinfo:
        main(["audit", "--val-fraction", "lots"])
    assert excinfo.value.code == EXIT_ERROR


@pytest.mark.parametrize("command, expected", [
    ("synth", ["--speakers", "--snr-b", "--tilt-b", "--noise", "(default: 10)", "(default: 7)"]),
    ("vad", ["--vad-threshold-db", "--vad-hangover-frames", "(default: 6.0)", "(default: 3)"]),
    ("snr", ["--method", "(default: percentile)"]),
    ("features", ["--kind", "--condition", "(default: mfcc_stats)"]),
    ("audit", ["--config", "--grid-c", "(default: 10,10000)", "(default: 17,42,1337)", "(default: 0.1)"]),
])
def test_help_lists_flags_with_defaults(command, expected, capsys):
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args([command, "--help"])
    assert excinfo.value.code == 0
    text = " ".join(capsys.readouterr().out.split())
    for fragment in expected:
        assert fragment in text
