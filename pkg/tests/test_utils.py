import os

import pandas as pd
import pytest

from src.config import ApplicationConfig
from src.core.exceptions import ConfigError
from src.modules.corpus.models import Group
from src.modules.evaluation import AuditFlags, AuditReport, render_report
from src.modules.segmentation.snr import GroupSnrStats
from src.utils.data_loader import DataLoader
from src.utils.logger import render_context
from src.utils.result_manager import SNR_COLUMNS, ResultManager


@pytest.fixture
def loader():
    return DataLoader()


def write_config(directory, text):
    path = directory / "audit.conf"
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestDataLoader:
    def test_file_values_and_relative_paths(self, loader, tmp_path):
        path = write_config(tmp_path, (
            "# planted-bias run\n"
            "manifest=corpus/manifest.tsv\n"
            "output_dir=reports\n"
            "seeds=1, 2\n"
            "grid_c=10\n"
            "grid_gamma=0.1\n"
            "approaches=svm_mfcc,mlp_mel\n"
            "vad_hangover_frames=0\n"
            "mlp_epochs=5\n"
        ))
        config = loader.load_audit_config(path)
        assert config.manifest == os.path.join(str(tmp_path), "corpus/manifest.tsv")
        assert config.output_dir == os.path.join(str(tmp_path), "reports")
        assert config.seeds == (1, 2)
        assert config.grid.c_values == (10.0,) and config.grid.gamma_values == (0.1,)
        assert config.approaches == ("svm_mfcc", "mlp_mel")
        assert config.vad.hangover_frames == 0 and config.vad.min_speech_ms == 100.0
        assert config.mlp.epochs == 5 and config.mlp.batch_size == 128

    def test_overrides_win_and_none_is_ignored(self, loader, tmp_path):
        path = write_config(tmp_path, "manifest=/data/m.tsv\nseeds=1,2\n")
        config = loader.load_audit_config(path, {"seeds": "5", "approaches": None, "val_fraction": "0.2"})
        assert config.seeds == (5,)
        assert config.val_fraction == 0.2
        assert len(config.approaches) == 4

    def test_defaults_reproduce_the_protocol(self, loader):
        config = loader.load_audit_config(None, {"manifest": "m.tsv"})
        assert config.grid.c_values == (10.0, 1e4) and config.grid.gamma_values == (1e-4, 0.1)
        assert config.seeds == (17, 42, 1337)
        assert config.val_fraction == 0.1

    def test_model_dir_and_iteration_budget(self, loader, tmp_path):
        path = write_config(tmp_path, "manifest=m.tsv\nmodel_dir=models\ngrid_max_passes=50\n")
        config = loader.load_audit_config(path)
        assert config.model_dir == os.path.join(str(tmp_path), "models")
        assert config.grid.max_passes == 50
        assert loader.load_audit_config(None, {"manifest": "m.tsv"}).model_dir == ""

    @pytest.mark.parametrize("text", [
        "manifest=m.tsv\ncolour=blue\n",
        "manifest=m.tsv\nseeds=one\n",
        "manifest=m.tsv\napproaches=svm_unknown\n",
        "manifest=m.tsv\nvad_hangover_frames=-1\n",
        "manifest=m.tsv\ngrid_c=\n",
        "manifest=m.tsv\ngrid_max_passes=0\n",
        "seeds=1\n",
    ])
    def test_invalid_configs(self, loader, tmp_path, text):
        with pytest.raises(ConfigError):
            loader.load_audit_config(write_config(tmp_path, text))

    def test_missing_config_file(self, loader, tmp_path):
        with pytest.raises(ConfigError):
            loader.load_audit_config(str(tmp_path / "absent.conf"))

    def test_json_and_ground_truth(self, loader, tmp_path, small_synth):
        good = tmp_path / "good.json"
        good.write_text('{"a": [1, 2]}', encoding="utf-8")
        assert loader.load_json(str(good)) == {"a": [1, 2]}
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError):
            loader.load_json(str(bad))
        assert len(loader.load_ground_truth(small_synth.sidecar_path)) == 24


@pytest.fixture
def tiny_report():
    stats = {Group.A: GroupSnrStats(Group.A, 30.0, 1.0, 4), Group.B: GroupSnrStats(Group.B, 0.5, 1.5, 4)}
    return AuditReport(corpus_id="tiny", snr_stats={"percentile": stats}, results=[],
                       flags=AuditFlags(environment_bias=False, snr_gap=True))


class TestResultManager:
    def test_report_files(self, tmp_path, tiny_report, capsys):
        manager = ResultManager()
        json_path, text_path = manager.save_audit_report(tiny_report, str(tmp_path / "out"), "tiny")
        assert os.path.basename(json_path) == "tiny.audit.json"
        assert os.path.basename(text_path) == "tiny.audit.txt"
        with open(json_path, encoding="utf-8") as handle:
            assert handle.read() == render_report(tiny_report, "json")
        with open(text_path, encoding="utf-8") as handle:
            assert "snr_gap: yes" in handle.read()

        manager.display_audit_summary(tiny_report)
        assert "CORPUS BIAS AUDIT - tiny" in capsys.readouterr().out

    def test_snr_tables(self, tmp_path, tiny_report):
        manager = ResultManager()
        rows = [
            {"utterance_id": "a/u000", "speaker_id": "a", "group": "A", "snr_db": 29.5,
             "n_noise_frames": 24, "n_active_frames": 61},
        ]
        path = manager.save_snr_table(rows, str(tmp_path / "nested" / "snr.csv"))
        frame = pd.read_csv(path)
        assert list(frame.columns) == SNR_COLUMNS
        assert frame["snr_db"].tolist() == [29.5]

        summary = pd.read_csv(manager.save_group_summary(tiny_report.snr_stats, str(tmp_path / "groups.csv")))
        assert summary[["method", "group"]].values.tolist() == [["percentile", "A"], ["percentile", "B"]]
        assert summary["mean_db"].tolist() == [30.0, 0.5]


def test_log_context_is_sorted_key_value_pairs():
    assert render_context({}) == ""
    assert render_context({"utterance": "spkA00/u001", "fold": 3, "snr_db": 29.51234}) == (
        " | fold=3 snr_db=29.51 utterance=spkA00/u001"
    )


@pytest.mark.parametrize("env, requested, expected", [
    ("4", 2, 2),
    ("2", 8, 2),
    ("3", None, 3),
    ("0", 5, 5),
    ("many", 6, 6),
])
def test_worker_count_takes_the_smaller_cap(monkeypatch, env, requested, expected):
    monkeypatch.setenv("AUDIT_THREADS", env)
    assert ApplicationConfig().worker_count(requested) == expected


def test_worker_count_defaults_to_cpu_count(monkeypatch):
    monkeypatch.setenv("AUDIT_THREADS", "0")
    monkeypatch.setattr(os, "cpu_count", lambda: 7)
    assert ApplicationConfig().worker_count() == 7
