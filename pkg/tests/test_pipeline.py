import json
from pathlib import Path

import numpy as np
import pytest

from prevcast.config import PipelineConfig, load_config
from prevcast.errors import InputError
from prevcast.lexicon import load_lexicon
from prevcast.pipeline import ingest_prevalence, run_pipeline

import datetime as dt


def build_corpus(tmp_path, days=40, per_day=30, seed=7):
    rng = np.random.default_rng(seed)
    lexicon = {
        "fear": ["miedo", "temor"],
        "sadness": ["triste"],
        "joy": ["feliz"],
        "calmness": ["calma"],
    }
    lines = []
    i = 0
    for day in range(days):
        date = dt.date(2020, 3, 1) + dt.timedelta(days=day)
        p_fear = 0.25 + 0.15 * np.sin(2 * np.pi * day / 14)
        for _ in range(per_day):
            words = ["hola", "mundo", "dia"]
            if rng.random() < p_fear:
                words.append("miedo")
            if rng.random() < 0.2:
                words.append("triste")
            if rng.random() < 0.3:
                words.append("feliz")
            if rng.random() < 0.2:
                words.append("calma")
            kind = "retweet" if rng.random() < 0.2 else "original"
            lines.append(json.dumps({
                "id": str(i),
                "timestamp": f"{date.isoformat()}T12:00:00Z",
                "text": " ".join(words),
                "kind": kind,
            }))
            i += 1
    (tmp_path / "docs.ndjson").write_text("\n".join(lines) + "\n")
    (tmp_path / "lexicon.json").write_text(json.dumps(lexicon))
    (tmp_path / "dims.json").write_text(
        json.dumps({"distress": ["fear", "sadness"], "wellbeing": ["joy", "calmness"]})
    )
    return PipelineConfig(
        docs=tmp_path / "docs.ndjson",
        lexicon=tmp_path / "lexicon.json",
        dimensions=tmp_path / "dims.json",
        out_dir=tmp_path / "out",
        date_from=dt.date(2020, 3, 1),
        date_to=dt.date(2020, 3, 1) + dt.timedelta(days=days - 1),
        strategies=("naive", "arima"),
        train_days=(7,),
        horizon=7,
        seed=3,
        jobs=1,
    )


class TestIngest:
    def test_parallel_counts_identical(self, tmp_path):
        config = build_corpus(tmp_path)
        lexicon = load_lexicon(config.lexicon)
        serial, stats1 = ingest_prevalence(
            config.docs, lexicon, (config.date_from, config.date_to), jobs=1
        )
        parallel, stats4 = ingest_prevalence(
            config.docs, lexicon, (config.date_from, config.date_to), jobs=4
        )
        assert stats1 == stats4
        for marker in serial:
            np.testing.assert_array_equal(serial[marker].values, parallel[marker].values)


class TestRunPipeline:
    def test_outputs_and_manifest(self, tmp_path):
        config = build_corpus(tmp_path)
        manifest = run_pipeline(config)
        out = Path(config.out_dir)
        for name in manifest["outputs"]:
            path = out / name
            assert path.exists() and path.stat().st_size > 0
        assert "prevalence.csv" in manifest["outputs"]
        assert "manifest.json" in manifest["outputs"]
        assert any(n.startswith("chart_") for n in manifest["outputs"])
        assert manifest["stats"]["retweets_dropped"] > 0

    def test_rerun_byte_identical(self, tmp_path):
        config = build_corpus(tmp_path)
        run_pipeline(config)
        first = {
            p.name: p.read_bytes() for p in Path(config.out_dir).iterdir()
        }
        run_pipeline(config)
        second = {
            p.name: p.read_bytes() for p in Path(config.out_dir).iterdir()
        }
        assert first == second

    def test_missing_lexicon_cleans_partial_outputs(self, tmp_path):
        config = build_corpus(tmp_path)
        bad = PipelineConfig(
            docs=config.docs,
            lexicon=tmp_path / "missing.json",
            dimensions=config.dimensions,
            out_dir=tmp_path / "out_bad",
            date_from=config.date_from,
            date_to=config.date_to,
            jobs=1,
        )
        with pytest.raises(InputError, match="missing.json"):
            run_pipeline(bad)
        leftovers = list(Path(bad.out_dir).glob("*")) if Path(bad.out_dir).exists() else []
        assert leftovers == []


class TestConfigFile:
    def test_load_round_trip(self, tmp_path):
        build_corpus(tmp_path)
        (tmp_path / "cfg.toml").write_text(
            """
[paths]
docs = "docs.ndjson"
lexicon = "lexicon.json"
dimensions = "dims.json"
out = "out"

[range]
from = "2020-03-01"
to = "2020-04-09"

[analysis]
smoothing_window = 7
percentile = 75.0

[forecast]
strategies = ["naive"]
train_days = [7, 14]
seed = 42

[run]
jobs = 2
"""
        )
        config = load_config(tmp_path / "cfg.toml")
        assert config.docs == tmp_path / "docs.ndjson"
        assert config.percentile == 75.0
        assert config.train_days == (7, 14)
        assert config.seed == 42
        assert config.jobs == 2

    def test_invalid_config(self, tmp_path):
        (tmp_path / "cfg.toml").write_text("[paths]\ndocs = 'x'\n")
        with pytest.raises(InputError, match="missing keys"):
            load_config(tmp_path / "cfg.toml")

    def test_override(self, tmp_path):
        config = build_corpus(tmp_path)
        updated = config.override(seed=99, jobs=None)
        assert updated.seed == 99
        assert updated.jobs == config.jobs
