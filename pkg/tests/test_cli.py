import json

import numpy as np
import pytest

from prevcast.cli import main
from prevcast.fileio import read_prevalence_csv, write_prevalence_csv
from prevcast.synth import seasonal


@pytest.fixture
def corpus(tmp_path):
    """Tiny NDJSON corpus spanning 3 days with known counts."""
    lexicon = {"fear": ["miedo"], "sadness": ["triste"]}
    docs = []
    i = 0
    for day, (n_total, n_fear, n_sad) in enumerate([(4, 1, 2), (5, 3, 0), (4, 2, 2)]):
        for j in range(n_total):
            words = ["hola", "mundo"]
            if j < n_fear:
                words.append("miedo")
            if j < n_sad:
                words.append("triste")
            docs.append(json.dumps({
                "id": str(i),
                "timestamp": f"2020-03-0{day + 1}T12:00:00Z",
                "text": " ".join(words),
            }))
            i += 1
    docs.append('{"id":"rt","timestamp":"2020-03-01T00:00:00Z","text":"miedo","kind":"retweet"}')
    docs.append("this is not json")
    (tmp_path / "docs.ndjson").write_text("\n".join(docs) + "\n")
    (tmp_path / "lexicon.json").write_text(json.dumps(lexicon))
    (tmp_path / "dims.json").write_text(json.dumps({"distress": ["fear", "sadness"]}))
    return tmp_path


class TestPrevalenceCommand:
    def test_hand_counts(self, corpus, capsys):
        rc = main([
            "prevalence", "--docs", str(corpus / "docs.ndjson"),
            "--lexicon", str(corpus / "lexicon.json"),
            "--from", "2020-03-01", "--to", "2020-03-03",
            "--jobs", "1", "--out", str(corpus / "out"),
        ])
        assert rc == 0
        series = read_prevalence_csv(corpus / "out" / "prevalence.csv")
        np.testing.assert_allclose(series["fear"].values, [25.0, 60.0, 50.0])
        np.testing.assert_allclose(series["sadness"].values, [50.0, 0.0, 50.0])

    def test_missing_lexicon_exit_code_and_message(self, corpus, capsys):
        rc = main([
            "prevalence", "--docs", str(corpus / "docs.ndjson"),
            "--lexicon", str(corpus / "nope.json"),
            "--from", "2020-03-01", "--to", "2020-03-03",
            "--out", str(corpus / "out"),
        ])
        assert rc == 1
        assert "nope.json" in capsys.readouterr().err


class TestSynthCommand:
    def test_generates_csv(self, tmp_path, capsys):
        out = tmp_path / "series.csv"
        rc = main([
            "synth", "--generator", "ar1", "--length", "50", "--seed", "3",
            "--params", '{"phi": 0.8, "sigma": 1.0}', "--out", str(out),
        ])
        assert rc == 0
        series = read_prevalence_csv(out)
        assert len(series["value"]) == 50

    def test_bad_params_json(self, tmp_path, capsys):
        rc = main([
            "synth", "--generator", "ar1", "--length", "50",
            "--params", "{oops", "--out", str(tmp_path / "x.csv"),
        ])
        assert rc == 1


class TestStageChaining(object):
    def test_forecast_evaluate_compare_plot(self, tmp_path):
        # Synthetic prevalence with enough structure to forecast.
        ms = {
            "fear": seasonal(period=14, amplitude=5, trend=0.1, length=42, seed=1, level=30),
            "sadness": seasonal(period=14, amplitude=4, trend=0.05, length=42, seed=2, level=25),
        }
        write_prevalence_csv(tmp_path / "prevalence.csv", ms)
        (tmp_path / "dims.json").write_text(json.dumps({"distress": ["fear", "sadness"]}))

        rc = main([
            "peaks", "--prevalence", str(tmp_path / "prevalence.csv"),
            "--dimensions", str(tmp_path / "dims.json"),
            "--out", str(tmp_path / "out"),
        ])
        assert rc == 0
        assert (tmp_path / "out" / "peaks_distress.csv").exists()

        rc = main([
            "forecast", "--prevalence", str(tmp_path / "prevalence.csv"),
            "--dimensions", str(tmp_path / "dims.json"),
            "--strategy", "naive,additive", "--train-days", "14",
            "--seed", "5", "--out", str(tmp_path / "out"),
        ])
        assert rc == 0
        fc = tmp_path / "out" / "forecasts_distress_naive_t14.csv"
        assert fc.exists()

        rc = main([
            "evaluate", "--prevalence", str(tmp_path / "prevalence.csv"),
            "--dimensions", str(tmp_path / "dims.json"),
            "--forecasts", str(tmp_path / "out"),
            "--out", str(tmp_path / "eval"),
        ])
        assert rc == 0
        report = (tmp_path / "eval" / "mape_report.csv").read_text().splitlines()
        assert report[0] == "dimension,marker,strategy,train_days,mape_mean,mape_std"
        assert len(report) > 1
        assert (tmp_path / "eval" / "hit_report.csv").read_text().splitlines()[0] == (
            "dimension,strategy,n,hit_rate"
        )

        rc = main([
            "compare", "--windows", str(tmp_path / "eval" / "mape_windows.csv"),
            "--out", str(tmp_path / "cmp"),
        ])
        assert rc == 0
        comparisons = json.loads((tmp_path / "cmp" / "compare_report.json").read_text())
        assert comparisons, "expected at least one strategy pair"
        assert {c["strategy_a"] for c in comparisons} | {c["strategy_b"] for c in comparisons} == {
            "naive", "additive",
        }

        rc = main([
            "plot", "--prevalence", str(tmp_path / "prevalence.csv"),
            "--dimensions", str(tmp_path / "dims.json"),
            "--forecasts", str(tmp_path / "out"),
            "--out", str(tmp_path / "charts"),
        ])
        assert rc == 0
        svg = (tmp_path / "charts" / "chart_distress.svg").read_text()
        assert "<svg" in svg


class TestPipelineCommand:
    def test_requires_config_or_flags(self, capsys):
        rc = main(["pipeline"])
        assert rc == 1
        assert "--docs" in capsys.readouterr().err

    def test_numerical_exit_code_mapping(self):
        # NumericalError -> 2 is covered via the error hierarchy mapping.
        from prevcast.errors import NumericalError
        import prevcast.cli as cli

        def boom(args):
            raise NumericalError("synthetic failure")

        original = cli._COMMANDS["synth"]
        cli._COMMANDS["synth"] = boom
        try:
            rc = main(["synth", "--generator", "ar1", "--length", "50", "--out", "x.csv"])
        finally:
            cli._COMMANDS["synth"] = original
        assert rc == 2
