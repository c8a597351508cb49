import csv
import json

import pytest

from hopcap import report
from hopcap.cli import build_parser, main, suite_configs
from hopcap.harness import SuiteSummary, TrialConfig, run_suite


@pytest.fixture(scope="module")
def summaries():
    return [run_suite(TrialConfig(N=200, trials=3, seed=5)),
            run_suite(TrialConfig(N=150, b_mean=0.55, b_std=0.03, trials=2, seed=5))]


def test_csv_schema_and_ordering(summaries, tmp_path):
    path = report.write_csv(summaries, tmp_path / "s.csv")
    with path.open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == report.CSV_COLUMNS
    # sorted by config key: N=150 rows first
    assert rows[1][0] == "150"
    models = [r[5] for r in rows[1:] if r[0] == "150"]
    assert models[0] == "true" and models[1] == "dynamic"
    assert {"mceliece", "lowe-bias", "lowe-corr", "dynamic-raw", "dynamic-exact"} <= set(models)
    parsed = report.read_csv(path)
    assert parsed[0]["model"] == "true" and isinstance(parsed[0]["N"], int)


def test_json_round_trip(summaries, tmp_path):
    path = report.write_json(summaries, tmp_path / "s.json")
    back = report.read_json(path)
    assert back == sorted(summaries, key=lambda s: s.config.key)
    json.loads(path.read_text())


def test_empty_suite_is_an_error(tmp_path):
    with pytest.raises(ValueError):
        report.emit_results([], tmp_path / "out", ["csv"])
    assert not (tmp_path / "out" / "suite.csv").exists()
    with pytest.raises(ValueError):
        SuiteSummary(TrialConfig(), [])


def test_emit_all_formats_deterministic(summaries, tmp_path):
    a = report.emit_results(summaries, tmp_path / "a", ["csv", "json", "svg"])
    b = report.emit_results(summaries, tmp_path / "b", ["csv", "json", "svg"])
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    svg = (tmp_path / "a" / "suite.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg
    assert "xlink:href=\"http" not in svg
    with pytest.raises(ValueError):
        report.emit_results(summaries, tmp_path / "c", ["xlsx"])


def test_io_error_names_path(summaries, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        report.write_csv(summaries, blocker / "nested.csv")


def test_cli_run_and_replot(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--n", "150", "--trials", "2", "--seed", "3", "--out", str(out),
                 "--format", "csv,json", "--format", "svg"]) == 0
    assert {p.name for p in out.iterdir()} == {"suite.csv", "suite.json", "suite.svg"}
    assert "dynamic" in capsys.readouterr().out
    assert main(["plot", str(out / "suite.csv"), "--out", str(tmp_path / "re")]) == 0
    assert (tmp_path / "re" / "suite.svg").exists()


def test_cli_verify_gen(tmp_path):
    out = tmp_path / "gen"
    assert main(["verify-gen", "--bias", "0.5", "0.7", "--corr", "0", "0.6", "--patterns", "50",
                 "--out", str(out), "--format", "csv,svg"]) == 0
    rows = report.read_generator_csv(out / "generator.csv")
    assert len(rows) == 4 and rows[-1]["deviation_regime"] is True
    assert main(["plot", str(out / "generator.csv"), "--out", str(out)]) == 0


def test_cli_single_trace(tmp_path, capsys):
    out = tmp_path / "single"
    assert main(["single", "--n", "120", "--seed", "2", "--out", str(out), "--format", "csv,svg",
                 "--save-weights", str(tmp_path / "w.bin")]) == 0
    text = capsys.readouterr().out
    assert "true capacity C0=" in text
    names = {p.name for p in out.iterdir()}
    assert {"trace.csv", "trace.svg", "chi_expectation.csv", "chi_raw.csv", "chi_exact.csv"} <= names
    assert report.detect_kind(out / "trace.csv") == "trace"
    assert main(["plot", str(out / "trace.csv"), "--out", str(tmp_path / "re")]) == 0
    assert (tmp_path / "w.bin").read_bytes()[:4] == b"HOPW"


def test_cli_presets():
    p = build_parser()
    iid = suite_configs(p.parse_args(["run", "--preset", "iid"]))
    assert [c.N for c in iid] == [500, 1000]
    iidx = suite_configs(p.parse_args(["run", "--preset", "iid", "--extended"]))
    assert [c.N for c in iidx] == [500, 1000, 3000]
    disp = suite_configs(p.parse_args(["run", "--preset", "dispersion", "--trials", "10"]))
    assert len(disp) == 6 and all(c.N == 1000 and c.trials == 10 for c in disp)
    assert (disp[0].b_mean, disp[0].b_std) == (0.5, 0.03)
    grid = suite_configs(p.parse_args(["run", "--n", "500", "1000", "--bias-mean", "0.5", "0.6",
                                       "--weighting", "exact", "--recall", "relax"]))
    assert len(grid) == 4 and grid[0].weighting == "exact" and grid[0].recall == "relax"


def test_cli_bad_format_reports_error(tmp_path, capsys):
    assert main(["run", "--n", "60", "--trials", "1", "--out", str(tmp_path), "--format", "xml"]) == 1
    assert "unknown format" in capsys.readouterr().err
