import json
from pathlib import Path

from intersection_analyzer.cli import main

from conftest import STUDY_APPROACHES, STUDY_CYCLES, WEEK_APPROACHES, WEEK_CYCLES

STUDY = ["--cycles", str(STUDY_CYCLES), "--approaches", str(STUDY_APPROACHES)]
WEEK = ["--cycles", str(WEEK_CYCLES), "--approaches", str(WEEK_APPROACHES)]

REPORT_FILES = {
    "flow.csv", "saturation.csv", "composition.csv", "green.csv",
    "green_series.csv", "delay_los.csv", "intersections.csv",
    "emissions.csv", "emissions_summary.csv", "summary.txt",
}


def read(path: Path) -> str:
    return path.read_text()


def test_validate_ok(capsys):
    assert main(["validate", "--cycles", str(STUDY_CYCLES),
                 "--approaches", str(STUDY_APPROACHES)]) == 0
    assert "OK: 9 record(s)" in capsys.readouterr().out


def test_validate_reports_every_bad_row(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text(
        "approach_id,cycle_length_s,red_s,green_s,car\n"
        "SR1,152,120,32,3\n"
        "SR1,152,140,30,3\n"
        "SR1,152,120,32,-1\n")
    code = main(["validate", "--cycles", str(bad),
                 "--approaches", str(STUDY_APPROACHES)])
    captured = capsys.readouterr()
    assert code == 2
    assert "row 3" in captured.out
    assert "row 4" in captured.out
    assert "1 valid record(s), 2 problem(s)" in captured.out
    record = json.loads(captured.err)
    assert record["exit_code"] == 2
    assert record["subcommand"] == "validate"


def test_peak_hours_finds_midday_window(capsys):
    assert main(["peak-hours", "--cycles", str(WEEK_CYCLES),
                 "--window", "1800", "--span", "4", "--day", "weekday"]) == 0
    assert "peak window: 11:00-13:00" in capsys.readouterr().out


def test_peak_hours_writes_windowed_csv(tmp_path, capsys):
    assert main(["peak-hours", "--cycles", str(WEEK_CYCLES), "--day", "weekday",
                 "--out", str(tmp_path)]) == 0
    windowed = read(tmp_path / "windowed.csv")
    assert windowed.startswith("# schema: intersection-analyzer/windowed-cycle-lengths v1\n")
    assert "11:00" in windowed


def test_variability_outputs(tmp_path, capsys):
    assert main(["variability", *WEEK, "--out", str(tmp_path)]) == 0
    pvalues = read(tmp_path / "pvalues.csv")
    assert "NX,N2,N1" in pvalues
    boxplot = read(tmp_path / "boxplot.csv")
    # schema line + header + two approaches + one pooled intersection group
    assert boxplot.count("\n") == 5
    assert "NX," in boxplot


def test_variability_needs_repeated_cycles(tmp_path, capsys):
    code = main(["variability", *STUDY, "--out", str(tmp_path)])
    assert code == 2
    record = json.loads(capsys.readouterr().err)
    assert record["error"] == "TooFewSamples"


def test_flow_artifacts(tmp_path, capsys):
    assert main(["flow", *STUDY, "--out", str(tmp_path)]) == 0
    flow = read(tmp_path / "flow.csv")
    assert "SR2,SSC,2,oneway,2400,1918,0.80" in flow
    saturation = read(tmp_path / "saturation.csv")
    assert "SR1,SSC,10.5,24,48,7200,5513,1688" in saturation


def test_green_artifacts(tmp_path, capsys):
    assert main(["green", *STUDY, "--out", str(tmp_path)]) == 0
    green = read(tmp_path / "green.csv")
    assert "TR2,THC,40,0.3361,67,0.60,0.125" in green
    series = read(tmp_path / "green_series.csv")
    assert "SR4,45,89" in series


def test_delay_artifacts(tmp_path, capsys):
    assert main(["delay", *STUDY, "--out", str(tmp_path)]) == 0
    delay = read(tmp_path / "delay_los.csv")
    assert "SR1,SSC,152,32,0.34,0.4533,50.24,0,D,C,A" in delay
    intersections = read(tmp_path / "intersections.csv")
    assert "SSC,all,5,56.08,E,C" in intersections
    assert "THC,major,2,35.77,D,B" in intersections


def test_emissions_artifacts(tmp_path, capsys):
    assert main(["emissions", *STUDY, "--out", str(tmp_path)]) == 0
    emissions = read(tmp_path / "emissions.csv")
    assert "SSC,56.08,9.42,6.56,24.63,21.21,17.32,58.91,97.45" in emissions
    summary = read(tmp_path / "emissions_summary.csv")
    assert "study_intersections,161.66" in summary
    assert "city,370.00,4.81,13,configured_rate" in summary


def test_los_subcommand(capsys):
    assert main(["los", "--delay", "56", "--delay", "36",
                 "--vc", "0.73", "--vc", "0.84"]) == 0
    out = capsys.readouterr().out
    assert "delay 56 s: delay_hcm=E delay_heterogeneous=C" in out
    assert "delay 36 s: delay_hcm=D delay_heterogeneous=B" in out
    assert "vc 0.73: vc_ratio=C" in out
    assert "vc 0.84: vc_ratio=D" in out


def test_los_without_values_errors(capsys):
    assert main(["los"]) == 2


def test_report_writes_all_families(tmp_path, capsys):
    assert main(["report", *STUDY, "--out", str(tmp_path)]) == 0
    assert {p.name for p in tmp_path.iterdir()} == REPORT_FILES
    summary = read(tmp_path / "summary.txt")
    assert "Citywide (configured rate): 370.00 kg CO2/h, 4.81 t/day" in summary


def test_report_includes_windowed_when_timestamps_present(tmp_path, capsys):
    assert main(["report", *WEEK, "--out", str(tmp_path), "--day", "weekday"]) == 0
    assert (tmp_path / "windowed.csv").exists()


def test_report_reruns_are_byte_identical(tmp_path, capsys):
    first = tmp_path / "first"
    second = tmp_path / "second"
    assert main(["report", *STUDY, "--out", str(first)]) == 0
    assert main(["report", *STUDY, "--out", str(second)]) == 0
    for name in REPORT_FILES:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_missing_input_exits_2(tmp_path, capsys):
    code = main(["flow", "--cycles", str(tmp_path / "nope.csv"),
                 "--approaches", str(STUDY_APPROACHES), "--out", str(tmp_path)])
    assert code == 2
    record = json.loads(capsys.readouterr().err)
    assert record["error"] == "InputError"


def test_empty_cycles_is_no_data(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("approach_id,cycle_length_s,red_s,green_s,car\n")
    code = main(["report", "--cycles", str(empty),
                 "--approaches", str(STUDY_APPROACHES), "--out", str(tmp_path)])
    assert code == 2
    assert json.loads(capsys.readouterr().err)["error"] == "NoData"


def test_saturated_regime_exits_3(tmp_path, capsys):
    cycles = tmp_path / "saturated.csv"
    cycles.write_text(
        "approach_id,cycle_length_s,red_s,green_s,car\n"
        "SR1,100,0,100,4000\n")
    code = main(["delay", "--cycles", str(cycles),
                 "--approaches", str(STUDY_APPROACHES), "--out", str(tmp_path)])
    assert code == 3
    record = json.loads(capsys.readouterr().err)
    assert record["error"] == "SaturatedRegime"
    assert record["exit_code"] == 3


def test_write_failure_exits_4(tmp_path, capsys):
    blocker = tmp_path / "blocked"
    blocker.write_text("a file, not a directory")
    code = main(["flow", *STUDY, "--out", str(blocker)])
    assert code == 4
    assert json.loads(capsys.readouterr().err)["error"] == "IoFailure"


def test_failed_run_leaves_existing_outputs_untouched(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["flow", *STUDY, "--out", str(out)]) == 0
    before = read(out / "flow.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("approach_id,cycle_length_s,red_s,green_s,car\nZZ9,100,50,40,1\n")
    code = main(["flow", "--cycles", str(bad),
                 "--approaches", str(STUDY_APPROACHES), "--out", str(out)])
    assert code == 2
    assert read(out / "flow.csv") == before
    assert not list(out.glob("*.tmp"))
