"""Command-line front end tests, run in process through cli.main."""
import re

import pytest

import sfgcavity as sc
from sfgcavity.cli import main

# mirrors the reference device but with the coarse fast solver; the reader
# defaults supply everything not listed here
FAST_SECTIONS = {
    "solver": {"max_roundtrips": "20000", "rel_tolerance": "1e-8", "steps_per_pass": "50"},
}


def render_config(sections):
    lines = []
    for section, values in sections.items():
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {value}" for key, value in values.items())
        lines.append("")
    return "\n".join(lines)


def write_config(tmp_path, extra=None, raw_suffix=""):
    sections = {name: dict(values) for name, values in FAST_SECTIONS.items()}
    for name, values in (extra or {}).items():
        sections.setdefault(name, {}).update(values)
    path = tmp_path / "run.ini"
    path.write_text(render_config(sections) + raw_suffix)
    return str(path)


def parse_report(text):
    """key = value lines back into a dict of strings."""
    values = {}
    for line in text.strip().splitlines():
        key, sep, value = line.partition(" = ")
        assert sep, f"not a report line: {line!r}"
        values[key] = value
    return values


# ---------------------------------------------------------------------------
# simulate


def test_simulate_reports_steady_state(tmp_path, capsys):
    assert main(["simulate", "--config", write_config(tmp_path)]) == 0
    report = parse_report(capsys.readouterr().out)
    assert report["converged"] == "true"
    assert 0.84 < float(report["eta"]) < 0.86
    assert 0.92 < float(report["delta"]) < 0.94
    assert float(report["out_532_mW"]) > 0.0
    assert abs(float(report["budget_residual_1550"])) < 1e-5
    assert abs(float(report["budget_residual_810"])) < 1e-5
    assert int(report["roundtrips"]) > 100


def test_simulate_pump_off(tmp_path, capsys):
    config = write_config(tmp_path, {"drive": {"pump_mW": "0.0"}})
    assert main(["simulate", "--config", config]) == 0
    report = parse_report(capsys.readouterr().out)
    assert float(report["eta"]) == 0.0
    # linear absorption still depletes the resonant signal
    assert 0.25 < float(report["delta"]) < 0.40
    assert float(report["out_532_mW"]) == 0.0


def test_simulate_writes_out_file(tmp_path, capsys):
    out = tmp_path / "report.txt"
    config = write_config(tmp_path)
    assert main(["simulate", "--config", config, "--out", str(out)]) == 0
    assert out.read_text() == capsys.readouterr().out


def test_simulate_nonconvergence_exit_2(tmp_path, capsys):
    config = write_config(tmp_path, {"solver": {"max_roundtrips": "3"}})
    assert main(["simulate", "--config", config]) == 2
    report = parse_report(capsys.readouterr().out)
    assert report["converged"] == "false"
    assert report["roundtrips"] == "3"


def test_defaults_need_no_config(tmp_path, capsys):
    # no --config runs the bundled reference values (full-fidelity solver)
    assert main(["linewidth"]) == 0
    report = parse_report(capsys.readouterr().out)
    assert report["channel"] == "signal"


# ---------------------------------------------------------------------------
# config validation


def test_unknown_key_exits_1(tmp_path, capsys):
    config = write_config(tmp_path, {"crystal": {"fnord": "1.0"}})
    assert main(["simulate", "--config", config]) == 1
    err = capsys.readouterr().err
    assert re.search(r"run\.ini:\d+: unknown key 'fnord' in \[crystal\]", err)


def test_unknown_section_exits_1(tmp_path, capsys):
    config = write_config(tmp_path, raw_suffix="[alignment]\nangle = 3\n")
    assert main(["simulate", "--config", config]) == 1
    err = capsys.readouterr().err
    assert re.search(r"run\.ini:\d+: unknown section \[alignment\]", err)


def test_unparseable_value_exits_1(tmp_path, capsys):
    config = write_config(tmp_path, {"crystal": {"coupling": "banana"}})
    assert main(["simulate", "--config", config]) == 1
    err = capsys.readouterr().err
    assert re.search(r"run\.ini:\d+: cannot parse coupling value 'banana'", err)


def test_invalid_reflectivity_exits_1(tmp_path, capsys):
    config = write_config(tmp_path, {"mirrors": {"left_1550": "1.2"}})
    assert main(["simulate", "--config", config]) == 1
    err = capsys.readouterr().err
    assert "error:" in err and "left_signal" in err


def test_missing_config_file_exits_1(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "absent.ini")]) == 1
    assert "config file not found" in capsys.readouterr().err


def test_missing_subcommand_exits_1(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1


def test_fit_requires_measurements_flag(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["fit", "--config", write_config(tmp_path)])
    assert info.value.code == 1
    assert "--measurements" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# sweep


def test_sweep_csv_deterministic(tmp_path, capsys):
    config = write_config(
        tmp_path, {"sweep": {"pump_min_mW": "0.0", "pump_max_mW": "100.0", "points": "3"}}
    )
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", config, "--out", str(out)]) == 0
    first = capsys.readouterr().out
    lines = first.strip().splitlines()
    assert lines[0] == "pump_mW,eta,delta,converged,roundtrips"
    assert len(lines) == 4
    assert out.read_text() == first
    # identical inputs give byte-identical output
    assert main(["sweep", "--config", config]) == 0
    assert capsys.readouterr().out == first


def test_sweep_csv_feeds_peak_finder(tmp_path, capsys):
    config = write_config(
        tmp_path, {"sweep": {"pump_min_mW": "0.0", "pump_max_mW": "190.0", "points": "5"}}
    )
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", config, "--out", str(out)]) == 0
    capsys.readouterr()
    sweep = sc.read_sweep_csv(out)
    assert len(sweep.rows) == 5
    peak = sc.find_peak(sweep)
    # the interior vertex lands between the neighbors of the grid maximum
    assert 47.5e-3 < peak.pump_power < 142.5e-3
    assert 0.8 < peak.eta < 0.9


def test_sweep_rejects_bad_grid(tmp_path, capsys):
    config = write_config(tmp_path, {"sweep": {"pump_min_mW": "100.0", "pump_max_mW": "50.0"}})
    assert main(["sweep", "--config", config]) == 1
    assert "pump_max_mW" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# optimize


def test_optimize_degenerate_range(tmp_path, capsys):
    config = write_config(
        tmp_path,
        {"optimize": {"r_min": "0.90", "r_max": "0.90", "pump_budget_mW": "200.0"}},
    )
    out = tmp_path / "design.csv"
    assert main(["optimize", "--config", config, "--out", str(out)]) == 0
    report = parse_report(capsys.readouterr().out)
    assert float(report["best_reflectivity"]) == 0.90
    assert 0.90 < float(report["best_eta"]) < 0.93
    assert 0.0 < float(report["best_pump_mW"]) <= 200.0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "reflectivity,pump_mW,eta"
    assert len(lines) == 2  # single grid point


# ---------------------------------------------------------------------------
# fit


@pytest.fixture(scope="module")
def measurements_csv(tmp_path_factory, fit_series):
    path = tmp_path_factory.mktemp("fit") / "measurements.csv"
    sc.write_measurements_csv(fit_series, path)
    return str(path)


def test_fit_recovers_gamma(tmp_path, capsys, measurements_csv):
    config = write_config(tmp_path, {"fit": {"free": "gamma"}})
    out = tmp_path / "comparison.csv"
    code = main(["fit", "--config", config, "--measurements", measurements_csv, "--out", str(out)])
    assert code == 0
    report = parse_report(capsys.readouterr().out)
    assert abs(float(report["gamma"]) - sc.REFERENCE_GAMMA) < 1e-6
    assert report["iterations"] == "0"  # gamma alone is profiled in closed form
    assert report["converged"] == "true"
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "pump_mW,eta_meas,eta_fit,delta_meas,delta_fit"
    assert len(lines) == 1 + len(sc.read_measurements_csv(measurements_csv))
    # noiseless series from the same model: measured and fitted curves agree
    # up to the 9-significant-digit CSV formatting
    for line in lines[1:]:
        _, eta_meas, eta_fit, delta_meas, delta_fit = map(float, line.split(","))
        assert abs(eta_meas - eta_fit) < 2e-9
        assert abs(delta_meas - delta_fit) < 2e-9


def test_fit_baseline_normalization(tmp_path, capsys, measurements_csv):
    config = write_config(tmp_path, {"fit": {"free": "gamma", "normalization": "baseline"}})
    out = tmp_path / "comparison.csv"
    code = main(["fit", "--config", config, "--measurements", measurements_csv, "--out", str(out)])
    assert code == 0
    report = parse_report(capsys.readouterr().out)
    assert abs(float(report["gamma"]) - sc.REFERENCE_GAMMA) < 1e-6
    for line in out.read_text().strip().splitlines()[1:]:
        _, _, _, delta_meas, delta_fit = map(float, line.split(","))
        assert abs(delta_meas - delta_fit) < 2e-9


def test_fit_rejects_empty_free(tmp_path, capsys, measurements_csv):
    config = write_config(tmp_path, {"fit": {"free": ""}})
    assert main(["fit", "--config", config, "--measurements", measurements_csv]) == 1
    assert "at least one free parameter" in capsys.readouterr().err


def test_fit_rejects_empty_csv(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    config = write_config(tmp_path)
    assert main(["fit", "--config", config, "--measurements", str(empty)]) == 1
    assert "measurement CSV is empty" in capsys.readouterr().err


def test_fit_rejects_missing_column(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("pump_mW,pd1550_in,pd1550_refl,pd1550_trans,pd810_trans\n0,1,1,1,1\n")
    config = write_config(tmp_path)
    assert main(["fit", "--config", config, "--measurements", str(bad)]) == 1
    assert "missing column(s) pd532_trans" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# linewidth


def test_linewidth_from_cavity(tmp_path, capsys):
    assert main(["linewidth", "--config", write_config(tmp_path)]) == 0
    report = parse_report(capsys.readouterr().out)
    assert report["channel"] == "signal"
    # monolithic roundtrip: twice the crystal length times the signal index
    assert float(report["roundtrip_length_m"]) == pytest.approx(2 * 9.3e-3 * 1.8157)
    assert float(report["finesse"]) == pytest.approx(156.4447, rel=1e-4)
    fsr_hz = float(report["fsr_GHz"]) * 1e9
    lw_hz = float(report["linewidth_MHz"]) * 1e6
    assert lw_hz == pytest.approx(fsr_hz / float(report["finesse"]), rel=1e-9)


def test_linewidth_with_overrides(tmp_path, capsys):
    config = write_config(
        tmp_path, {"resonator": {"roundtrip_length_m": "0.412", "finesse": "560.0"}}
    )
    assert main(["linewidth", "--config", config]) == 0
    report = parse_report(capsys.readouterr().out)
    assert float(report["roundtrip_length_m"]) == 0.412
    assert float(report["finesse"]) == 560.0
    assert float(report["linewidth_MHz"]) == pytest.approx(1.3, rel=0.01)


def test_linewidth_rejects_bad_channel(tmp_path, capsys):
    config = write_config(tmp_path, {"resonator": {"channel": "green"}})
    assert main(["linewidth", "--config", config]) == 1
    assert "channel must be signal, pump, or sum" in capsys.readouterr().err
