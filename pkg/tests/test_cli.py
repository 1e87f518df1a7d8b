import json
import os

import numpy as np
import pytest

from nvforge import synthetic
from nvforge.cli import main, run
from nvforge.spectra.core import spectrum_to_csv


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_no_args_is_usage_error(capsys):
    code, _, err = _run(capsys)
    assert code == 1 and "usage" in err


def test_bad_flag_is_usage_error(capsys):
    assert _run(capsys, "predict", "--bogus")[0] == 1


def test_main_exits(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_predict_i2_04(capsys):
    code, out, _ = _run(capsys, "predict", "--p1", "2.2", "--energy", "2", "--fluence", "1e17")
    assert code == 0
    assert abs(json.loads(out)["nv_minus_frac_pct"] - 82.4) <= 5.0


def test_predict_from_nc(capsys):
    code, out, _ = _run(capsys, "predict", "--nc", "4000")
    assert code == 0 and json.loads(out)["nc_ratio_ppm"] == 4000


def test_optimize(capsys):
    code, out, _ = _run(capsys, "optimize", "--p1", "2.2", "--energy", "2", "--mode", "charge-stability")
    data = json.loads(out)
    assert code == 0
    assert 0.5e17 <= data["fluence_e_per_cm2"] <= 2e17
    assert "p1_scaling" in data


def test_optimize_uncalibrated_energy(capsys):
    code, _, err = _run(capsys, "optimize", "--p1", "2.2", "--energy", "3")
    assert code == 3 and "UncalibratedEnergy" in err


def test_design_infeasible_then_extended(capsys):
    code, _, err = _run(capsys, "design", "--min-t2-us", "400")
    assert code == 3 and "longest predicted T2" in err
    code, out, _ = _run(capsys, "design", "--min-t2-us", "400", "--nc-min", "20", "--jobs", "2")
    assert code == 0 and json.loads(out)["predicted_t2_us"] >= 400.0


def test_fit_echo_bundled(capsys):
    code, out, _ = _run(capsys, "fit-echo", "--bundled")
    assert code == 0
    assert abs(json.loads(out)["t2_us"] - 100.0) <= 5.0


def test_fit_echo_file_and_plot(tmp_path, capsys):
    t, s = synthetic.echo_trace(50e-6, times=synthetic.echo_times(300e-6, 60))
    data = tmp_path / "echo.csv"
    data.write_text("time_us,signal\n" + "".join(f"{float(a) * 1e6!r},{float(b)!r}\n" for a, b in zip(t, s)))
    code, out, _ = _run(capsys, "fit-echo", "--data", str(data), "--plot", str(tmp_path / "e.svg"))
    assert code == 0 and json.loads(out)["t2_us"] == pytest.approx(50.0, rel=1e-6)
    assert (tmp_path / "e.svg").stat().st_size > 0


def test_missing_file_is_input_error(capsys):
    code, _, err = _run(capsys, "fit-echo", "--data", "/nonexistent/echo.csv")
    assert code == 2


def test_malformed_file_is_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("time_us,signal\n0,1\nx,y\n")
    assert _run(capsys, "fit-echo", "--data", str(bad))[0] == 2


def test_flat_echo_is_model_error(tmp_path, capsys):
    flat = tmp_path / "flat.csv"
    flat.write_text("time_us,signal\n" + "".join(f"{i},1.0\n" for i in range(10)))
    assert _run(capsys, "fit-echo", "--data", str(flat))[0] == 3


def test_fit_pl(tmp_path, capsys):
    paths = {}
    for name, trace in (("s", synthetic.pl_mixture(0.7, 0.3)), ("m", synthetic.nv_minus_reference()),
                       ("z", synthetic.nv_zero_reference())):
        paths[name] = tmp_path / f"{name}.csv"
        paths[name].write_text(spectrum_to_csv(trace))
    code, out, _ = _run(capsys, "fit-pl", "--spectrum", str(paths["s"]), "--ref-minus", str(paths["m"]),
                        "--ref-zero", str(paths["z"]), "--plot", str(tmp_path / "pl.svg"))
    assert code == 0 and json.loads(out)["w_minus"] == pytest.approx(0.7, abs=1e-8)


def test_absorption(tmp_path, capsys):
    after = synthetic.uvvis_spectrum(bands=((741.0, 4.0, 0.2),), base=0.05 + 1.672e-2)
    before = synthetic.uvvis_spectrum()
    (tmp_path / "a.csv").write_text(spectrum_to_csv(after))
    (tmp_path / "b.csv").write_text(spectrum_to_csv(before))
    code, out, _ = _run(capsys, "absorption", "--spectrum", str(tmp_path / "a.csv"),
                        "--before", str(tmp_path / "b.csv"), "--band-report")
    data = json.loads(out)
    assert code == 0
    assert data["nv_ppb"] == pytest.approx(1.0, abs=0.005)
    assert data["over_irradiation_warning"] is True


def test_absorbance_needs_thickness(tmp_path, capsys):
    (tmp_path / "a.csv").write_text(spectrum_to_csv(synthetic.uvvis_spectrum()))
    assert _run(capsys, "absorption", "--spectrum", str(tmp_path / "a.csv"), "--absorbance")[0] == 2


def test_config_flag_and_set_agree(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("coherence.t2_other_us = 500\n")
    base = ["predict", "--p1", "2.2", "--fluence", "1e17"]
    outs = [
        _run(capsys, *base, "--config", str(cfg))[1],
        _run(capsys, *base, "--set", "coherence.t2_other_us=500")[1],
        _run(capsys, *base, "--t2-other-us", "500")[1],
    ]
    assert outs[0] == outs[1] == outs[2]
    assert outs[0] != _run(capsys, *base)[1]


def test_flag_beats_set_beats_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("coherence.t2_other_us = 100\n")
    base = ["predict", "--p1", "2.2", "--config", str(cfg)]
    a = _run(capsys, *base, "--set", "coherence.t2_other_us=300", "--t2-other-us", "500")[1]
    b = _run(capsys, "predict", "--p1", "2.2", "--t2-other-us", "500")[1]
    assert a == b


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("nope = 1\n")
    code, _, err = _run(capsys, "predict", "--p1", "2.2", "--config", str(cfg))
    assert code == 2 and "line 1" in err


def test_repeat_runs_identical(capsys):
    argv = ["design", "--mode", "charge-stability"]
    assert _run(capsys, *argv)[1] == _run(capsys, *argv)[1]


def test_csv_output(capsys):
    code, out, _ = _run(capsys, "predict", "--p1", "2.2", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 2


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = _run(capsys, "predict", "--p1", "2.2", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["as_grown"]


def test_dataset_dump(capsys):
    code, out, _ = _run(capsys, "dataset", "dump", "--table", "table1", "--format", "csv")
    assert code == 0 and "I2-04" in out
    code, out, _ = _run(capsys, "dataset", "dump", "--table", "table2")
    assert code == 0 and any(r["sample_id"] == "NDT-12" for r in json.loads(out))


def test_calibrate_round_trip(tmp_path, capsys):
    cfg = tmp_path / "cal.cfg"
    code, _, _ = _run(capsys, "calibrate", "--table", "table1", "--write", str(cfg))
    assert code == 0
    a = _run(capsys, "predict", "--p1", "2.2", "--fluence", "1e17", "--config", str(cfg))[1]
    b = _run(capsys, "predict", "--p1", "2.2", "--fluence", "1e17")[1]
    assert a == b


def test_calibrate_growth_table2(capsys):
    code, out, _ = _run(capsys, "calibrate", "--table", "table2")
    assert code == 0 and out.count("growth.") == 2


def test_report_writes_files(tmp_path, capsys):
    out_dir = tmp_path / "rep"
    code, out, _ = _run(capsys, "report", "--out", str(out_dir))
    assert code == 0
    files = set(os.listdir(out_dir))
    assert {"table2_comparison.csv", "table2_comparison.json", "conversion_curves.svg",
            "charge_state.svg", "t2_vs_nitrogen.svg", "table2_comparison.svg"} <= files
    first = {f: (out_dir / f).read_bytes() for f in files}
    _run(capsys, "report", "--out", str(out_dir))
    assert first == {f: (out_dir / f).read_bytes() for f in files}
