import os

import pytest

from uwqkd.cli import build_parser, main
from uwqkd.csvio import KEYRATE_CSV_COLUMNS, QBER_CSV_COLUMNS, read_csv


def run(capsys, *argv):
    status = main(list(argv))
    return status, capsys.readouterr().out


def test_version(capsys) -> None:
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.startswith("uwqkd 0.1.0")


def test_subcommand_is_required(capsys) -> None:
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_qber_at_100_m(capsys) -> None:
    status, out = run(capsys, "qber", "--mode", "U", "--distance", "100")
    assert status == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(QBER_CSV_COLUMNS)
    assert lines[1].startswith("100,")
    assert float(lines[1].split(",")[-1]) == pytest.approx(0.0247, rel=2e-2)


def test_qber_compare(capsys) -> None:
    status, out = run(capsys, "qber", "--mode", "D", "--distance", "35", "--compare")
    assert status == 0
    lines = out.splitlines()
    assert lines[0] == "formula," + ",".join(QBER_CSV_COLUMNS)
    modified, legacy = (float(line.split(",")[-1]) for line in lines[1:])
    assert lines[1].startswith("modified,") and lines[2].startswith("legacy,")
    assert legacy > modified


def test_keyrate(capsys) -> None:
    status, out = run(capsys, "keyrate", "--preset", "optimal", "--mode", "U", "--distance", "100")
    assert status == 0
    header, row = out.splitlines()
    assert header == ",".join(KEYRATE_CSV_COLUMNS)
    values = dict(zip(KEYRATE_CSV_COLUMNS, row.split(",")))
    assert float(values["sifted_bps"]) == pytest.approx(75676, rel=1e-3)
    assert float(values["secure_bps"]) == pytest.approx(68.0e3, rel=2e-2)
    assert values["insecure_flag"] == "0"


def test_keyrate_one_decoy_overrides(capsys) -> None:
    status, out = run(capsys, "keyrate", "--mode", "H", "--distance", "100", "--mu", "0.48", "--nu", "0.05",
                      "--method", "onedecoy")
    assert status == 0
    values = dict(zip(KEYRATE_CSV_COLUMNS, out.splitlines()[1].split(",")))
    assert float(values["secure_bps"]) == pytest.approx(33.9e3, rel=3e-2)


def test_sweep_with_plot_script(capsys, tmp_path) -> None:
    out = tmp_path / "sweep.csv"
    script = tmp_path / "plot_sweep.py"
    status, _ = run(capsys, "sweep", "--mode", "U", "--var", "distance", "--from", "0", "--to", "300",
                    "--steps", "31", "--outputs", "qber_breakdown,sifted", "--out", str(out),
                    "--plot-script", str(script))
    assert status == 0
    data = read_csv(str(out))
    assert len(data["r_m"]) == 31 and data["r_m"][-1] == 300.0
    assert "sifted_bps" in data
    text = script.read_text(encoding="utf-8")
    assert "sweep.csv" in text and "matplotlib" in text


def test_plot_script_needs_a_csv_file(capsys) -> None:
    status, _ = run(capsys, "sweep", "--from", "0", "--to", "10", "--steps", "2", "--plot-script", "p.py")
    assert status == 2


def test_sweep_validation_error(capsys) -> None:
    status, _ = run(capsys, "sweep", "--from", "10", "--to", "0", "--steps", "5")
    assert status == 2


def test_max_distance(capsys) -> None:
    status, out = run(capsys, "max-distance", "--mode", "H")
    assert status == 0
    header, row = out.splitlines()
    assert header == "max_distance_m,monotone,bracket_lo_m,bracket_hi_m"
    distance, monotone, lo, hi = row.split(",")
    assert float(distance) == pytest.approx(200.1, rel=0.2)
    assert monotone == "1"
    assert float(lo) <= float(distance) <= float(hi)


def test_max_distance_exceeding_the_cap(capsys) -> None:
    status, out = run(capsys, "max-distance", "--mode", "U", "--threshold", "0.5")
    assert status == 3
    assert out == ""


def test_water_type_override(capsys) -> None:
    status, out = run(capsys, "max-distance", "--mode", "U", "--water-type", "II")
    assert status == 0
    assert float(out.splitlines()[1].split(",")[0]) < 100.0


def test_table_gap(capsys, tmp_path) -> None:
    table = tmp_path / "radiance.csv"
    table.write_text("depth_m,mode,lunar_phase,water_type,radiance_w_m2_sr_nm\n0,D,full,I,1e-6\n10,D,full,I,1e-7\n",
                     encoding="utf-8")
    status, _ = run(capsys, "qber", "--mode", "H", "--distance", "50", "--radiance", str(table))
    assert status == 4


def test_bad_configuration(capsys, tmp_path) -> None:
    config = tmp_path / "bad.ini"
    config.write_text("[system]\nP = 0.9\n", encoding="utf-8")
    status, out = run(capsys, "qber", "--config", str(config), "--distance", "10")
    assert status == 2
    assert out == ""


def test_show_config_round_trip(capsys, tmp_path) -> None:
    path = tmp_path / "resolved.ini"
    status, _ = run(capsys, "show-config", "--preset", "optimal", "--mode", "H", "--out", str(path))
    assert status == 0
    status, shown = run(capsys, "show-config", "--config", str(path))
    assert status == 0
    assert "mode = H" in shown
    assert "P = 0.00023" in shown


def test_contrast_worst_case(capsys) -> None:
    status, out = run(capsys, "contrast", "--worst-case", "ordinary")
    assert status == 0
    rows = dict(line.split(",") for line in out.splitlines()[1:])
    assert float(rows["P"]) == pytest.approx(0.017217, rel=2e-3)
    assert float(rows["P_DM"]) > float(rows["P_HV"])


def test_contrast_of_a_train_file(capsys, tmp_path) -> None:
    train = tmp_path / "train.ini"
    train.write_text("[source]\nkind = polarizer\nepsilon = 0.01\n\n[analyzer]\nkind = polarizer\n"
                     "epsilon = 0.01\n", encoding="utf-8")
    status, out = run(capsys, "contrast", "--train", str(train), "--state", "H")
    assert status == 0
    assert float(out.splitlines()[1].split(",")[1]) < 1e-3


def test_contrast_does_not_take_link_options() -> None:
    with pytest.raises(SystemExit):
        build_parser().parse_args(["contrast", "--worst-case", "ordinary", "--preset", "optimal"])


def test_reproduce_by_figure_number(capsys, tmp_path) -> None:
    status, out = run(capsys, "reproduce", "fig5", "--outdir", str(tmp_path))
    assert status == 0
    names = sorted(os.path.basename(line) for line in out.splitlines())
    assert "plot_qber_ordinary.py" in names
    assert len([name for name in names if name.endswith(".csv")]) == 12
    data = read_csv(str(tmp_path / "qber_ordinary_a_D.csv"))
    assert len(data["r_m"]) == 101 and data["r_m"][-1] == 300.0


def test_synthesized_background_decay(capsys) -> None:
    status, out = run(capsys, "max-distance", "--mode", "D", "--kd-ratio", "0.8")
    assert status == 0
    assert float(out.splitlines()[1].split(",")[0]) == pytest.approx(188.9, rel=1e-2)
    status, _ = run(capsys, "max-distance", "--mode", "D", "--kd-ratio", "0")
    assert status == 2


def test_kd_ratio_and_radiance_are_exclusive() -> None:
    with pytest.raises(SystemExit):
        build_parser().parse_args(["qber", "--kd-ratio", "0.8", "--radiance", "table.csv"])
