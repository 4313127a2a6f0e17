import math

import pytest

from uwqkd.channel import LunarPhase, PropagationMode, WaterType
from uwqkd.config import (OPTIMAL_SYSTEM, ORDINARY_SYSTEM, dump_config, from_preset, load_config, load_train,
                          resolve_table)
from uwqkd.errors import ConfigError
from uwqkd.stokes import contrast


def write(tmp_path, text, name="link.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_ordinary_preset_values() -> None:
    system = ORDINARY_SYSTEM
    assert (system.P, system.mu, system.eta, system.eta_opt) == (0.017, 0.1, 0.2, 0.95)
    assert system.f == 40e6 and system.dt == pytest.approx(25e-9)
    assert system.dt_gate == pytest.approx(5e-9)
    assert system.I_dc == 100.0 and system.dlambda == 1.0
    assert system.wavelength == pytest.approx(480e-9)
    assert system.gamma == pytest.approx(10e-3) and system.A == pytest.approx(30e-4)


def test_optimal_preset_inherits_the_rest() -> None:
    system = OPTIMAL_SYSTEM
    assert (system.P, system.dlambda, system.eta, system.I_dc) == (2.3e-4, 0.12, 0.8, 1.0)
    assert system.dt_gate == pytest.approx(200e-12)
    assert (system.mu, system.eta_opt, system.f, system.A) == (ORDINARY_SYSTEM.mu, ORDINARY_SYSTEM.eta_opt,
                                                               ORDINARY_SYSTEM.f, ORDINARY_SYSTEM.A)


def test_preset_only_file(tmp_path) -> None:
    doc = load_config(write(tmp_path, "preset = optimal\n"))
    assert doc.preset == "optimal" and doc.system == OPTIMAL_SYSTEM
    assert doc.scenario.mode is PropagationMode.DOWNWARD
    assert doc.geometry == OPTIMAL_SYSTEM.geometry()


def test_empty_file_uses_the_requested_preset(tmp_path) -> None:
    path = write(tmp_path, "")
    assert load_config(path).system == ORDINARY_SYSTEM
    assert load_config(path, preset="optimal").system == OPTIMAL_SYSTEM


def test_unit_suffixes(tmp_path) -> None:
    doc = load_config(write(tmp_path, """
[system]
f_MHz = 20
dt_gate_ps = 500
lambda_nm = 532

[geometry]
gamma_mrad = 20
A_cm2 = 50
"""))
    assert doc.system.f == pytest.approx(20e6)
    assert doc.system.dt_gate == pytest.approx(500e-12)
    assert doc.system.wavelength == pytest.approx(532e-9)
    assert doc.geometry.gamma == pytest.approx(0.02)
    assert doc.geometry.aperture == pytest.approx(50e-4)


def test_channel_section(tmp_path) -> None:
    doc = load_config(write(tmp_path, """
[channel]
water_type = II
mode = Upward
lunar_phase = quarter
"""))
    assert doc.scenario.water_type is WaterType.JERLOV_II
    assert doc.scenario.chi_c == pytest.approx(0.18)
    assert doc.system.chi_c == pytest.approx(0.18)
    assert doc.scenario.lunar_phase is LunarPhase.QUARTER


def test_protocol_section(tmp_path) -> None:
    doc = load_config(write(tmp_path, "[protocol]\nmu = 0.48\nnu = 0.05\nomega_convention = emission\n"))
    assert (doc.protocol.mu, doc.protocol.nu, doc.protocol.omega_convention) == (0.48, 0.05, "emission")


@pytest.mark.parametrize("text, lineno, message", [
    ("[system]\nP = 0.017\ncolour = blue\n", 3, "unknown key"),
    ("[system]\nf = 40\n", 2, "unit suffix"),
    ("[geometry]\nA_mm2 = 30\n", 2, "unit suffix"),
    ("[optics]\nP = 0.1\n", 1, "unknown section"),
    ("[system]\nP = high\n", 2, "not a number"),
    ("[system]\nP = 0.7\n", 2, "invalid P"),
    ("[system]\nf_Hz = 4e7\nf_MHz = 40\n", 3, "given twice"),
    ("[system]\nP = 0.01\nP = 0.02\n", 3, "duplicate key"),
    ("[channel]\nmode = Sideways\n", 2, "invalid mode"),
    ("preset = extraordinary\n", 1, "unknown preset"),
    ("mu = 0.1\n[system]\n", 1, "only 'preset'"),
])
def test_errors_carry_line_numbers(tmp_path, text, lineno, message) -> None:
    path = write(tmp_path, text)
    with pytest.raises(ConfigError, match=message) as info:
        load_config(path)
    assert info.value.lineno == lineno
    assert info.value.path == path
    assert info.value.exit_code == 2


def test_unparsable_line(tmp_path) -> None:
    with pytest.raises(ConfigError) as info:
        load_config(write(tmp_path, "[system]\nP 0.01\n"))
    assert info.value.lineno == 2


def test_missing_file(tmp_path) -> None:
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "absent.ini"))


def test_radiance_and_kd_ratio_are_exclusive(tmp_path) -> None:
    with pytest.raises(ConfigError, match="either radiance or kd_ratio") as info:
        load_config(write(tmp_path, "[channel]\nradiance = table.csv\nkd_ratio = 0.5\n"))
    assert info.value.lineno == 3


def test_radiance_path_is_relative_to_the_file(tmp_path) -> None:
    doc = load_config(write(tmp_path, "[channel]\nradiance = tables/r.csv\n"))
    assert doc.radiance == str(tmp_path / "tables" / "r.csv")


def test_kd_ratio_selects_a_synthetic_table(tmp_path) -> None:
    doc = load_config(write(tmp_path, "[channel]\nkd_ratio = 0.8\n"))
    table = resolve_table(doc)
    expected = 1e-6 * math.exp(-0.8 * 0.03 * 100.0)
    assert table.lookup(doc.scenario, 100.0).value == pytest.approx(expected, rel=1e-9)


def test_dump_and_load_give_the_same_document(tmp_path) -> None:
    doc = from_preset("optimal", mode="H", water_type="II", chi_c=0.18, lunar_phase="gibbous")
    path = str(tmp_path / "dump.ini")
    text = dump_config(doc, path)
    assert text.startswith("[system]\n")
    loaded = load_config(path)
    assert loaded.system == doc.system
    assert loaded.scenario == doc.scenario
    assert loaded.protocol == doc.protocol
    assert loaded.geometry == doc.geometry


def test_replace_scenario_keeps_attenuation_in_step() -> None:
    doc = from_preset().replace_scenario(water_type=WaterType.JERLOV_II, chi_c=0.18)
    assert doc.system.chi_c == doc.scenario.chi_c == 0.18
    doc.link(resolve_table(doc))


def test_unknown_preset() -> None:
    with pytest.raises(ConfigError):
        from_preset("extraordinary")


def test_load_train(tmp_path) -> None:
    train = load_train(write(tmp_path, """
path_label = DM

[source]
kind = polarizer
epsilon = 0.01
theta_deg = 45

[analyzer]
kind = polarizer
epsilon = 0.01
theta_deg = 45
""", "train.ini"))
    assert train.path_label == "DM"
    assert [element.kind for element in train.elements] == ["polarizer", "polarizer"]
    assert contrast(train, "D") < 1e-3


def test_train_needs_known_kinds(tmp_path) -> None:
    with pytest.raises(ConfigError, match="needs kind") as info:
        load_train(write(tmp_path, "[lens]\nkind = lens\n", "train.ini"))
    assert info.value.lineno == 2
    with pytest.raises(ConfigError, match="no elements"):
        load_train(write(tmp_path, "path_label = HV\n", "empty.ini"))
