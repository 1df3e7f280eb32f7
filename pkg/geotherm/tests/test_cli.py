import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

import geotherm
import geotherm.app.main as cli
from geotherm.app.config import PRESET_ALIASES, PRESET_DIR, list_presets, load_spec, parse_config, preset_alias
from geotherm.app.errors import ConfigError
from geotherm.app.main import main
from geotherm.app.runner import CSV_COLUMNS, EXIT_CONFIG, EXIT_INTERRUPTED, EXIT_OK, EXIT_VERDICT, run
from geotherm.app.verify import BUILTIN_SUITES, verify

MINIMAL_PMI = """
# minimal power-Maxwell run
model.type = pmi
model.n = 4
model.i = 4
model.l = 1
sweep.var = S
sweep.min = 0.5
sweep.max = 10
fixed.Q = 1
"""

QUADRATIC = """
model.type = custom
model.variables = S, Q
model.potential = S^2 + Q^2
sweep.var = S
sweep.min = 0.5
sweep.max = 5
sweep.points = 64
fixed.Q = 1
output.name = quadratic
"""


def test_minimal_config():
    spec = parse_config(MINIMAL_PMI)
    assert spec.model.i == 4
    assert spec.sweep_spec().fixed == {"Q": 1.0}
    assert spec.sweep_spec().range == (0.5, 10.0)
    assert spec.analysis.verify_coincidence is False
    assert spec.tolerances.match == 1e-6


def test_lists_booleans_and_tolerances():
    spec = parse_config(
        MINIMAL_PMI
        + "analysis.quantities = R_gtd, CQ, Phi\n"
        + "analysis.verify_coincidence = true\n"
        + "tolerances.match = 1e-5\n"
    )
    assert spec.analysis.quantities == ["R_gtd", "C_Q", "Phi_e"]
    assert spec.analysis.verify_coincidence is True
    assert spec.tolerances.match == 1e-5


@pytest.mark.parametrize(
    "replace, addition, key",
    [
        ("sweep.min = 0.5", "sweep.min = 0", "sweep.min"),
        ("sweep.max = 10", "sweep.max = 0.2", "sweep.max"),
        ("model.n = 4", "model.n = 5", "model.n"),
        ("model.l = 1", "model.l = -2", "model.l"),
        ("fixed.Q = 1", "", "fixed.Q"),
        ("fixed.Q = 1", "fixed.Q = 1\nfixed.S = 2", "fixed.S"),
        ("sweep.var = S", "sweep.var = l", "sweep.var"),
        ("model.l = 1", "model.l = 1\nmodel.colour = red", "model.colour"),
        ("model.l = 1", "model.l = 1\nplot.style = dark", "plot.style"),
        ("model.l = 1", "model.l = 1\nanalysis.quantities = T, entropy", "analysis.quantities"),
        ("model.l = 1", "model.l = 1\nmodel.l = 2", "model.l"),
    ],
)
def test_config_errors_name_the_key(replace, addition, key):
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL_PMI.replace(replace, addition))
    assert info.value.key == key


def test_malformed_line():
    with pytest.raises(ConfigError) as info:
        parse_config("model.type pmi")
    assert info.value.key is None


def test_custom_model_config():
    spec = parse_config(QUADRATIC)
    assert spec.model.variables == ["S", "Q"]
    with pytest.raises(ConfigError) as info:
        parse_config(QUADRATIC.replace("S^2 + Q^2", "S^2 + x"))
    assert info.value.key == "model.potential"


def test_presets():
    names = [name for name, _ in list_presets()]
    assert names[:6] == ["fig1", "fig4", "fig7", "fig9", "fig10", "fig12"]
    assert all(description for _, description in list_presets())
    for name in names:
        assert load_spec(name).output.name == name
    for alias, target in PRESET_ALIASES.items():
        assert load_spec(alias).output.name == target
        assert preset_alias(target) == alias
    assert preset_alias("pmi6-gtd") is None
    with pytest.raises(ConfigError):
        load_spec("no-such-preset")


def test_presets_ship_inside_the_package():
    assert PRESET_DIR.parent == Path(geotherm.__file__).resolve().parent
    assert sorted(p.stem for p in PRESET_DIR.glob("fig*.conf")) == ["fig1", "fig10", "fig12", "fig4", "fig7", "fig9"]


def read_outputs(directory):
    frame = pd.read_csv(directory / "sweep.csv", keep_default_na=False, na_values=[""])
    report = json.loads((directory / "report.json").read_text())
    return frame, report


def test_run_rn_preset(tmp_path):
    result = run(load_spec("fig7"), str(tmp_path))
    assert result.exit_code == EXIT_OK
    assert result.output_dir == tmp_path / "fig7"
    assert sorted(p.name for p in result.files) == ["manifest.json", "report.json", "sweep.csv"]

    frame, report = read_outputs(result.output_dir)
    assert list(frame.columns) == CSV_COLUMNS
    assert len(frame) == 400
    assert frame["T"].isna().all()
    assert np.isfinite(frame["R_gtd"]).sum() > 300
    assert result.frame["pole_flags"].str.contains("CQ").sum() >= 4

    assert report["verdict"] == "pass"
    transitions = [r for r in report["records"] if r["source"] == "R_gtd" and r["kind"] == "phase_transition"]
    assert len(transitions) == 2

    manifest = json.loads((result.output_dir / "manifest.json").read_text())
    assert manifest["files"] == ["sweep.csv", "report.json", "manifest.json"]
    assert manifest["spec"]["model"]["type"] == "rn"


def test_weinhold_negative_control(tmp_path):
    text = (PRESET_DIR / "fig9.conf").read_text() + "\nanalysis.verify_coincidence = true\n"
    result = run(parse_config(text), str(tmp_path))
    assert result.exit_code == EXIT_VERDICT
    assert (result.output_dir / "report.json").is_file()
    assert result.report.verdict == "fail"


def test_runs_are_deterministic(tmp_path):
    spec = load_spec("fig7")
    first = run(spec, str(tmp_path / "a"))
    second = run(spec, str(tmp_path / "b"))
    for name in ("sweep.csv", "report.json"):
        assert (first.output_dir / name).read_bytes() == (second.output_dir / name).read_bytes()


def test_custom_run(tmp_path):
    result = run(parse_config(QUADRATIC), str(tmp_path))
    assert result.exit_code == EXIT_OK
    frame, report = read_outputs(result.output_dir)
    assert frame["L"].isna().all()
    assert (frame["R_w"] == 0).all()
    assert np.allclose(frame["CQ"], frame["x"])
    assert report["verdict"] == "pass"


def test_one_variable_model_is_flat(tmp_path):
    text = """
        model.type = custom
        model.variables = S
        model.potential = S^2 + S^3
        sweep.var = S
        sweep.min = 1
        sweep.max = 4
        sweep.points = 32
        analysis.quantities = T, CQ, R_gtd, f
        output.name = line
    """
    result = run(parse_config(text), str(tmp_path))
    assert result.exit_code == EXIT_OK
    assert (result.frame["R_gtd"] == 0).all()
    assert result.frame["Phi"].isna().all()


def test_verify_rn_suite():
    result = verify("rn")
    assert result.exit_code == EXIT_OK, result.table().to_string()
    names = [c.name for c in result.checks]
    assert "rn_closed_form" in names and "coincidence" in names


def test_verify_flags_entropy_cross_terms(tmp_path):
    path = tmp_path / "cross.conf"
    path.write_text(BUILTIN_SUITES["rn"].replace("analysis.verify_coincidence = true", "model.eta_s = 1"))
    result = verify(str(path))
    assert result.exit_code == EXIT_VERDICT
    assert "gtd_cross_terms" in result.failed


def test_verify_unknown_suite():
    with pytest.raises(ConfigError):
        verify("no-such-suite")


def test_main_exit_codes(tmp_path, capsys):
    assert main(["presets"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "fig7" in out and "rn-gtd" in out

    assert main(["show-model", "fig7"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "C_Q" in out and "variables: S, Q" in out

    assert main(["run", "no-such-preset"]) == EXIT_CONFIG
    assert main(["run", "rn-gtd", "--output-dir", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "fig7" / "sweep.csv").is_file()

    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0


def test_verify_four_dimensional_suite():
    result = verify("pmi-4-5/2")
    assert result.exit_code == EXIT_OK, result.table().to_string()
    names = [c.name for c in result.checks]
    assert "curvature_oracle[ruppeiner]" in names
    assert "coincidence" in names


def test_interrupt_exit_code(monkeypatch):
    def interrupted(args):
        raise KeyboardInterrupt

    monkeypatch.setitem(cli.COMMANDS, "presets", interrupted)
    assert main(["presets"]) == EXIT_INTERRUPTED == 130
