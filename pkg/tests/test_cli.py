"""Command-line surface: artifacts, determinism, error reporting."""

import json

import numpy as np

from sigmalab.cli import run
from sigmalab.fieldio import load_field, save_field


def write_config(path, body):
    path.write_text(body)
    return str(path)


BASE = """
[grid]
n1 = 8
n2 = 8

[target]
kind = sphere
ambient_dim = 3

[phi]
kind = {phi_kind}
{phi_extra}

[psi]
kind = {psi_kind}
amplitude = 0.3

[gravitino]
kind = {chi_kind}
amplitude = 0.3

[metric]
kind = zero

[solver]
max_iterations = 3000
tolerance = 1e-5
initial_step = 1e-5
"""


def config_text(phi_kind="equator", phi_extra="", psi_kind="zero", chi_kind="zero"):
    return BASE.format(
        phi_kind=phi_kind, phi_extra=phi_extra, psi_kind=psi_kind, chi_kind=chi_kind
    )


def test_eval_constant_map_all_zero(tmp_path):
    cfg = write_config(
        tmp_path / "run.ini",
        config_text(phi_kind="constant", phi_extra="point = 0,0,1"),
    )
    out = tmp_path / "out"
    assert run(["eval", "--config", cfg, "--out", str(out)]) == 0
    breakdown = json.loads((out / "breakdown.json").read_text())
    assert all(v == 0.0 for v in breakdown.values())


def test_check_command_passes_on_seeded_fields(tmp_path):
    cfg = write_config(
        tmp_path / "run.ini",
        config_text(phi_kind="smooth", psi_kind="smooth", chi_kind="smooth"),
    )
    out = tmp_path / "out"
    assert run(["check", "--config", cfg, "--out", str(out), "--seed", "7"]) == 0
    report = json.loads((out / "check_report.json").read_text())
    assert report["all_passed"]
    names = {r["name"] for r in report["results"]}
    assert {"clifford_relation", "super_weyl_shift", "sign_flip"} <= names


def test_residual_command_writes_norms_and_fields(tmp_path):
    cfg = write_config(tmp_path / "run.ini", config_text())
    out = tmp_path / "out"
    assert run(["residual", "--config", cfg, "--out", str(out)]) == 0
    norms = json.loads((out / "residuals.json").read_text())
    assert set(norms) == {"phi", "psi", "combined"}
    rphi, kind = load_field(out / "fields_rphi.csv")
    assert kind == "map" and rphi.shape == (8, 8, 3)


def test_solve_command_artifacts_and_determinism(tmp_path):
    cfg = write_config(
        tmp_path / "run.ini",
        config_text(phi_kind="perturbed-equator", phi_extra="amplitude = 0.05"),
    )
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert run(["solve", "--config", cfg, "--out", str(out1), "--seed", "3"]) == 0
    assert run(["solve", "--config", cfg, "--out", str(out2), "--seed", "3"]) == 0
    for name in ("flow_report.jsonl", "fields_phi.csv", "fields_psi.csv", "fields_chi.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    lines = (out1 / "flow_report.jsonl").read_text().splitlines()
    assert json.loads(lines[0])["iteration"] == 0
    final = json.loads(lines[-1])
    assert final["converged"] is True


def test_morrey_command(tmp_path):
    cfg = write_config(
        tmp_path / "run.ini",
        config_text() + "\n[morrey]\nresolution = 24\nradii = 0.25,0.5,1.0\n",
    )
    out = tmp_path / "out"
    assert run(["morrey", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "decay_profile.csv").read_text().splitlines()
    assert lines[0] == "radius,scaled_norm"
    assert len(lines) == 4


def test_field_file_round_trip_through_config(tmp_path):
    r = np.random.default_rng(0)
    phi = r.standard_normal((8, 8, 3))
    phi /= np.linalg.norm(phi, axis=-1, keepdims=True)
    save_field(tmp_path / "phi.csv", phi, "map")
    cfg = write_config(
        tmp_path / "run.ini",
        config_text(phi_kind="file", phi_extra="path = phi.csv"),
    )
    out = tmp_path / "out"
    assert run(["eval", "--config", cfg, "--out", str(out)]) == 0


def test_missing_config_is_machine_readable_error(tmp_path, capsys):
    rc = run(["eval", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path)])
    assert rc == 2
    err = capsys.readouterr().err
    payload = json.loads(err)
    assert payload["error"] == "ConfigError"


def test_inconsistent_field_shape_rejected(tmp_path, capsys):
    save_field(tmp_path / "phi.csv", np.zeros((4, 4, 3)), "map")
    cfg = write_config(
        tmp_path / "run.ini",
        config_text(phi_kind="file", phi_extra="path = phi.csv"),
    )
    rc = run(["eval", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"


def test_bad_target_kind_rejected(tmp_path, capsys):
    text = config_text().replace("kind = sphere", "kind = torus")
    cfg = write_config(tmp_path / "run.ini", text)
    rc = run(["eval", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"
