import csv
import io
import json

import numpy as np
import pytest

from curvlie.cli import RunConfig, _to_json, bundled_path, main


def data(name):
    return bundled_path(name)


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_json(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


# --- validate ---------------------------------------------------------------


def test_validate_bundled_algebras(capsys):
    for name in ("so3.json", "so4.json"):
        code, out, _ = run(capsys, ["validate", data(name)])
        assert code == 0
        assert json.loads(out)["valid"] is True


def test_validate_broken_jacobi_names_triple(capsys, tmp_path):
    doc = json.loads(open(data("so3.json")).read())
    # [e1, e2] = e3 + e1 keeps antisymmetry but breaks Jacobi
    doc["structure"] += [[0, 1, 0, 1.0], [1, 0, 0, -1.0]]
    code, _, err = run(capsys, ["validate", write_json(tmp_path, "bad.json", doc)])
    assert code == 2
    assert "(0, 1, 2)" in err
    assert err.count("(0, 1, 2)") == 1


def test_validate_malformed_json(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"dim": 3, "structure": [')
    code, _, err = run(capsys, ["validate", str(p)])
    assert code == 2
    assert "not valid JSON" in err


def test_validate_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, ["validate", str(tmp_path / "nope.json")])
    assert code == 2 and "cannot read" in err


# --- path -------------------------------------------------------------------


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "kappa_closed", "kappa_direct", "abs_diff"]
    return np.array(rows[1:], dtype=float)


def test_path_endpoint_row(capsys):
    code, out, _ = run(
        capsys,
        ["path", data("so3.json"), "--psi", data("psi_so3_diag.json"), "--plane", "e1", "e2", "--grid", "0", "1", "5"],
    )
    assert code == 0
    rows = read_csv(out)
    assert rows.shape == (5, 4)
    assert rows[-1, 0] == 1.0
    assert rows[-1, 1] == pytest.approx(-1 / 6, abs=1e-12)
    assert rows[-1, 2] == pytest.approx(-1 / 6, abs=1e-12)


def test_path_zero_psi_constant_column(capsys, tmp_path):
    out_file = tmp_path / "k.csv"
    code, out, _ = run(
        capsys,
        ["path", data("so3.json"), "--psi", data("psi_zero_so3.json"),
         "--plane", "[1, 0, 0]", "[0.6, 0.8, 0]", "--out", str(out_file)],
    )
    assert code == 0 and out == ""
    rows = read_csv(out_file.read_text())
    assert len(rows) == 50  # default grid
    # |[X, Y]|^2 = 0.64 for this pair
    assert np.allclose(rows[:, 1], 0.25 * 0.64, atol=1e-15)
    assert np.allclose(rows[:, 2], 0.25 * 0.64, atol=1e-15)


def test_path_from_metric_matches_psi(capsys, tmp_path):
    psi = np.array(json.loads(open(data("psi_so3_diag.json")).read()))
    metric = np.linalg.inv(np.eye(3) - psi)
    m = write_json(tmp_path, "metric.json", metric.tolist())
    argv = ["--plane", "e1", "e2", "--grid", "0", "1", "4"]
    _, out_psi, _ = run(capsys, ["path", data("so3.json"), "--psi", data("psi_so3_diag.json"), *argv])
    code, out_met, _ = run(capsys, ["path", data("so3.json"), "--from-metric", m, *argv])
    assert code == 0
    assert np.allclose(read_csv(out_psi)[:, 2], read_csv(out_met)[:, 2], atol=1e-12)


def test_path_beyond_domain_exits_2(capsys):
    # domain bound is 1.5 for this psi
    code, _, err = run(
        capsys,
        ["path", data("so3.json"), "--psi", data("psi_so3_diag.json"), "--plane", "e1", "e2", "--grid", "0", "2", "5"],
    )
    assert code == 2 and "domain" in err


def test_path_requires_one_source(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["path", data("so3.json"), "--plane", "e1", "e2"])
    assert exc.value.code == 2


def test_path_bad_vector_exits_2(capsys):
    code, _, err = run(
        capsys, ["path", data("so3.json"), "--psi", data("psi_zero_so3.json"), "--plane", "e1", "[1, 2]"]
    )
    assert code == 2 and "length 3" in err


# --- infnn ------------------------------------------------------------------


def test_infnn_zero_passes(capsys):
    code, out, _ = run(capsys, ["infnn", data("so3.json"), data("psi_zero_so3.json"), "--budget", "500"])
    assert code == 0
    assert json.loads(out)["verdict"] == "Passed"


def test_infnn_coupling_refuted_with_witness(capsys):
    code, out, _ = run(capsys, ["infnn", data("so4.json"), data("psi_coupling_so4.json")])
    assert code == 1
    report = json.loads(out)
    assert report["verdict"] == "Refuted"
    assert report["witness"]["delta"] < 0


def test_infnn_nonsymmetric_exits_2(capsys, tmp_path):
    p = write_json(tmp_path, "psi.json", [[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    code, _, err = run(capsys, ["infnn", data("so3.json"), p])
    assert code == 2 and "symmetry residual" in err


# --- scale ------------------------------------------------------------------


def test_scale_abelian_past_four_thirds(capsys):
    code, out, _ = run(capsys, ["scale", data("so3.json"), "--sub", "e3", "--factor", "1.5"])
    assert code == 1
    report = json.loads(out)
    assert report["abelian"] is True
    assert report["t"] == pytest.approx(1 - 1 / 1.5)
    assert report["stretch"]["verdict"] == "Fails"
    w = np.array(report["stretch"]["witness"])
    assert np.allclose(np.abs(w), [0, 0, 1])


def test_scale_abelian_at_four_thirds_is_clean(capsys):
    code, _, _ = run(capsys, ["scale", data("so3.json"), "--sub", "e3", "--factor", str(4 / 3)])
    assert code == 0


def test_scale_rejects_nonpositive_factor(capsys):
    code, _, _ = run(capsys, ["scale", data("so3.json"), "--sub", "e3", "--factor", "0"])
    assert code == 2


# --- so4 classify -----------------------------------------------------------


def test_so4_classify_boundary_torus(capsys):
    code, out, _ = run(capsys, ["so4", "classify", data("torus_boundary_so4.json")])
    assert code == 0
    report = json.loads(out)
    assert report["torus_form"] is not None
    assert report["torus_form"]["bound"] is True


def test_so4_classify_unbounded_torus_gives_witness(capsys):
    code, out, _ = run(capsys, ["so4", "classify", data("torus_unbounded_so4.json")])
    assert code == 1
    report = json.loads(out)
    assert report["torus_form"]["bound"] is False
    assert report["witness"]["value"] < -1e-8


def test_so4_classify_rejects_indefinite(capsys, tmp_path):
    p = write_json(tmp_path, "m.json", (-np.eye(6)).tolist())
    code, _, _ = run(capsys, ["so4", "classify", p])
    assert code == 2


# --- rescale-check ----------------------------------------------------------


def test_rescale_check_lambda_two(capsys):
    code, out, _ = run(capsys, ["rescale-check", data("so4.json"), data("psi_seeded_so4.json"), "--lambda", "2"])
    assert code == 0
    report = json.loads(out)
    assert report["planes"] == 10
    assert report["max_curve_residual"] <= 1e-9
    assert report["max_coefficient_residual"] <= 1e-9


def test_rescale_check_rejects_nonpositive_lambda(capsys):
    code, _, err = run(capsys, ["rescale-check", data("so4.json"), data("psi_seeded_so4.json"), "--lambda", "0"])
    assert code == 2 and "positive" in err


# --- determinism and config -------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["infnn", "so4.json", "psi_coupling_so4.json", "--budget", "300"],
        ["rescale-check", "so4.json", "psi_seeded_so4.json", "--lambda", "0.7", "--samples", "3"],
        ["so4", "classify", "torus_boundary_so4.json"],
    ],
)
def test_outputs_byte_identical(capsys, argv):
    argv = [data(a) if a.endswith(".json") else a for a in argv]
    first = run(capsys, argv)
    second = run(capsys, argv)
    assert first == second


def test_seed_env_override(capsys, monkeypatch):
    argv = ["rescale-check", data("so4.json"), data("psi_seeded_so4.json"), "--lambda", "2", "--samples", "2"]
    monkeypatch.setenv("CURVLIE_SEED", "7")
    _, out, _ = run(capsys, argv)
    assert json.loads(out)["seed"] == 7
    _, out, _ = run(capsys, argv + ["--seed", "9"])
    assert json.loads(out)["seed"] == 9
    monkeypatch.delenv("CURVLIE_SEED")
    _, out, _ = run(capsys, argv)
    assert json.loads(out)["seed"] == 42


def test_run_config_defaults_and_validation():
    cfg = RunConfig()
    assert (cfg.seed, cfg.budget, cfg.tol, cfg.t_grid) == (42, 10000, 1e-9, None)
    for bad in ({"seed": -1}, {"budget": 0}, {"tol": 0.0}, {"t_grid": (0, 1, 0)}):
        with pytest.raises(ValueError):
            RunConfig(**bad)


def test_json_writer_uses_17_digits():
    assert _to_json({"x": 0.1, "n": [1, float("nan")], "b": True}) == '{"x": 0.10000000000000001, "n": [1, null], "b": true}'
    assert float(_to_json(1 / 3)) == 1 / 3
    assert _to_json([-0.0]) == "[0]"
