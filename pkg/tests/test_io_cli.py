import json
import math

import jsonschema
import numpy as np
import pytest

from fieldmatter import cli, io
from fieldmatter.errors import InvalidStateError
from fieldmatter.gaussian import random_covariance
from fieldmatter.homogeneous import CutoffRecord


def output_schema(name):
    return cli.load_schema("output", name)


def run_cli(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out), "--workers", "1"])
    return code, (out.read_text() if out.exists() else None)


# ---------------------------------------------------------------- io

def test_csv_round_trip_is_exact():
    rng = np.random.default_rng(0)
    recs = [CutoffRecord(float(c), float(v), float(e))
            for c, v, e in rng.lognormal(size=(5, 3))]
    text = io.records_to_csv(recs, CutoffRecord.columns)
    back = io.read_csv(text)
    assert [tuple(r.values()) for r in back] == [(r.cutoff, r.entropy_density, r.err_bound)
                                                for r in recs]


def test_empty_csv_is_header_only():
    assert io.records_to_csv([], ("a", "b")) == "a,b\n"


def test_format_value():
    assert io.format_value(math.inf) == "inf"
    assert io.format_value(3) == "3"
    assert io.format_value(0.1) == "1.0000000000000001e-01"


def test_json_is_deterministic_and_finite():
    doc = {"b": [1.0, math.inf], "a": np.float64(2.0)}
    text = io.dumps(doc)
    assert text == io.dumps(dict(reversed(list(doc.items()))))
    assert json.loads(text) == {"a": 2.0, "b": [1.0, None]}


def test_covariance_round_trip():
    gamma, _ = random_covariance(3, np.random.default_rng(1))
    doc = io.covariance_to_json(gamma)
    jsonschema.validate(doc, output_schema("covariance"))
    assert np.array_equal(io.covariance_from_json(doc), gamma)


@pytest.mark.parametrize("doc", [{"n": 2, "data": [1.0]}, {"data": []},
                                 {"n": 1, "ordering": "block", "data": [1, 0, 0, 1]}])
def test_covariance_rejects_malformed(doc):
    with pytest.raises(InvalidStateError):
        io.covariance_from_json(doc)


# ---------------------------------------------------------------- cli

def test_plates_csv_contract(tmp_path):
    code, text = run_cli(tmp_path, "plates", "--omega-0", "3", "--omega-p", "0.1",
                         "--transverse-dim", "0", "--L-min", "10", "--L-max", "100",
                         "--L-count", "10", name="p.csv")
    assert code == 0
    assert text.splitlines()[0] == "L,k_perp_dim,S,S_R,lambda_plus,lambda_minus,err_bound"
    assert len(text.splitlines()) == 11
    manifest = json.loads((tmp_path / "p.csv.manifest.json").read_text())
    assert manifest["config"]["command"] == "plates"
    assert manifest["fit"]["exponent"] < 0
    assert "wall_time_s" in manifest and "numpy" in manifest["versions"]


@pytest.mark.parametrize("argv, name", [
    (["modes", "--model", "drude", "--k-count", "5", "--format", "json"], "modes"),
    (["entropy-scan", "--cutoff-min", "10", "--cutoff-max", "1000", "--cutoff-count", "3",
      "--format", "json"], "entropy-scan"),
    (["variance", "--model", "drude", "--eps-count", "3", "--format", "json"], "variance"),
    (["heff-kernel", "--model", "drude", "--r-count", "4", "--format", "json"], "heff-kernel"),
    (["plates", "--L-count", "3", "--format", "json"], "plates"),
    (["oracle", "--sites", "32", "--plate-sep", "6"], "oracle"),
    (["oracle", "--sites", "64", "--plate-sep", "8", "--compare"], "oracle"),
    (["casimir-ee", "--plate-sep", "6"], "casimir-ee"),
])
def test_json_outputs_validate(tmp_path, argv, name):
    code, text = run_cli(tmp_path, *argv, name="o.json")
    assert code == 0
    jsonschema.validate(json.loads(text), output_schema(name))


def test_williamson_command(tmp_path):
    gamma, mus = random_covariance(2, np.random.default_rng(5))
    src = tmp_path / "cov.json"
    src.write_text(json.dumps(io.covariance_to_json(gamma)))
    code, text = run_cli(tmp_path, "williamson", "--input", str(src), name="w.json")
    assert code == 0
    doc = json.loads(text)
    jsonschema.validate(doc, output_schema("williamson"))
    assert np.allclose(doc["spectrum"], sorted(mus, reverse=True), rtol=1e-10)


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"L_min": 10, "L_max": 20, "L_count": 2, "omega_p": 0.2}))
    code, text = run_cli(tmp_path, "plates", "--config", str(cfg), "--omega-p", "0.1",
                         name="p.csv")
    assert code == 0
    manifest = json.loads((tmp_path / "p.csv.manifest.json").read_text())
    assert manifest["config"]["omega_p"] == 0.1
    assert manifest["config"]["L_max"] == 20
    assert [r["L"] for r in io.read_csv(text)] == [10.0, 20.0]


def test_print_defaults(capsys):
    assert cli.main(["--print-defaults"]) == 0
    assert json.loads(capsys.readouterr().out)["subcommands"]["plates"]["omega_0"] == 3.0


def test_stdout_output(capsys):
    assert cli.main(["modes", "--model", "vacuum", "--k-count", "2", "--workers", "1"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "k,g_k,h_k,mu_k,u_k,n_k,T_k"


@pytest.mark.parametrize("argv", [
    ["entropy-scan", "--tol", "-1"],
    ["plates", "--omega-p", "5"],
    ["modes", "--model", "vacuum", "--omega-c", "1"],
    ["plates", "--bogus"],
    ["heff-kernel", "--model", "vacuum"],
    [],
])
def test_configuration_errors_exit_2(tmp_path, argv):
    assert cli.main([*argv, "--out", str(tmp_path / "x")] if argv else []) == 2


def test_bad_config_file_exit_2(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    assert cli.main(["plates", "--config", str(cfg)]) == 2
    cfg.write_text(json.dumps({"unknown_key": 1}))
    assert cli.main(["plates", "--config", str(cfg)]) == 2


def test_failed_comparison_exit_3(tmp_path):
    code, text = run_cli(tmp_path, "oracle", "--sites", "16", "--plate-sep", "12", "--compare",
                         name="o.json")
    assert code == 3
    assert json.loads(text)["passed"] is False


def test_io_error_exit_4(tmp_path):
    assert cli.main(["modes", "--k-count", "2", "--workers", "1",
                     "--out", str(tmp_path / "missing" / "x.csv")]) == 4
    assert cli.main(["williamson", "--input", str(tmp_path / "nope.json")]) == 4


def test_unphysical_input_exit_2(tmp_path):
    src = tmp_path / "cov.json"
    src.write_text(json.dumps(io.covariance_to_json(np.diag([0.5, 0.5]))))
    assert cli.main(["williamson", "--input", str(src)]) == 2


def test_worker_count_does_not_change_bytes(tmp_path):
    outs = []
    for w in ("1", "2"):
        path = tmp_path / f"p{w}.csv"
        assert cli.main(["plates", "--L-count", "4", "--workers", w, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
