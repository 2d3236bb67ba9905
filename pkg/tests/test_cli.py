import json

import numpy as np
import pytest

from fields.field import OffDiagonalField, ScalarField
from fields.grid import make_grid
from fields.io import read_field_csv
from main import EXIT_FAILURE, EXIT_PASS, EXIT_USAGE, main, parse_norm_params
from operators.gradient import frac_divergence, frac_gradient
from testlib.families import get_preset
from testlib.scalar_functions import sample_scalar
from verify.registry import SUITE_IDS


@pytest.fixture(autouse=True)
def in_tmp_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_gradient_writes_od_csv_to_stdout(capsys):
    assert main(["gradient", "--spec", "gaussian", "--L", "4", "--N", "16", "--s", "0.5"]) == EXIT_PASS
    out, err = capsys.readouterr()
    lines = out.splitlines()
    assert lines[0].startswith("# grid n=1")
    assert lines[1].startswith("# source order=0.5 values=")
    assert len(lines) == 2 + 16 * 15
    assert "OffDiagonalField" in err


def test_laplacian_of_constant_is_zero(tmp_path):
    target = tmp_path / "lap.csv"
    code = main(["laplacian", "--spec", "constant", "--L", "4", "--N", "32", "--s", "0.5",
                 "--output", str(target)])
    assert code == EXIT_PASS
    field = read_field_csv(str(target))
    assert isinstance(field, ScalarField)
    assert np.all(field.values == 0.0)


def test_gradient_then_divergence_from_files(tmp_path):
    gradient = tmp_path / "grad.csv"
    divergence = tmp_path / "div.csv"
    assert main(["gradient", "--spec", "bump", "--L", "4", "--N", "24", "--s", "0.5",
                 "--output", str(gradient)]) == EXIT_PASS
    assert isinstance(read_field_csv(str(gradient)), OffDiagonalField)
    assert main(["divergence", "--input", str(gradient), "--s", "0.5", "--output", str(divergence)]) == EXIT_PASS
    assert isinstance(read_field_csv(str(divergence)), ScalarField)


def test_operator_rejects_wrong_field_kind(tmp_path):
    scalar = tmp_path / "u.csv"
    assert main(["mollify", "--spec", "gaussian", "--L", "4", "--N", "24", "--epsilon", "1.0",
                 "--output", str(scalar)]) == EXIT_PASS
    assert main(["divergence", "--input", str(scalar), "--s", "0.5"]) == EXIT_USAGE


def test_malformed_input_is_a_usage_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("# grid n=1 L=1 N=3\n0,1.0\n1,oops\n2,3.0\n", encoding="utf-8")
    assert main(["gradient", "--input", str(bad), "--s", "0.5"]) == EXIT_USAGE
    assert main(["gradient", "--input", str(tmp_path / "missing.csv"), "--s", "0.5"]) == EXIT_USAGE


def test_norms_emit_one_row_per_parameter(capsys):
    code = main(["norms", "--spec", "gaussian", "--L", "4", "--N", "32", "--params", "0.5:2", "0.25:1", "0.75:2"])
    assert code == EXIT_PASS
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "kind,s,p,q,n,N,L,value"
    assert [line.split(",")[0] for line in lines[1:]] == ["gagliardo"] * 3


def test_norms_with_integrability_exponent(capsys):
    assert main(["norms", "--spec", "gaussian", "--L", "4", "--N", "32", "--params", "0.25:2:4"]) == EXIT_PASS
    kinds = [line.split(",")[0] for line in capsys.readouterr().out.splitlines()[1:]]
    assert kinds == ["gagliardo", "wspq", "shift_lq"]


def test_parse_norm_params():
    params = parse_norm_params(["0.5:2", "0.25:2:4"])
    assert params[0].q is None and params[1].q == 4.0
    with pytest.raises(ValueError):
        parse_norm_params(["0.5"])
    with pytest.raises(ValueError):
        parse_norm_params(["a:b"])


def test_bad_norm_params_exit_with_usage(capsys):
    assert main(["norms", "--spec", "gaussian", "--N", "16", "--params", "0.5"]) == EXIT_USAGE


def test_list_families(capsys):
    assert main(["list-families"]) == EXIT_PASS
    out = capsys.readouterr().out
    assert "od_bumps" in out and "disjoint_bumps" in out


def test_verify_rejects_unknown_suite_in_config(tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("[suite.no_such_suite]\nladder = 32\n", encoding="utf-8")
    assert main(["verify", "adjointness", "--config", str(config), "--output-dir", str(tmp_path)]) == EXIT_USAGE


def test_verify_unknown_suite_is_rejected_by_parser():
    with pytest.raises(SystemExit) as info:
        main(["verify", "no_such_suite"])
    assert info.value.code == 2


def test_verify_small_adjointness(tmp_path):
    config = tmp_path / "desk.cfg"
    config.write_text("[run]\nformats = json,csv\n\n[suite.adjointness]\nladder = 48\ns_values = 0.5\n"
                      "scalar_families = gaussians\nod_families = od_bumps\n", encoding="utf-8")
    out_dir = tmp_path / "results"
    code = main(["verify", "adjointness", "--config", str(config), "--output-dir", str(out_dir),
                 "--stable-names", "--no-progress"])
    assert code == EXIT_PASS
    report = json.loads((out_dir / "adjointness.json").read_text(encoding="utf-8"))
    assert report["suite"] == "adjointness" and report["verdict"] == "pass"
    assert (out_dir / "adjointness_cases.csv").exists()


def test_reports_lists_saved_reports(tmp_path, capsys):
    assert main(["reports", "--dir", str(tmp_path / "empty")]) == EXIT_PASS
    assert "没有报告文件" in capsys.readouterr().out

    out_dir = tmp_path / "results"
    out_dir.mkdir()
    (out_dir / "convergence.json").write_text(json.dumps({
        "suite": "convergence", "cases": [{"name": "order", "verdict": "pass"}],
        "fits": {"pair_scalar/richardson": 1.0}, "orders": {"frac_gradient": "inf"}, "verdict": "pass",
    }), encoding="utf-8")
    assert main(["reports", "--dir", str(out_dir)]) == EXIT_PASS
    out = capsys.readouterr().out
    assert "convergence" in out and "pair_scalar/richardson" in out


def test_divergence_of_a_gradient_file_matches_the_in_memory_result(tmp_path):
    gradient = tmp_path / "grad.csv"
    divergence = tmp_path / "div.csv"
    assert main(["gradient", "--spec", "gaussian", "--L", "6", "--N", "48", "--s", "0.5",
                 "--output", str(gradient)]) == EXIT_PASS
    assert main(["divergence", "--input", str(gradient), "--s", "0.5", "--output", str(divergence)]) == EXIT_PASS

    u = sample_scalar(get_preset("gaussian"), make_grid(1, 6.0, 48))
    expected = frac_divergence(frac_gradient(u, 0.5), 0.5)
    assert np.array_equal(read_field_csv(str(divergence)).values, expected.values)


def test_unwritable_output_is_a_usage_error(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    code = main(["gradient", "--spec", "gaussian", "--L", "4", "--N", "16", "--s", "0.5",
                 "--output", str(blocker / "grad.csv")])
    assert code == EXIT_USAGE


def test_list_families_with_a_seed(capsys):
    assert main(["list-families", "--random", "3"]) == EXIT_PASS
    first = capsys.readouterr().out
    assert main(["list-families", "--random", "3"]) == EXIT_PASS
    assert capsys.readouterr().out == first
    assert first.startswith("种子 3 选中函数族: ")


def test_verify_writes_the_norm_table(tmp_path):
    config = tmp_path / "small.cfg"
    config.write_text("[run]\nformats = json,csv\n\n[suite.wsp_od]\nladder = 32\ng_family_sizes = 1,4\n",
                      encoding="utf-8")
    out_dir = tmp_path / "results"
    code = main(["verify", "wsp_od", "--config", str(config), "--output-dir", str(out_dir),
                 "--stable-names", "--no-progress"])
    assert code in (EXIT_PASS, EXIT_FAILURE)
    lines = (out_dir / "wsp_od_norms.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "kind,s,p,q,n,N,L,value"
    assert {line.split(",")[0] for line in lines[1:]} == {"wsp_od", "dual_hminushalf"}


@pytest.mark.slow
def test_verify_all_is_byte_identical_across_runs(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("[run]\nformats = json,csv\n", encoding="utf-8")
    outputs = []
    for name in ("first", "second"):
        out_dir = tmp_path / name
        main(["verify", "all", "--config", str(config), "--output-dir", str(out_dir),
              "--stable-names", "--no-progress"])
        outputs.append({path.name: path.read_bytes() for path in sorted(out_dir.iterdir())})
    assert outputs[0] == outputs[1]
    assert {f"{suite_id}.json" for suite_id in SUITE_IDS} <= set(outputs[0])
