import json
import math
from pathlib import Path

import numpy as np
import pytest

from config import ConfigError, SUITE_DEFAULTS, load_run_config
from fields.grid import Mollifier, make_grid
from verify.base_suite import BaseSuite
from verify.baseline import BASELINE_KEYS, compare_to_baseline, load_baseline, save_baseline
from verify.convergence import convergence_study, observed_order, richardson_limit
from verify.identity_suites import commutation_defect, exact_mollification
from verify.registry import SUITE_IDS, run_suite
from verify.report import NORM_COLUMNS, CaseRecord, VerificationReport, relative_difference, relative_spread

BASELINE_DIR = Path(__file__).resolve().parent.parent / "baselines"


class RecordingSuite(BaseSuite):
    suite_id = "adjointness"

    def run_cases(self) -> None:
        pass


def test_registry_covers_every_configured_suite(run_config):
    assert SUITE_IDS == list(SUITE_DEFAULTS)
    with pytest.raises(KeyError):
        run_suite("no_such_suite", run_config)


def test_suite_rejects_foreign_config(suite_config):
    with pytest.raises(ValueError):
        RecordingSuite(suite_config("holder"))


def test_small_adjointness_run_passes(suite_config):
    cfg = suite_config("adjointness", ladder=[48], s_values=[0.5], scalar_families=["gaussians"],
                       od_families=["od_bumps"])
    report = run_suite("adjointness", cfg)
    assert report.verdict == "pass"
    assert report.count("fail") == 0
    assert report.fits["max_relative_residual"] <= 1e-10


def test_ratio_case_verdicts(suite_config):
    suite = RecordingSuite(suite_config("adjointness"))
    assert suite.ratio_case("constant", {}, 0.0, 0.0, span=0.0, bound=1.0) is None
    assert suite.ratio_case("rigid", {}, 1.0, 0.0, span=1.0, bound=1.0) is None
    assert suite.ratio_case("ok", {}, 1.0, 2.0, span=1.0, bound=1.0) == 0.5
    assert suite.ratio_case("recorded", {}, 3.0, 1.0, span=1.0) == 3.0
    verdicts = [case.verdict for case in suite.report.cases]
    assert verdicts == ["vacuous", "fail", "pass", "info"]
    assert suite.report.verdict == "fail"


def test_report_json_is_deterministic_and_keeps_infinities():
    def build():
        report = VerificationReport("convergence")
        report.add(CaseRecord("order", {"N": [17, 33]}, lhs=math.inf, verdict="pass"))
        report.fits["value"] = 0.1
        report.orders["frac_gradient"] = math.inf
        return report

    text = build().to_json()
    assert text == build().to_json()
    data = json.loads(text)
    assert data["orders"]["frac_gradient"] == "inf"
    assert data["cases"][0]["rhs"] == "nan"
    assert data["verdict"] == "pass"
    assert build().cases_csv().splitlines()[0] == "name,lhs,rhs,ratio,residual,verdict,note"


def test_report_verdict_rules():
    report = VerificationReport("bb_l1")
    assert report.verdict == "vacuous"
    report.add(CaseRecord("zero", verdict="vacuous"))
    report.add(CaseRecord("note"))
    assert report.verdict == "vacuous"
    report.add(CaseRecord("ok", verdict="pass"))
    assert report.verdict == "pass"
    with pytest.raises(ValueError):
        CaseRecord("bad", verdict="maybe")


def test_relative_helpers():
    assert relative_difference(0.0, 0.0) == 0.0
    assert relative_difference(1.0, 2.0) == 0.5
    assert relative_difference(math.inf, math.inf) == 0.0
    assert relative_spread([1.0, 1.0, 1.0]) == 0.0
    assert relative_spread([0.9, 1.1]) == pytest.approx(0.2)


def test_baseline_round_trip(tmp_path):
    report = VerificationReport("bb_l1")
    report.fits["max_ratio"] = 2.0
    report.fits["max_ratio/N=128"] = 1.9
    path = save_baseline(str(tmp_path), report)
    assert path is not None
    assert load_baseline(str(tmp_path), "bb_l1") == {"max_ratio": 2.0}
    assert load_baseline(str(tmp_path), "sobolev") is None
    assert save_baseline(str(tmp_path), VerificationReport("adjointness")) is None

    current = VerificationReport("bb_l1")
    current.fits["max_ratio"] = 2.05
    compare_to_baseline(current, {"max_ratio": 2.0}, ["max_ratio"], 0.05)
    compare_to_baseline(current, {"max_ratio": 2.0}, ["max_ratio"], 0.01, upper_only=True)
    compare_to_baseline(current, None, ["max_ratio"], 0.05)
    assert [case.verdict for case in current.cases] == ["pass", "fail", "vacuous"]


def test_observed_order_of_quadratic_error():
    spacings = [0.1, 0.05, 0.025, 0.0125]
    values = [1.0 + 3.0 * h ** 2 for h in spacings]
    assert observed_order(spacings, values) == pytest.approx(2.0, abs=1e-6)
    assert observed_order(spacings, spacings, residual=True) == pytest.approx(1.0)


def test_observed_order_sentinels():
    spacings = [0.1, 0.05, 0.025, 0.0125]
    assert observed_order(spacings, [2.0] * 4) == math.inf
    assert math.isnan(observed_order(spacings, [1.0, 2.0, 2.0, 2.0]))


def test_richardson_limit_removes_leading_error():
    spacings = [0.1, 0.05, 0.025]
    values = [1.0 + h ** 2 for h in spacings]
    assert richardson_limit(4.0, values) == pytest.approx(1.0, abs=1e-12)
    assert richardson_limit(4.0, [3.0]) == 3.0


def test_convergence_study_rejects_bad_requests():
    with pytest.raises(ValueError):
        convergence_study("no_such_op", "gaussian", 0.5, [17, 33, 65])
    with pytest.raises(ValueError):
        convergence_study("pair_scalar", "gaussian", 0.0, [17, 33])


def test_gradient_is_exact_on_nodes():
    report = convergence_study("frac_gradient", "gaussian", 0.5, [41, 81, 161])
    assert report.orders["frac_gradient"] == math.inf
    assert report.fits["frac_gradient/richardson"] == report.fits["frac_gradient/value/N=161"]


def test_trapezoid_pairing_is_second_order():
    spec = {"kind": "gaussian", "center": 0.0, "width": 1.0, "amplitude": 1.0}
    report = convergence_study("pair_scalar", spec, 0.0, [17, 33, 65, 129], half_width=1.0)
    assert report.orders["pair_scalar"] == pytest.approx(2.0, abs=0.3)
    assert report.fits["pair_scalar/richardson"] == pytest.approx(math.sqrt(math.pi / 2) * math.erf(math.sqrt(2)),
                                                                  rel=1e-4)


def test_config_file_overrides(tmp_path):
    path = tmp_path / "desk.cfg"
    path.write_text("[run]\nseed = 3\n\n[suite.bb_l1]\nladder = 64,128\nparams = 0.5:1:2:1\n"
                    "tol.baseline = 0.2\n", encoding="utf-8")
    config = load_run_config(str(path), output_dir=str(tmp_path / "out"))
    settings = config.suite_settings("bb_l1")
    assert config.seed == 3
    assert settings["ladder"] == [64, 128]
    assert settings["params"] == [{"s": 0.5, "p": 1.0, "q": 2.0, "n": 1}]
    assert settings["tolerances"]["baseline"] == 0.2
    assert settings["tolerances"]["dilation"] == SUITE_DEFAULTS["bb_l1"]["tolerances"]["dilation"]


@pytest.mark.parametrize("text", [
    "[suite.no_such_suite]\nladder = 64\n",
    "[run]\nseed = abc\n",
    "[suite.bb_l1]\nparams = 0.5:x:2:1\n",
])
def test_bad_config_files(tmp_path, text):
    path = tmp_path / "bad.cfg"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_run_config(str(path), output_dir=str(tmp_path))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(str(tmp_path / "missing.cfg"))


def test_suite_config_validation(suite_config):
    with pytest.raises(ConfigError):
        suite_config("bb_l1", ladder=[256, 128])
    with pytest.raises(ConfigError):
        suite_config("sobolev", params=[{"s": 0.25, "p": 2.0, "q": 3.0, "n": 1}])
    with pytest.raises(ConfigError):
        suite_config("bb_l1").tolerance("no_such_tolerance")


@pytest.mark.slow
def test_counterexample_suite_passes(suite_config):
    report = run_suite("counterexample", suite_config("counterexample"))
    assert report.verdict == "pass"
    assert report.fits["chi_slope"] > 0
    assert report.fits["far_field_slope"] == pytest.approx(4.0 * math.sqrt(math.pi / 2))


def _case(report, name):
    return next(case for case in report.cases if case.name == name)


def test_small_adjointness_run_checks_distance_rescaling(suite_config):
    cfg = suite_config("adjointness", ladder=[48], s_values=[0.5], scalar_families=["gaussians"],
                       od_families=["od_bumps"])
    report = run_suite("adjointness", cfg)
    rescaled = [case for case in report.cases if "/zero_order/" in case.name]
    assert rescaled and all(case.verdict == "pass" for case in rescaled)


def test_ratio_suite_fails_above_its_baseline(suite_config, tmp_path):
    baseline_dir = tmp_path / "baselines"
    cfg = suite_config("bb_l1", ladder=[64, 96], baseline_dir=str(baseline_dir))
    first = run_suite("bb_l1", cfg)
    assert _case(first, "baseline/max_ratio").verdict == "vacuous"
    assert first.norm_rows and set(first.norm_rows[0]) == set(NORM_COLUMNS)
    assert {row["kind"] for row in first.norm_rows} == {"shift_lq", "gagliardo"}

    save_baseline(str(baseline_dir), first)
    assert _case(run_suite("bb_l1", cfg), "baseline/max_ratio").verdict == "pass"

    # 当前比值比基线高 10%，超出 5% 的容差
    (baseline_dir / "bb_l1.json").write_text(json.dumps(
        {"suite": "bb_l1", "fits": {"max_ratio": first.fits["max_ratio"] / 1.1}}), encoding="utf-8")
    again = run_suite("bb_l1", cfg)
    assert _case(again, "baseline/max_ratio").verdict == "fail"
    assert again.failed


def test_committed_baselines_cover_every_ratio_suite():
    for suite_id, keys in BASELINE_KEYS.items():
        fits = load_baseline(str(BASELINE_DIR), suite_id)
        assert fits is not None, suite_id
        assert all(0.0 < fits[key] < 1.0 for key in keys)


def test_committed_baseline_files_are_in_saved_form():
    for suite_id in BASELINE_KEYS:
        text = (BASELINE_DIR / f"{suite_id}.json").read_text(encoding="utf-8")
        data = json.loads(text)
        assert data["suite"] == suite_id
        assert text == json.dumps(data, ensure_ascii=False, indent=2) + "\n"


def test_commutation_defect_with_gaussian_kernel_is_at_quadrature_level(gaussian):
    grid = make_grid(1, 10.0, 128)
    assert commutation_defect(gaussian, grid, 0.5, Mollifier("gaussian", 0.5)) <= 1e-9


def test_commutation_defect_shrinks_with_bump_kernel(gaussian):
    m = Mollifier("bump", 0.5)
    coarse = commutation_defect(gaussian, make_grid(1, 10.0, 65), 0.5, m)
    fine = commutation_defect(gaussian, make_grid(1, 10.0, 129), 0.5, m)
    assert math.isfinite(coarse) and 0.0 < fine < coarse


def test_exact_mollification_is_one_dimensional(gaussian):
    with pytest.raises(ValueError):
        exact_mollification(gaussian, np.zeros((3, 2)), Mollifier("gaussian", 0.5, 2))


@pytest.mark.slow
def test_mollified_commutation_converges():
    report = convergence_study("mollify_commutation", "gaussian", 0.5, [129, 257, 513], half_width=10.0)
    order = report.orders["mollify_commutation"]
    assert math.isfinite(order) and order > 0


@pytest.mark.slow
@pytest.mark.parametrize("suite_id", ["mollify", "laplacian", "sum_space", "decay", "wsp_od", "convergence"])
def test_identity_suites_pass_at_default_settings(suite_config, suite_id):
    report = run_suite(suite_id, suite_config(suite_id))
    assert report.verdict == "pass", [case.name for case in report.cases if case.verdict == "fail"]


@pytest.mark.slow
@pytest.mark.parametrize("suite_id", ["bb_l1", "sobolev", "holder", "poincare"])
def test_ratio_suites_match_committed_baselines(suite_config, suite_id):
    report = run_suite(suite_id, suite_config(suite_id, baseline_dir=str(BASELINE_DIR)))
    assert report.verdict == "pass", [case.name for case in report.cases if case.verdict == "fail"]
    for key in BASELINE_KEYS[suite_id]:
        assert _case(report, f"baseline/{key}").verdict == "pass"
    assert report.norm_rows
