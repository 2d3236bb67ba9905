from verify.report import CaseRecord, VerificationReport
from verify.suite_config import SuiteConfig
from verify.base_suite import BaseSuite
from verify.baseline import load_baseline, save_baseline, compare_to_baseline
from verify.convergence import convergence_study, observed_order, richardson_limit
from verify.registry import (
    SUITES, SUITE_IDS, run_suite,
    suite_adjointness, suite_mollify, suite_laplacian, suite_bb_l1, suite_sobolev, suite_poincare,
    suite_holder, suite_wsp_od, suite_sum_space, suite_counterexample, suite_decay, suite_convergence,
)

__all__ = [
    "CaseRecord", "VerificationReport", "SuiteConfig", "BaseSuite",
    "load_baseline", "save_baseline", "compare_to_baseline",
    "convergence_study", "observed_order", "richardson_limit",
    "SUITES", "SUITE_IDS", "run_suite",
    "suite_adjointness", "suite_mollify", "suite_laplacian", "suite_bb_l1", "suite_sobolev", "suite_poincare",
    "suite_holder", "suite_wsp_od", "suite_sum_space", "suite_counterexample", "suite_decay",
    "suite_convergence",
]
