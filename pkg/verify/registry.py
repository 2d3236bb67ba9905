"""
套件注册表和按ID运行套件的入口
"""
from typing import Callable, Dict, Type, Union

from config import RunConfig
from verify.base_suite import BaseSuite
from verify.convergence import ConvergenceSuite
from verify.dual_suites import WspOdSuite, CounterexampleSuite
from verify.identity_suites import AdjointnessSuite, MollifySuite, LaplacianSuite, DecaySuite
from verify.inequality_suites import BbL1Suite, SobolevSuite, PoincareSuite, HolderSuite, SumSpaceSuite
from verify.report import VerificationReport
from verify.suite_config import SuiteConfig

SUITES: Dict[str, Type[BaseSuite]] = {
    cls.suite_id: cls for cls in (
        AdjointnessSuite, MollifySuite, LaplacianSuite, BbL1Suite, SobolevSuite, PoincareSuite,
        HolderSuite, WspOdSuite, SumSpaceSuite, CounterexampleSuite, DecaySuite, ConvergenceSuite,
    )
}

# verify all 的运行顺序
SUITE_IDS = list(SUITES)


def _runner(suite_id: str) -> Callable[[SuiteConfig], VerificationReport]:
    def run(cfg: SuiteConfig) -> VerificationReport:
        return SUITES[suite_id](cfg).run()

    run.__name__ = f"suite_{suite_id}"
    run.__doc__ = SUITES[suite_id].__doc__
    return run


suite_adjointness = _runner("adjointness")
suite_mollify = _runner("mollify")
suite_laplacian = _runner("laplacian")
suite_bb_l1 = _runner("bb_l1")
suite_sobolev = _runner("sobolev")
suite_poincare = _runner("poincare")
suite_holder = _runner("holder")
suite_wsp_od = _runner("wsp_od")
suite_sum_space = _runner("sum_space")
suite_counterexample = _runner("counterexample")
suite_decay = _runner("decay")
suite_convergence = _runner("convergence")


def run_suite(suite_id: str, config: Union[RunConfig, SuiteConfig]) -> VerificationReport:
    """
    按ID运行一个套件

    Args:
        suite_id: 套件ID
        config: 运行配置，或已经解析好的套件配置

    Returns:
        验证报告
    """
    if suite_id not in SUITES:
        raise KeyError(f"不存在的套件: {suite_id}，可选 {', '.join(SUITE_IDS)}")
    cfg = config if isinstance(config, SuiteConfig) else SuiteConfig.from_run_config(config, suite_id)
    return SUITES[suite_id](cfg).run()
