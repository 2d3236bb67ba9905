"""
FracBench主程序，计算离散分数阶算子和范数，运行验证套件并输出报告
"""
import asyncio
import io
import os
import sys
import argparse
import logging
import time
from typing import Dict, List, Optional, Union

import pandas as pd

from config import GRID_CONFIG, OUTPUT_CONFIG, ConfigError, default_output_dir, load_run_config
from fields.field import ScalarField, OffDiagonalField
from fields.grid import GridMismatchError, FracParams, Mollifier, make_grid
from fields.io import FieldFormatError, field_summary, od_to_csv, read_field_csv, scalar_to_csv, write_field_csv
from norms.lebesgue import ConvergenceError, NormResult, best_constant_shift, lp_od_norm
from norms.sobolev import gagliardo_seminorm, wspq_norm
from operators.gradient import frac_gradient, frac_divergence
from operators.laplacian import frac_laplacian_integral, frac_laplacian_spectral
from operators.mollify import mollify_scalar, mollify_od
from testlib.families import get_all_families, get_family_specs, get_preset, get_random_family, PRESETS
from testlib.od_functions import OdFnSpec, sample_od
from testlib.scalar_functions import sample_scalar
from utils import atomic_write_text, format_timestamp, list_report_files, load_report, print_report_summary
from verify.baseline import save_baseline
from verify.registry import SUITE_IDS, run_suite
from verify.report import NORM_COLUMNS, VerificationReport
from verify.suite_config import SuiteConfig

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

Field = Union[ScalarField, OffDiagonalField]


# 设置日志
def setup_logging():
    """配置日志系统"""
    log_dir = OUTPUT_CONFIG.get("log_dir", "logs")
    os.makedirs(log_dir, exist_ok=True)

    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    logging.basicConfig(
        level=logging.INFO if OUTPUT_CONFIG.get("debug", False) else logging.WARNING,
        format=log_format,
        handlers=[
            logging.FileHandler(f"{log_dir}/fracbench_{int(time.time())}.log", encoding="utf-8"),
            logging.StreamHandler()
        ]
    )
    return logging.getLogger("fracbench")


def load_field(args) -> Field:
    """
    从 --input 文件或 --spec 预设得到输入场

    Args:
        args: 命令行参数

    Returns:
        标量场或非对角场
    """
    if args.input:
        return read_field_csv(args.input)
    if not args.spec:
        raise ValueError("需要 --input 或 --spec")
    dim = args.n
    half_width = args.L if args.L is not None else (
        GRID_CONFIG["half_width"] if dim == 1 else GRID_CONFIG["dim2_half_width"])
    points = args.N if args.N is not None else (
        GRID_CONFIG["points_per_axis"] if dim == 1 else GRID_CONFIG["dim2_points_per_axis"])
    grid = make_grid(dim, half_width, points)
    spec = get_preset(args.spec)
    if isinstance(spec, OdFnSpec):
        return sample_od(spec, grid)
    return sample_scalar(spec, grid)


def _require(field: Field, kind: type, command: str) -> None:
    if not isinstance(field, kind):
        expected = "非对角场" if kind is OffDiagonalField else "标量场"
        raise ValueError(f"{command} 的输入必须是{expected}")


def apply_operator(command: str, field: Field, args) -> Field:
    """
    对输入场执行子命令对应的算子

    Args:
        command: gradient, divergence, laplacian 或 mollify
        field: 输入场
        args: 命令行参数

    Returns:
        输出场
    """
    if command == "gradient":
        _require(field, ScalarField, command)
        return frac_gradient(field, args.s)
    if command == "divergence":
        _require(field, OffDiagonalField, command)
        return frac_divergence(field, args.s)
    if command == "laplacian":
        _require(field, ScalarField, command)
        if args.method == "spectral":
            return frac_laplacian_spectral(field, args.s)
        return frac_laplacian_integral(field, args.s)
    if command == "mollify":
        m = Mollifier(args.kernel, args.epsilon, field.grid.dim)
        if isinstance(field, OffDiagonalField):
            return mollify_od(field, m)
        return mollify_scalar(field, m)
    raise ValueError(f"未知的子命令: {command}")


def emit_field(field: Field, output: Optional[str], logger: logging.Logger) -> None:
    """写出场文件并打印摘要；没有 --output 时CSV写到标准输出，摘要写到标准错误"""
    lo, hi = field_summary(field)
    summary = f"{type(field).__name__} n={field.grid.dim} N={field.grid.points_per_axis} min={lo:.17g} max={hi:.17g}"
    if isinstance(field, OffDiagonalField):
        summary += f" L1_od={lp_od_norm(field, 1.0):.17g}"
    if output:
        write_field_csv(field, output)
        logger.info(f"场已写入: {output}")
        print(summary)
    else:
        sys.stdout.write(od_to_csv(field) if isinstance(field, OffDiagonalField) else scalar_to_csv(field))
        print(summary, file=sys.stderr)


def parse_norm_params(entries: List[str], dim: int = 1) -> List[FracParams]:
    """解析 "s:p" 或 "s:p:q" 形式的指数"""
    params = []
    for entry in entries:
        parts = entry.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"--params 需要 s:p 或 s:p:q 形式，得到 {entry}")
        try:
            numbers = [float(x) for x in parts]
        except ValueError:
            raise ValueError(f"--params 中含有非数字 {entry}")
        params.append(FracParams(numbers[0], numbers[1], numbers[2] if len(numbers) == 3 else None, dim))
    return params


def compute_norms(field: Field, params: List[FracParams]) -> List[NormResult]:
    """
    按输入顺序计算每组指数的范数

    标量场每组输出 Gagliardo 半范；给定 q 时再输出 Ẇ^{s,(p,q)} 范数和 ‖u − c*‖_{L^q}。
    非对角场每组输出 L^p_od 范数。
    """
    results = []
    for item in params:
        if isinstance(field, OffDiagonalField):
            results.append(NormResult(lp_od_norm(field, item.p), "lp_od", field.grid, item))
            continue
        results.append(NormResult(gagliardo_seminorm(field, item.s, item.p), "gagliardo", field.grid, item))
        if item.q is not None:
            results.append(NormResult(wspq_norm(field, item.s, item.p, item.q), "wspq", field.grid, item))
            results.append(NormResult(best_constant_shift(field, item.q)[1], "shift_lq", field.grid, item))
    return results


def norms_to_csv(results: List[NormResult]) -> str:
    buffer = io.StringIO()
    pd.DataFrame([r.to_row() for r in results], columns=NORM_COLUMNS).to_csv(
        buffer, index=False, float_format="%.17g", lineterminator="\n")
    return buffer.getvalue()


async def run_suites(configs: Dict[str, SuiteConfig], logger: logging.Logger) -> List[VerificationReport]:
    """
    并发运行套件

    Args:
        configs: 套件ID到套件配置的映射
        logger: 日志器

    Returns:
        与 configs 顺序一致的报告列表
    """
    logger.info(f"运行 {len(configs)} 个套件: {', '.join(configs)}")
    tasks = [asyncio.to_thread(run_suite, suite_id, cfg) for suite_id, cfg in configs.items()]
    return list(await asyncio.gather(*tasks))


def save_report(report: VerificationReport, output_dir: str, formats: List[str],
                stable_names: bool, logger: logging.Logger) -> List[str]:
    """
    原子地写出报告文件

    Args:
        report: 验证报告
        output_dir: 输出目录
        formats: 输出格式
        stable_names: True 时文件名不带时间戳
        logger: 日志器

    Returns:
        写出的路径
    """
    stem = report.suite_id if stable_names else f"{report.suite_id}_{format_timestamp(time.time())}"
    paths = []
    if "json" in formats:
        path = os.path.join(output_dir, f"{stem}.json")
        atomic_write_text(path, report.to_json())
        paths.append(path)
    if "csv" in formats:
        path = os.path.join(output_dir, f"{stem}_cases.csv")
        atomic_write_text(path, report.cases_csv())
        paths.append(path)
        if report.norm_rows:
            path = os.path.join(output_dir, f"{stem}_norms.csv")
            atomic_write_text(path, report.norms_csv())
            paths.append(path)
    for path in paths:
        logger.info(f"报告已保存到: {path}")
    return paths


def cmd_op(args, logger: logging.Logger) -> int:
    field = load_field(args)
    emit_field(apply_operator(args.command, field, args), args.output, logger)
    return EXIT_PASS


def cmd_norms(args, logger: logging.Logger) -> int:
    field = load_field(args)
    results = compute_norms(field, parse_norm_params(args.params, field.grid.dim))
    text = norms_to_csv(results)
    if args.output:
        atomic_write_text(args.output, text)
        logger.info(f"范数已写入: {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def cmd_verify(args, logger: logging.Logger) -> int:
    run_config = load_run_config(args.config, args.output_dir)
    suite_ids = SUITE_IDS if args.suite == "all" else [args.suite]
    configs = {suite_id: SuiteConfig.from_run_config(run_config, suite_id) for suite_id in suite_ids}
    if args.no_progress:
        OUTPUT_CONFIG["progress"] = False

    reports = asyncio.run(run_suites(configs, logger))

    failed = []
    for report in reports:
        save_report(report, run_config.output_dir, run_config.formats, args.stable_names, logger)
        if args.write_baseline:
            save_baseline(run_config.baseline_dir, report)
        print_report_summary(report.to_dict())
        if report.failed:
            failed.append(report.suite_id)

    if failed:
        print(f"\n失败的套件: {', '.join(failed)}")
        return EXIT_FAILURE
    print(f"\n全部 {len(reports)} 个套件通过")
    return EXIT_PASS


def cmd_reports(args) -> int:
    """列出已保存的报告，最新的在前，并打印摘要"""
    results_dir = args.dir or default_output_dir()
    files = list_report_files(results_dir)
    if not files:
        print(f"{results_dir} 中没有报告文件")
        return EXIT_PASS
    for path in files[:args.latest]:
        print(f"\n{path}")
        print_report_summary(load_report(path))
    return EXIT_PASS


def cmd_list_families(args) -> int:
    if args.random is not None:
        family = get_random_family(args.random)
        print(f"种子 {args.random} 选中函数族: {family['id']} ({family['title']})")
        for spec in get_family_specs(family["id"]):
            print(f"  {spec!r}")
        return EXIT_PASS

    print("可用函数族:")
    for family in get_all_families():
        print(f"ID: {family['id']}, 标题: {family['title']}, 类型: {family['field']}, "
              f"成员数: {family['size']}")
    print("\n可用预设函数: " + ", ".join(sorted(PRESETS)))
    return EXIT_PASS


def _add_field_options(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--spec", type=str, choices=sorted(PRESETS), help="预设函数")
    source.add_argument("--input", type=str, help="输入场CSV文件")
    parser.add_argument("--n", type=int, default=1, choices=[1, 2], help="与 --spec 一起使用的空间维数")
    parser.add_argument("--L", type=float, help="与 --spec 一起使用的网格半宽")
    parser.add_argument("--N", type=int, help="与 --spec 一起使用的每轴节点数")
    parser.add_argument("--output", type=str, help="输出文件，缺省时写到标准输出")


def build_parser() -> argparse.ArgumentParser:
    """构建命令行解析器"""
    parser = argparse.ArgumentParser(prog="fracbench", description="FracBench - 离散分数阶微积分与数值验证")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("gradient", "分数梯度 d_s u"), ("divergence", "分数散度 div_s G"),
                       ("laplacian", "分数拉普拉斯 div_s d_s u")):
        p = sub.add_parser(name, help=text)
        _add_field_options(p)
        p.add_argument("--s", type=float, required=True, help="阶数")
        if name == "laplacian":
            p.add_argument("--method", choices=["integral", "spectral"], default="integral",
                           help="奇异积分或傅里叶乘子")

    p = sub.add_parser("mollify", help="磨光")
    _add_field_options(p)
    p.add_argument("--epsilon", type=float, required=True, help="磨光尺度")
    p.add_argument("--kernel", choices=["gaussian", "bump"], default="gaussian", help="磨光核形状")

    p = sub.add_parser("norms", help="范数和泛函")
    _add_field_options(p)
    p.add_argument("--params", type=str, nargs="+", required=True, help="指数组 s:p 或 s:p:q")

    p = sub.add_parser("verify", help="运行验证套件")
    p.add_argument("suite", choices=SUITE_IDS + ["all"], help="套件ID或 all")
    p.add_argument("--config", type=str, help="配置文件")
    p.add_argument("--output-dir", type=str, help="报告输出目录")
    p.add_argument("--write-baseline", action="store_true", help="把拟合常数写入基线文件")
    p.add_argument("--stable-names", action="store_true", help="报告文件名不带时间戳")
    p.add_argument("--no-progress", action="store_true", help="不显示进度条")

    p = sub.add_parser("reports", help="列出已保存的验证报告")
    p.add_argument("--dir", type=str, help="报告目录，默认与 verify 的输出目录相同")
    p.add_argument("--latest", type=int, default=5, help="显示最新的几个报告")

    p = sub.add_parser("list-families", help="列出所有函数族和预设函数")
    p.add_argument("--random", type=int, metavar="SEED", help="用给定种子随机选一个函数族并列出成员")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    主程序

    Args:
        argv: 命令行参数，默认取 sys.argv

    Returns:
        退出码：0 通过，1 验证失败，2 用法或配置错误
    """
    args = build_parser().parse_args(argv)
    logger = setup_logging()

    try:
        if args.command == "list-families":
            return cmd_list_families(args)
        if args.command == "verify":
            return cmd_verify(args, logger)
        if args.command == "reports":
            return cmd_reports(args)

        if args.command == "norms":
            return cmd_norms(args, logger)
        return cmd_op(args, logger)
    except FieldFormatError as e:
        logger.error(f"输入文件格式错误: {e}")
        return EXIT_USAGE
    except ConfigError as e:
        logger.error(f"配置错误: {e}")
        return EXIT_USAGE
    except (GridMismatchError, ValueError, KeyError) as e:
        logger.error(f"参数错误: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"文件读写失败: {e}")
        return EXIT_USAGE
    except ConvergenceError as e:
        logger.error(f"计算失败: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
