"""
Regression Suite
Fixed rational test functions with target triples for the theorem checks
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

from algebra.parse import parse_expr
from algebra.qcore import HahnParams
from algebra.ratfun import RatFun
from verification.checks import CheckReport, check_defect_sum, check_lodl, check_smt

INF = math.inf


@dataclass(frozen=True)
class SuiteCase:
    expr: str
    targets: Tuple[Any, ...]

    def function(self) -> RatFun:
        return parse_expr(self.expr)


REGRESSION_SUITE: Tuple[SuiteCase, ...] = (
    SuiteCase("z", (0, 1, INF)),
    SuiteCase("z^2", (0, 1, INF)),
    SuiteCase("z + 1/z", (2, -2, INF)),
    SuiteCase("1/(z-1)", (0, 1, INF)),
    SuiteCase("(z^2+1)/(z-2)", (0, 1, INF)),
    SuiteCase("z^3 - 2*z + 1", (0, 1, INF)),
    SuiteCase("(z-1)^2*(z+3)/((z+2)*z)", (0, 1, INF)),
    SuiteCase("2i*z - 1", (0, 1, INF)),
    SuiteCase("(z+1)^3", (0, 1, INF)),
    SuiteCase("1/z^2", (0, 1, INF)),
    SuiteCase("(z^2 - 1)/(z^2 + 4)", (0, 1, INF)),
    SuiteCase("z/(z^2 + z + 1)", (0, 1, INF)),
    SuiteCase("(2*z - 1)/(z + 0.5i)", (0, 1, INF)),
    SuiteCase("z^4 + 1", (0, 1, INF)),
    SuiteCase("(z^3 + 1)/(z - 0.5)", (0, 1, INF)),
    SuiteCase("0.5*z^2 + z + 1", (0, 1, INF)),
    SuiteCase("(z - 1)/(z + 1)^2", (0, 1, INF)),
    SuiteCase("z^2 + 1/z", (0, 1, INF)),
    SuiteCase("(1+i)*z^3 - z", (0, 1, INF)),
    SuiteCase("3/(z^2 - 2*z + 2)", (0, 1, INF)),
)


def run_suite(p: HahnParams, grid: Sequence[float], slack_fraction: float = 0.05,
              lodl_orders: Sequence[int] = (1, 2, 3),
              cases: Sequence[SuiteCase] = REGRESSION_SUITE) -> Dict[str, List[CheckReport]]:
    """SMT, LoDL and defect-relation reports for every suite case"""
    logger = logging.getLogger(__name__)
    reports: Dict[str, List[CheckReport]] = {}
    for case in cases:
        g = case.function()
        case_reports = [check_smt(g, case.targets, p, grid, slack_fraction)]
        case_reports.extend(check_lodl(g, p, k, grid) for k in lodl_orders)
        case_reports.append(check_defect_sum(g, case.targets, p, grid))
        failed = [report.name for report in case_reports if not report.passed]
        if failed:
            logger.warning(f"Suite case {case.expr!r} failed: {failed}")
        reports[case.expr] = case_reports
    return reports
