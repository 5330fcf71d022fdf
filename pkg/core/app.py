"""
Main Application Controller
Coordinates parsing, operators, tables and theorem checks under one run configuration
"""

import contextlib
import logging
from typing import Any, Dict, Iterator, List, Sequence

from algebra.cpoly import cluster_tolerance
from algebra.parse import format_expr, parse_complex, parse_expr
from algebra.ratfun import RatFun
from core.config_manager import RunConfig
from core.errors import InvalidArgumentError
from operators.hahn import hahn_expand, hahn_iter
from operators.heq import (
    coefficient_decay,
    convergence_radius,
    default_residual_points,
    heq_residual,
    heq_solve,
)
from processing.pipeline import NevanlinnaPipeline, NevTable
from verification.checks import (
    CheckReport,
    check_defect_sum,
    check_fermat,
    check_lodl,
    check_picard,
    check_smt,
    compare_sharing,
)


def parse_targets(text: str) -> List[Any]:
    """Comma-separated target values; 'inf' denotes ∞"""
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise InvalidArgumentError("parse_targets", "at least one target required")
    return [parse_complex(item) for item in items]


class HahnLabApplication:
    """Main application controller"""

    def __init__(self, config: RunConfig):
        self.logger = logging.getLogger(__name__)
        self.config = config
        self.logger.info(f"Initialized with q={config.q}, c={config.c}, "
                         f"grid {config.r_min:g}..{config.r_max:g} ({config.grid_points} points)")

    @contextlib.contextmanager
    def session(self) -> Iterator[RunConfig]:
        """Apply the run's cluster tolerance to every operation inside"""
        with cluster_tolerance(self.config.cluster_tol):
            yield self.config

    def _echo(self) -> Dict[str, Any]:
        return self.config.to_dict()

    # Operator methods

    def diff(self, expr: str, k: int = 1, expanded: bool = False, precision: int = 15) -> str:
        """D^k g rendered canonically"""
        with self.session():
            g = parse_expr(expr)
            p = self.config.params
            result = hahn_expand(g, k, p) if expanded else hahn_iter(g, k, p)
            return format_expr(result, precision)

    def table(self, expr: str, targets: Sequence[Any]) -> NevTable:
        """NevTable over the configured grid"""
        with self.session():
            g = parse_expr(expr)
            pipeline = NevanlinnaPipeline(
                g, self.config.params, targets,
                n_theta=self.config.theta_samples,
                quad_tol=self.config.quad_tol,
                slack_fraction=self.config.slack_fraction,
            )
            pipeline.add_standard_processors()
            return pipeline.run(self.config.grid(), self.config.workers)

    # Theorem checks

    def verify_smt(self, expr: str, targets: Sequence[Any]) -> CheckReport:
        with self.session():
            self.config.params.require_theorem("verify smt")
            return check_smt(parse_expr(expr), targets, self.config.params, self.config.grid(),
                             self.config.slack_fraction, n_theta=self.config.theta_samples,
                             quad_tol=self.config.quad_tol, workers=self.config.workers,
                             config=self._echo())

    def verify_lodl(self, expr: str, k: int) -> CheckReport:
        with self.session():
            return check_lodl(parse_expr(expr), self.config.params, k, self.config.grid(),
                              self.config.theta_samples, self.config.quad_tol, config=self._echo())

    def verify_defects(self, expr: str, targets: Sequence[Any]) -> CheckReport:
        with self.session():
            self.config.params.require_theorem("verify defects")
            return check_defect_sum(parse_expr(expr), targets, self.config.params, self.config.grid(),
                                    self.config.theta_samples, self.config.quad_tol, config=self._echo())

    def verify_picard(self, expr: str, targets: Sequence[Any]) -> CheckReport:
        with self.session():
            self.config.params.require_theorem("verify picard")
            return check_picard(parse_expr(expr), targets, self.config.params, self.config.grid(),
                                config=self._echo())

    def verify_share(self, expr: str, other: str, targets: Sequence[Any], bound: int = 0) -> CheckReport:
        with self.session():
            self.config.params.require_theorem("verify share")
            return compare_sharing(parse_expr(expr), parse_expr(other), targets, self.config.params,
                                   self.config.grid(), bound, config=self._echo())

    def verify_fermat(self, expr: str) -> CheckReport:
        with self.session():
            self.config.params.require_theorem("verify fermat")
            return check_fermat(parse_expr(expr), self.config.params, config=self._echo())

    # Difference equations

    def solve_heq(self, coeff_exprs: Sequence[str], init: Sequence[complex], order: int) -> Dict[str, Any]:
        """
        Series solution with residual and growth diagnostics

        Args:
            coeff_exprs: Function literals of A_0..A_{k−1}
            init: Initial coefficients a_0..a_{k−1}
            order: Truncation order N

        Returns:
            Dictionary ready for JSON serialization
        """
        with self.session():
            p = self.config.params
            coefficients: List[RatFun] = [parse_expr(text) for text in coeff_exprs]
            series = heq_solve(coefficients, list(init), order, p)
            points = default_residual_points(series, p)
            residuals = heq_residual(coefficients, series, points, p)
            radius = convergence_radius(series)
            self.logger.info(f"Solved order-{len(coefficients)} equation to truncation {series.trunc}")
            return {
                "center": series.center,
                "trunc": series.trunc,
                "coeffs": list(series.coeffs),
                "convergence_radius": radius,
                "residual_points": points,
                "residuals": residuals,
                "max_abs_residual": max(abs(value) for value in residuals),
                "coefficient_decay": [
                    {"n": n, "abs": size, "ratio": ratio} for n, size, ratio in coefficient_decay(series)
                ],
                "config": self._echo(),
            }

