"""
Nevanlinna Table Pipeline
Per-radius row evaluation through a configurable chain of column processors
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd

from algebra.qcore import HahnParams
from algebra.ratfun import RatFun
from processing.nevan import NevanlinnaProfile, format_target


@dataclass
class TableRow:
    """Container for one radius of a NevTable"""
    r: float
    nudged: bool
    values: Dict[str, float] = field(default_factory=dict)


@dataclass
class NevTable:
    """Rows of m/N/T, per-target N and N̂, N_qc and SMT slack, ordered by r"""
    params: HahnParams
    targets: List[Any]
    rows: List[TableRow]
    slack_fraction: float = 0.05

    def columns(self) -> List[str]:
        names = ["r", "m", "N", "T"]
        for a in self.targets:
            label = format_target(a)
            names += [f"N:{label}", f"Nhat:{label}"]
        return names + ["Nqc", "slack"]

    def column(self, name: str) -> List[float]:
        if name == "r":
            return [row.r for row in self.rows]
        return [row.values[name] for row in self.rows]

    def validate(self, tol: float = 1e-6) -> bool:
        """Check r strictly increasing and T nondecreasing; shortfalls are logged"""
        logger = logging.getLogger(__name__)
        ok = True
        for previous, current in zip(self.rows, self.rows[1:]):
            if current.r <= previous.r:
                logger.warning(f"Radius grid not increasing at r = {current.r}")
                ok = False
            if current.values["T"] < previous.values["T"] - tol:
                logger.warning(f"T decreases between r = {previous.r:.6g} and r = {current.r:.6g}")
                ok = False
        return ok

    def to_records(self) -> List[Dict[str, float]]:
        records = []
        for row in self.rows:
            record = {"r": row.r}
            record.update({name: row.values[name] for name in self.columns()[1:]})
            records.append(record)
        return records

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(self.to_records(), columns=self.columns())


Processor = Callable[[NevanlinnaProfile, float, Dict[str, float]], Dict[str, float]]


class NevanlinnaPipeline:
    """Configurable row pipeline over a radius grid"""

    def __init__(self, g: RatFun, params: HahnParams, targets: Sequence[Any],
                 n_theta: int = 256, quad_tol: float = 1e-12, slack_fraction: float = 0.05):
        """
        Initialize row pipeline

        Args:
            g: Function under study
            params: Hahn parameters for the reduced counting columns
            targets: Values a (math.inf for ∞)
            n_theta: Quadrature base panels
            quad_tol: Crossing tolerance of the quadrature
            slack_fraction: Allowance standing in for o(T)
        """
        self.logger = logging.getLogger(__name__)
        self.params = params
        self.targets = list(targets)
        self.slack_fraction = slack_fraction
        self.profile = NevanlinnaProfile(g, params, n_theta, quad_tol)
        self.processors: List[Processor] = []

    def add_processor(self, processor: Processor):
        """Add column processor to pipeline"""
        self.processors.append(processor)
        self.logger.info(f"Added processor: {processor.__name__}")

    def add_standard_processors(self):
        for processor in (characteristic_columns, target_columns, hahn_columns, smt_slack_column):
            self.add_processor(processor)

    def process(self, r: float) -> TableRow:
        """
        Evaluate one row

        Args:
            r: Requested radius; the row records the nudged radius actually used

        Returns:
            TableRow with every processor's columns
        """
        radius, nudged = self.profile.nudge(r, self.targets)
        values: Dict[str, float] = {}
        context = {"targets": self.targets, "slack_fraction": self.slack_fraction}
        for processor in self.processors:
            try:
                values.update(processor(self.profile, radius, {**context, **values}))
            except Exception as e:
                self.logger.error(f"Processor {processor.__name__} failed at r = {radius:.6g}: {e}")
                raise
        return TableRow(r=radius, nudged=nudged, values=values)

    def run(self, grid: Sequence[float], workers: int = 1) -> NevTable:
        """Evaluate all rows (optionally in parallel) and assemble them ordered by r"""
        radii = sorted(grid)
        if workers > 1:
            self._warm_caches()
            with ThreadPoolExecutor(max_workers=workers) as executor:
                rows = list(executor.map(self.process, radii))
        else:
            rows = [self.process(r) for r in radii]
        rows.sort(key=lambda row: row.r)
        table = NevTable(self.params, self.targets, rows, self.slack_fraction)
        table.validate()
        self.logger.info(f"Built table with {len(rows)} rows and {len(self.targets)} target(s)")
        return table

    def _warm_caches(self):
        # populate lazily computed root data before threads share the profile
        self.profile.factors(math.inf)
        for a in self.targets:
            self.profile.factors(a)
            self.profile.reduced_points(a)
        self.profile.derivative.zeros


# Standard Column Processors

def characteristic_columns(profile: NevanlinnaProfile, r: float, context: Dict) -> Dict[str, float]:
    """m(r,g), N(r,g) and T(r,g)"""
    m = profile.m(r)
    N = profile.N(r)
    return {"m": m, "N": N, "T": m + N}


def target_columns(profile: NevanlinnaProfile, r: float, context: Dict) -> Dict[str, float]:
    """N(r, g = a) per target"""
    return {f"N:{format_target(a)}": profile.N(r, a) for a in context["targets"]}


def hahn_columns(profile: NevanlinnaProfile, r: float, context: Dict) -> Dict[str, float]:
    """N̂_{q,c}(r, g = a) per target and N_{q,c}(r)"""
    features = {f"Nhat:{format_target(a)}": profile.Nhat(r, a) for a in context["targets"]}
    features["Nqc"] = profile.Nqc(r)
    return features


def smt_slack_column(profile: NevanlinnaProfile, r: float, context: Dict) -> Dict[str, float]:
    """Σ N̂ + slack_fraction·T − (l − 2)·T"""
    targets = context["targets"]
    T = context["T"]
    total = sum(context[f"Nhat:{format_target(a)}"] for a in targets)
    return {"slack": total + context["slack_fraction"] * T - (len(targets) - 2) * T}
