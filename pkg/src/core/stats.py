"""
One-way ANOVA and t-tests over per-ballot accuracy samples
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy import stats as sps

from .errors import StatisticsError

logger = logging.getLogger(__name__)

# Variance below this fraction of the centered spread counts as zero
REL_TOL = 1e-12


@dataclass(frozen=True)
class SampleGroup:
    label: str
    values: Sequence[float]

    def __post_init__(self):
        if len(self.values) == 0:
            raise StatisticsError(f"sample group '{self.label}' is empty")


class AnovaResult(NamedTuple):
    f_statistic: float
    df_between: int
    df_within: int
    p_value: float


class TTestResult(NamedTuple):
    t_statistic: float
    df: float
    p_value: float


GroupLike = Union[SampleGroup, Sequence[float]]


def _as_array(group: GroupLike) -> np.ndarray:
    values = group.values if isinstance(group, SampleGroup) else group
    return np.asarray(values, dtype=float)


def _is_zero(variance: float, magnitude: float) -> bool:
    return variance <= REL_TOL * max(magnitude, np.finfo(float).tiny)


def _constant(values: np.ndarray) -> bool:
    return bool(np.ptp(values) == 0)


def one_way_anova(groups: Sequence[GroupLike]) -> AnovaResult:
    """F = (SSB / (k - 1)) / (SSW / (N - k))"""
    arrays = [_as_array(g) for g in groups]
    if len(arrays) < 2:
        raise StatisticsError(f"ANOVA needs at least 2 groups, got {len(arrays)}")
    if any(len(a) < 2 for a in arrays):
        raise StatisticsError("ANOVA needs at least 2 values in every group")

    pooled = np.concatenate(arrays)
    grand_mean = pooled.mean()
    ss_between = float(sum(len(a) * (a.mean() - grand_mean) ** 2 for a in arrays))
    ss_within = float(sum(np.sum((a - a.mean()) ** 2) for a in arrays))
    df_between = len(arrays) - 1
    df_within = len(pooled) - len(arrays)

    if all(_constant(a) for a in arrays) or _is_zero(ss_within, ss_between + ss_within):
        raise StatisticsError("degenerate F: no within-group variance")

    f_statistic = (ss_between / df_between) / (ss_within / df_within)
    p_value = float(sps.f.sf(f_statistic, df_between, df_within))
    logger.debug(f"ANOVA: F({df_between},{df_within}) = {f_statistic:.4f}, p = {p_value:.3g}")
    return AnovaResult(f_statistic, df_between, df_within, p_value)


def _two_sided(t_statistic: float, df: float) -> float:
    return float(2.0 * sps.t.sf(abs(t_statistic), df))


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """t on the pairwise differences a - b with n - 1 degrees of freedom"""
    x, y = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if len(x) != len(y):
        raise StatisticsError(f"paired samples differ in length ({len(x)} vs {len(y)})")
    if len(x) < 2:
        raise StatisticsError("paired t-test needs at least 2 pairs")

    diff = x - y
    mean = diff.mean()
    variance = diff.var(ddof=1)
    if _constant(diff) or _is_zero(variance, float(x.var(ddof=1) + y.var(ddof=1))):
        raise StatisticsError("paired differences have zero variance")

    t_statistic = float(mean / np.sqrt(variance / len(diff)))
    df = len(diff) - 1
    return TTestResult(t_statistic, df, _two_sided(t_statistic, df))


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Independent samples, unequal variances; Welch-Satterthwaite df"""
    x, y = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if len(x) < 2 or len(y) < 2:
        raise StatisticsError("Welch t-test needs at least 2 values per sample")

    vx = x.var(ddof=1) / len(x)
    vy = y.var(ddof=1) / len(y)
    se2 = vx + vy
    if (_constant(x) and _constant(y)) or _is_zero(se2, float(np.concatenate([x, y]).var())):
        raise StatisticsError("both samples have zero variance")

    t_statistic = float((x.mean() - y.mean()) / np.sqrt(se2))
    df = float(se2 ** 2 / (vx ** 2 / (len(x) - 1) + vy ** 2 / (len(y) - 1)))
    return TTestResult(t_statistic, df, _two_sided(t_statistic, df))
