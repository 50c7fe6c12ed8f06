"""One-way ANOVA, eta squared, and Tukey HSD post-hoc analysis.

Balanced designs only: the sweep runner always produces k levels x n
replications, and unbalanced input is rejected rather than silently
falling back to an approximate variant.  Internal computation is full
precision; any two-decimal rounding happens at display time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadDf, DegenerateVariance, TooFewGroups, UnbalancedGroups
from .special import f_sf, studentized_range_ppf


@dataclass(frozen=True)
class GroupSamples:
    """Ordered observation groups, one per factor level."""

    labels: tuple
    groups: tuple[tuple[float, ...], ...]

    @classmethod
    def from_lists(cls, labels, groups) -> "GroupSamples":
        return cls(tuple(labels), tuple(tuple(float(x) for x in g) for g in groups))

    def validate(self) -> None:
        if len(self.groups) < 2:
            raise TooFewGroups(f"need >= 2 groups, got {len(self.groups)}")
        if len(self.labels) != len(self.groups):
            raise TooFewGroups("labels and groups differ in length")
        for label, g in zip(self.labels, self.groups):
            if len(g) < 2:
                raise TooFewGroups(f"group {label!r} has {len(g)} observation(s), need >= 2")

    def require_balanced(self) -> int:
        sizes = {len(g) for g in self.groups}
        if len(sizes) != 1:
            raise UnbalancedGroups(f"group sizes differ: {sorted(len(g) for g in self.groups)}")
        return sizes.pop()


@dataclass(frozen=True)
class AnovaResult:
    f: float
    df_between: int
    df_within: int
    p: float
    eta_squared: float
    ss_between: float
    ss_within: float
    ss_total: float
    group_means: tuple[float, ...]
    n_total: int


@dataclass(frozen=True)
class TukeyPair:
    label_a: object
    label_b: object
    mean_diff: float
    q: float
    significant: bool


@dataclass(frozen=True)
class TukeyResult:
    corrected_alpha: float
    q_critical: float
    k: int
    df_within: int
    pairs: tuple[TukeyPair, ...] = field(default_factory=tuple)


def anova_oneway(g: GroupSamples) -> AnovaResult:
    """One-way between-groups ANOVA with eta squared effect size."""
    g.validate()
    arrays = [np.asarray(grp, dtype=float) for grp in g.groups]
    all_obs = np.concatenate(arrays)
    grand = all_obs.mean()
    ss_between = float(sum(len(a) * (a.mean() - grand) ** 2 for a in arrays))
    ss_within = float(sum(((a - a.mean()) ** 2).sum() for a in arrays))
    ss_total = float(((all_obs - grand) ** 2).sum())
    k = len(arrays)
    n_total = len(all_obs)
    df_between = k - 1
    df_within = n_total - k
    if ss_within == 0.0:
        raise DegenerateVariance("zero within-group variance")
    f = (ss_between / df_between) / (ss_within / df_within)
    p = f_upper_tail(f, df_between, df_within)
    eta_squared = ss_between / ss_total if ss_total > 0 else 0.0
    return AnovaResult(
        f=f,
        df_between=df_between,
        df_within=df_within,
        p=p,
        eta_squared=eta_squared,
        ss_between=ss_between,
        ss_within=ss_within,
        ss_total=ss_total,
        group_means=tuple(float(a.mean()) for a in arrays),
        n_total=n_total,
    )


def f_upper_tail(f: float, df1: int, df2: int) -> float:
    """P(F(df1, df2) > f), accurate to ~1e-12 absolute."""
    if df1 < 1 or df2 < 1 or int(df1) != df1 or int(df2) != df2:
        raise BadDf(f"degrees of freedom must be integers >= 1, got ({df1}, {df2})")
    if f < 0:
        raise BadDf(f"F statistic must be >= 0, got {f}")
    return f_sf(float(f), int(df1), int(df2))


def tukey_hsd(g: GroupSamples, corrected_alpha: float) -> TukeyResult:
    """All-pairs Tukey HSD on balanced groups at a corrected alpha.

    q_ab = |mean_a - mean_b| / sqrt(MSW / n); a pair is significant when q
    exceeds the studentized-range upper quantile at (k, df_within).
    """
    g.validate()
    n = g.require_balanced()
    arrays = [np.asarray(grp, dtype=float) for grp in g.groups]
    k = len(arrays)
    df_within = k * (n - 1)
    ss_within = float(sum(((a - a.mean()) ** 2).sum() for a in arrays))
    if ss_within == 0.0:
        raise DegenerateVariance("zero within-group variance")
    msw = ss_within / df_within
    se = (msw / n) ** 0.5
    q_crit = studentized_range_ppf(1.0 - corrected_alpha, k, df_within)
    means = [float(a.mean()) for a in arrays]
    pairs = []
    for i in range(k):
        for j in range(i + 1, k):
            diff = means[i] - means[j]
            q = abs(diff) / se
            pairs.append(
                TukeyPair(
                    label_a=g.labels[i],
                    label_b=g.labels[j],
                    mean_diff=diff,
                    q=q,
                    significant=bool(q > q_crit),
                )
            )
    return TukeyResult(
        corrected_alpha=corrected_alpha,
        q_critical=q_crit,
        k=k,
        df_within=df_within,
        pairs=tuple(pairs),
    )


def corrected_alpha(family_alpha: float, n_dependent_vars: int) -> float:
    """Divide the family alpha across dependent variables (e.g. 0.05/3)."""
    if not 0.0 < family_alpha < 1.0:
        raise ValueError(f"family alpha must be in (0, 1), got {family_alpha}")
    if n_dependent_vars < 1:
        raise ValueError(f"need >= 1 dependent variable, got {n_dependent_vars}")
    return family_alpha / n_dependent_vars


def effect_size_label(eta2: float) -> str:
    """Conventional eta-squared cutpoints: >=0.14 large, >=0.06 medium."""
    if not 0.0 <= eta2 <= 1.0:
        raise ValueError(f"eta squared must be in [0, 1], got {eta2}")
    if eta2 >= 0.14:
        return "large"
    if eta2 >= 0.06:
        return "medium"
    return "small"
