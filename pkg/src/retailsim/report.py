"""Result tables and the ANOVA/Tukey analysis report.

The results CSV is the contract between the sweep runner and any external
analysis: comma-separated, header row, ``.`` decimal separator, LF line
endings, full-precision floats.  Display rounding to two decimals happens
only in the descriptives table.
"""

from __future__ import annotations

import csv
import io

from .errors import ConfigError, DegenerateVariance, TooFewGroups, UnbalancedGroups
from .experiments import OUTCOME_FIELDS, ReplicationResult, summarize
from .stats import GroupSamples, anova_oneway, corrected_alpha, effect_size_label, tukey_hsd

RESULT_COLUMNS = ["level", "replication", "seed"] + OUTCOME_FIELDS


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_to_csv(results: list[ReplicationResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for r in results:
        row = [_cell(r.level), r.replication, r.seed]
        row += [_cell(getattr(r.outcome, name)) for name in OUTCOME_FIELDS]
        writer.writerow(row)
    return buf.getvalue()


def write_results_csv(path: str, results: list[ReplicationResult]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(results_to_csv(results))


def read_results_csv(path: str) -> list[dict]:
    """Rows as {column: float-or-None}; 'level' is required."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "level" not in reader.fieldnames:
                raise ConfigError("results", f"{path} has no 'level' column")
            rows = []
            for raw in reader:
                row: dict = {}
                for key, text in raw.items():
                    if key is None:
                        raise ConfigError("results", f"{path} has ragged rows")
                    if text is None or text == "":
                        row[key] = None
                        continue
                    try:
                        row[key] = float(text)
                    except ValueError:
                        row[key] = text
                if row.get("level") is None or isinstance(row["level"], str):
                    raise ConfigError("results", f"{path} has a non-numeric level entry")
                rows.append(row)
    except OSError as exc:
        raise ConfigError("results", f"cannot read {path}: {exc}") from None
    if not rows:
        raise ConfigError("results", f"{path} contains no data rows")
    return rows


def descriptives_to_csv(results: list[ReplicationResult]) -> str:
    """Per-level mean/SD table, two decimals (display rounding only)."""
    table = summarize(results)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["level", "replications"]
    for name in OUTCOME_FIELDS:
        header += [f"{name}_mean", f"{name}_sd"]
    writer.writerow(header)
    for level in sorted(table):
        row: list = [f"{level:g}", max(n for _, _, n in table[level].values())]
        for name in OUTCOME_FIELDS:
            mean, sd, n = table[level][name]
            row += ["" if mean is None else f"{mean:.2f}", "" if sd is None else f"{sd:.2f}"]
        writer.writerow(row)
    return buf.getvalue()


def write_descriptives_csv(path: str, results: list[ReplicationResult]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(descriptives_to_csv(results))


def format_alpha(alpha: float) -> str:
    """Four decimals without the leading zero, e.g. .0167."""
    text = f"{alpha:.4f}"
    return text[1:] if text.startswith("0.") else text


def _fmt_level(level: float) -> str:
    return f"{level:g}"


def groups_from_rows(rows: list[dict], var: str) -> GroupSamples | None:
    """Collect per-level observations for one variable; None if untestable.

    Levels where every replication reported the variable absent make the
    variable untestable (there is no data to compare), mirroring how the
    promoted-everyone conditions leave normal-staff measures blank.
    """
    by_level: dict[float, list[float]] = {}
    for row in rows:
        if var not in row:
            raise ConfigError("dependent-vars", f"column {var!r} not in results file")
        by_level.setdefault(row["level"], []).append(row[var])
    labels = sorted(by_level)
    groups = []
    for level in labels:
        obs = [v for v in by_level[level] if v is not None]
        if not obs:
            return None
        groups.append(obs)
    return GroupSamples.from_lists([_fmt_level(lv) for lv in labels], groups)


def analysis_report(rows: list[dict], dependent_vars: list[str], family_alpha: float = 0.05) -> str:
    """The anova.txt body: one ANOVA per dependent variable plus post-hocs.

    Post-hoc Tukey comparisons run only where the ANOVA is significant at
    the family alpha, and are tested against the multiple-comparison
    corrected alpha (family alpha split across the dependent variables).
    """
    levels = sorted({row["level"] for row in rows})
    n_per_level = {lv: sum(1 for r in rows if r["level"] == lv) for lv in levels}
    alpha_c = corrected_alpha(family_alpha, len(dependent_vars))

    lines = []
    lines.append(f"One-way between-groups ANOVA across {len(levels)} levels")
    lines.append(
        "Levels: " + ", ".join(_fmt_level(lv) for lv in levels)
        + "; replications per level: "
        + ", ".join(str(n_per_level[lv]) for lv in levels)
    )
    lines.append(
        f"Corrected post-hoc alpha for {len(dependent_vars)} dependent variables "
        f"= {format_alpha(alpha_c)} (family alpha {format_alpha(family_alpha)})"
    )
    lines.append("")

    for var in dependent_vars:
        lines.append(f"== {var} ==")
        samples = groups_from_rows(rows, var)
        if samples is None:
            lines.append("not testable: variable absent for every replication at some level")
            lines.append("")
            continue
        try:
            res = anova_oneway(samples)
        except (TooFewGroups, DegenerateVariance) as exc:
            lines.append(f"not testable: {exc}")
            lines.append("")
            continue
        p_text = "p < .01" if res.p < 0.01 else f"p = {res.p:.4f}"
        lines.append(
            f"F({res.df_between}, {res.df_within}) = {res.f:.2f}, {p_text}, "
            f"eta^2 = {res.eta_squared:.2f} ({effect_size_label(res.eta_squared)})"
        )
        lines.append(
            "group means: "
            + ", ".join(
                f"{label}: {mean:.2f}" for label, mean in zip(samples.labels, res.group_means)
            )
        )
        if res.p >= family_alpha:
            lines.append(f"not significant at family alpha {format_alpha(family_alpha)}; no post-hoc")
            lines.append("")
            continue
        try:
            tk = tukey_hsd(samples, alpha_c)
        except (UnbalancedGroups, DegenerateVariance) as exc:
            lines.append(f"post-hoc skipped: {exc}")
            lines.append("")
            continue
        lines.append(
            f"Tukey HSD at corrected alpha {format_alpha(alpha_c)}: "
            f"q_crit({tk.k}, {tk.df_within}) = {tk.q_critical:.3f}"
        )
        for pair in tk.pairs:
            verdict = "significant" if pair.significant else "n.s."
            lines.append(
                f"  {pair.label_a} vs {pair.label_b}: mean diff = {pair.mean_diff:.2f}, "
                f"q = {pair.q:.2f}, {verdict}"
            )
        lines.append("")
    return "\n".join(lines)
