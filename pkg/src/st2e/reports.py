"""Report assembly: ranked variable tables and benchmark summaries.

JSON reports share one envelope with top-level keys ``report_version``,
``config``, ``variables`` and ``diagnostics``; the exact field names are
pinned in ``data/selection_report.schema.json``.  Wall-clock timing is
deliberately kept out of the JSON so reruns with the same seed are
byte-identical; the CLI prints timing to standard error instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .ensemble import (
    DegenerateEnsemble,
    EnsembleMatrix,
    NullObjectiveZero,
    diversity,
    importance,
    strength,
    threshold_mean,
)
from .linear_model import SignalPartition

REPORT_VERSION = 1


@dataclass
class VariableRecord:
    name: str
    importance: float
    rank: int
    selected: bool | None  # None when thresholding is turned off


@dataclass
class SelectionReport:
    variables: list[VariableRecord]
    config: dict[str, Any]
    diagnostics: dict[str, Any]
    timing_seconds: float

    def to_json_dict(self) -> dict[str, Any]:
        records = []
        for rec in self.variables:
            entry: dict[str, Any] = {
                "name": rec.name,
                "importance": rec.importance,
                "rank": rec.rank,
            }
            if rec.selected is not None:
                entry["selected"] = rec.selected
            records.append(entry)
        return {
            "report_version": REPORT_VERSION,
            "config": self.config,
            "variables": records,
            "diagnostics": self.diagnostics,
        }

    def to_table(self) -> str:
        """Human-readable ranking, best first."""
        show_selected = any(rec.selected is not None for rec in self.variables)
        width = max(4, max(len(rec.name) for rec in self.variables))
        lines = [f"rank  {'name':<{width}}  importance" + ("  selected" if show_selected else "")]
        for rec in sorted(self.variables, key=lambda r: r.rank):
            line = f"{rec.rank:>4}  {rec.name:<{width}}  {rec.importance:>10.4f}"
            if show_selected:
                line += "  " + ("*" if rec.selected else "")
            lines.append(line.rstrip())
        return "\n".join(lines) + "\n"


def ranks_by_importance(r: np.ndarray) -> np.ndarray:
    """Rank 1..p by descending importance, ties to the lower index."""
    order = np.argsort(-np.asarray(r), kind="stable")
    ranks = np.empty(order.size, dtype=np.intp)
    ranks[order] = np.arange(1, order.size + 1)
    return ranks


def make_selection_report(
    names: tuple[str, ...],
    ensemble: EnsembleMatrix,
    config: dict[str, Any],
    threshold: str = "mean",
    timing_seconds: float = 0.0,
) -> SelectionReport:
    """Assemble the ranked report for one ensemble run.

    ``threshold`` is "mean" (flag every variable whose importance strictly
    exceeds the average) or "none" (ranks only, no flags).  Diagnostics
    that need at least two paths come out as None for B=1.
    """
    if threshold not in ("mean", "none"):
        raise ValueError(f"unknown threshold rule {threshold!r}")
    r = importance(ensemble)
    ranks = ranks_by_importance(r)
    if threshold == "mean":
        chosen = set(threshold_mean(r).tolist())
        flags: list[bool | None] = [j in chosen for j in range(len(names))]
    else:
        flags = [None] * len(names)
    try:
        d_value: float | None = diversity(ensemble)
    except DegenerateEnsemble:
        d_value = None
    try:
        s_value: float | None = strength(ensemble)
    except NullObjectiveZero:
        s_value = None
    diagnostics = {
        "b": ensemble.b,
        "kappa": config["kappa"],
        "lam": config["lam"],
        "diversity": d_value,
        "strength": s_value,
        "null_objective": ensemble.null_objective,
        "master_seed": config["seed"],
        "n_variables": ensemble.p,
    }
    variables = [
        VariableRecord(
            name=names[j],
            importance=float(r[j]),
            rank=int(ranks[j]),
            selected=flags[j],
        )
        for j in range(len(names))
    ]
    return SelectionReport(
        variables=variables,
        config=config,
        diagnostics=diagnostics,
        timing_seconds=timing_seconds,
    )


@dataclass
class GroupStats:
    """Selection-count statistics for one variable group across replicates."""

    size: int
    min: int
    median: int
    max: int
    avg_zero: float

    def as_dict(self) -> dict[str, Any]:
        return {
            "size": self.size,
            "min": self.min,
            "median": self.median,
            "max": self.max,
            "avg_zero": self.avg_zero,
        }


@dataclass
class BenchmarkSummary:
    scenario: str
    reps: int
    counts: np.ndarray
    truth: SignalPartition
    signal: GroupStats
    noise: GroupStats
    perf: float

    def to_table(self) -> str:
        lines = [
            f"scenario {self.scenario}: {self.reps} replicates",
            "group   size   min  median     max   avg_zero",
        ]
        for label, stats in (("signal", self.signal), ("noise", self.noise)):
            lines.append(
                f"{label:<6}  {stats.size:>4}  {stats.min:>4}  {stats.median:>6}  "
                f"{stats.max:>6}  {stats.avg_zero:>9.2f}"
            )
        lines.append(f"perf {self.perf:.4f}")
        return "\n".join(lines) + "\n"


def group_stats(counts: np.ndarray, group: frozenset[int], reps: int) -> GroupStats:
    """Min/median/max selection count over the group's variables.

    The median of an even-sized group is the lower middle order statistic,
    keeping every reported number an integer count.
    """
    members = sorted(group)
    if not members:
        return GroupStats(size=0, min=0, median=0, max=0, avg_zero=0.0)
    values = np.sort(counts[members])
    return GroupStats(
        size=len(members),
        min=int(values[0]),
        median=int(values[(len(members) - 1) // 2]),
        max=int(values[-1]),
        avg_zero=len(members) - float(values.sum()) / reps,
    )


def make_benchmark_summary(
    scenario: str,
    selections: list[np.ndarray],
    truth: SignalPartition,
    p: int,
) -> BenchmarkSummary:
    """Tally per-variable selection counts over replicates and score them."""
    from .ensemble import perf as perf_metric

    if not selections:
        raise ValueError("need at least one replicate")
    truth.validate(p)
    counts = np.zeros(p, dtype=np.int64)
    for chosen in selections:
        counts[np.asarray(chosen, dtype=np.intp)] += 1
    reps = len(selections)
    return BenchmarkSummary(
        scenario=scenario,
        reps=reps,
        counts=counts,
        truth=truth,
        signal=group_stats(counts, truth.signal, reps),
        noise=group_stats(counts, truth.noise, reps),
        perf=perf_metric(selections, truth),
    )


def benchmark_json_dict(
    summary: BenchmarkSummary,
    names: tuple[str, ...],
    config: dict[str, Any],
) -> dict[str, Any]:
    """Benchmark results in the shared report envelope."""
    variables = [
        {
            "name": names[j],
            "group": "signal" if j in summary.truth.signal else "noise",
            "count": int(summary.counts[j]),
        }
        for j in range(len(names))
    ]
    return {
        "report_version": REPORT_VERSION,
        "config": config,
        "variables": variables,
        "diagnostics": {
            "scenario": summary.scenario,
            "reps": summary.reps,
            "signal": summary.signal.as_dict(),
            "noise": summary.noise.as_dict(),
            "perf": summary.perf,
        },
    }


def dump_json(payload: dict[str, Any]) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def tuning_curve_csv(entries, chosen_kappa: float) -> str:
    """CSV with header kappa,diversity,strength and a chosen-kappa comment."""
    lines = ["kappa,diversity,strength"]
    for kappa, d_value, s_value in entries:
        lines.append(f"{kappa!r},{d_value!r},{s_value!r}")
    lines.append(f"# chosen_kappa = {chosen_kappa!r}")
    return "\n".join(lines) + "\n"
