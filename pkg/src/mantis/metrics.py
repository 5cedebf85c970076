"""Ranking metrics over gold annotation sets, and the metric-intercorrelation
report over a results table.

Matching is lowercased exact string equality against the gold set (or, for
the top-1 variants, against the most-frequently-suggested set). Prediction
lists must be duplicate-free; duplicates are rejected, never deduplicated.
At K = 1 the definitions below make Accuracy@1, MAP@1, Potential@1 and
Precision@1 coincide exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import numpy as np

from mantis.core import GoldAnnotations
from mantis.errors import DegenerateColumnError, DuplicatePredictionError, ParseError

DEFAULT_MAP_KS = (1, 3, 5, 10)
DEFAULT_POTENTIAL_KS = (1, 3, 5, 10)
DEFAULT_TOP1_KS = (1, 2, 3)


def _normalized(pred: Sequence[str]) -> list[str]:
    lowered = [p.lower() for p in pred]
    seen: set[str] = set()
    for word in lowered:
        if word in seen:
            raise DuplicatePredictionError(f"duplicate prediction {word!r}")
        seen.add(word)
    return lowered


def _mean(values) -> float:
    items = list(values)
    return math.fsum(items) / len(items)


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")


def instance_potential_at_k(pred: Sequence[str], gold: GoldAnnotations, k: int) -> int:
    """1 iff any of the first k predictions is in the gold set."""
    _check_k(k)
    lowered = _normalized(pred)[:k]
    return int(any(p in gold.gold_set for p in lowered))


def instance_accuracy_at_k_top1(pred: Sequence[str], gold: GoldAnnotations, k: int) -> int:
    """1 iff any of the first k predictions is a most-frequently-suggested one."""
    _check_k(k)
    lowered = _normalized(pred)[:k]
    return int(any(p in gold.top1_set for p in lowered))


def instance_ap_at_k(pred: Sequence[str], gold: GoldAnnotations, k: int) -> float:
    """AP@K = (1/K) * sum over hit positions i of precision@i.

    The normalizer is K itself (not the gold size), which keeps the K = 1
    identity with accuracy and potential exact.
    """
    _check_k(k)
    lowered = _normalized(pred)[:k]
    hits = 0
    total = 0.0
    for position, word in enumerate(lowered, start=1):
        if word in gold.gold_set:
            hits += 1
            total += hits / position
    return total / k


def _check_aligned(preds: Sequence[Sequence[str]], golds: Sequence[GoldAnnotations]) -> None:
    if len(preds) != len(golds):
        raise ValueError(f"{len(preds)} prediction lists vs {len(golds)} gold annotations")
    if not preds:
        raise ValueError("at least one instance is required")


def map_at_k(preds: Sequence[Sequence[str]], golds: Sequence[GoldAnnotations], k: int) -> float:
    _check_aligned(preds, golds)
    return _mean(instance_ap_at_k(p, g, k) for p, g in zip(preds, golds))


def potential_at_k(
    preds: Sequence[Sequence[str]], golds: Sequence[GoldAnnotations], k: int
) -> float:
    _check_aligned(preds, golds)
    return _mean(instance_potential_at_k(p, g, k) for p, g in zip(preds, golds))


def accuracy_at_k_top1(
    preds: Sequence[Sequence[str]], golds: Sequence[GoldAnnotations], k: int
) -> float:
    _check_aligned(preds, golds)
    return _mean(instance_accuracy_at_k_top1(p, g, k) for p, g in zip(preds, golds))


def accuracy_at_1(preds: Sequence[Sequence[str]], golds: Sequence[GoldAnnotations]) -> float:
    """Fraction of instances whose single top prediction is in the gold set."""
    _check_aligned(preds, golds)
    hits = []
    for pred, gold in zip(preds, golds):
        lowered = _normalized(pred)
        hits.append(int(bool(lowered) and lowered[0] in gold.gold_set))
    return _mean(hits)


@dataclass(frozen=True)
class MetricReport:
    """Named metric values over one dataset, in emission order."""

    values: dict[str, float]
    instance_count: int
    map_ks: tuple[int, ...]
    potential_ks: tuple[int, ...]
    top1_ks: tuple[int, ...]

    def __post_init__(self) -> None:
        for name, value in self.values.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"metric {name} out of [0, 1]: {value}")

    def to_tsv(self) -> str:
        """Machine-readable ``metric<TAB>value`` lines."""
        return "".join(f"{name}\t{value:.6f}\n" for name, value in self.values.items())

    def to_table(self) -> str:
        """Human-readable aligned table."""
        width = max(len(name) for name in self.values)
        lines = [f"{name:<{width}}  {value:.4f}" for name, value in self.values.items()]
        lines.append(f"({self.instance_count} instances)")
        return "\n".join(lines) + "\n"


def build_report(
    preds: Sequence[Sequence[str]],
    golds: Sequence[GoldAnnotations],
    map_ks: Sequence[int] = DEFAULT_MAP_KS,
    potential_ks: Sequence[int] = DEFAULT_POTENTIAL_KS,
    top1_ks: Sequence[int] = DEFAULT_TOP1_KS,
) -> MetricReport:
    """Evaluate predictions: ACC@1, then MAP@K, Potential@K and ACC@K@top1
    for the requested K values."""
    _check_aligned(preds, golds)
    values: dict[str, float] = {"ACC@1": accuracy_at_1(preds, golds)}
    for k in map_ks:
        values[f"MAP@{k}"] = map_at_k(preds, golds, k)
    for k in potential_ks:
        values[f"Potential@{k}"] = potential_at_k(preds, golds, k)
    for k in top1_ks:
        values[f"ACC@{k}@top1"] = accuracy_at_k_top1(preds, golds, k)
    return MetricReport(
        values=values,
        instance_count=len(preds),
        map_ks=tuple(map_ks),
        potential_ks=tuple(potential_ks),
        top1_ks=tuple(top1_ks),
    )


@dataclass(frozen=True)
class CorrelationReport:
    """Pairwise Pearson correlations between metric columns.

    ``mean`` and ``sd`` (sample standard deviation) summarize the upper
    triangle; with a single pair the sd is undefined and reported as NaN.
    """

    metric_names: tuple[str, ...]
    matrix: np.ndarray = field(compare=False)
    mean: float
    sd: float

    def pairs(self) -> list[tuple[str, str, float]]:
        out = []
        for i in range(len(self.metric_names)):
            for j in range(i + 1, len(self.metric_names)):
                out.append((self.metric_names[i], self.metric_names[j], float(self.matrix[i, j])))
        return out

    def to_table(self) -> str:
        width = max(len(name) for name in self.metric_names)
        cell = max(width, 7)
        header = " " * (width + 2) + "  ".join(f"{n:>{cell}}" for n in self.metric_names)
        lines = [header]
        for i, name in enumerate(self.metric_names):
            row = "  ".join(f"{self.matrix[i, j]:>{cell}.4f}" for j in range(len(self.metric_names)))
            lines.append(f"{name:<{width}}  {row}")
        lines.append(f"mean r = {self.mean:.4f}, sd = {self.sd:.4f}")
        return "\n".join(lines) + "\n"


def metric_correlation_report(
    table: Sequence[Sequence[float]] | np.ndarray,
    metric_names: Sequence[str],
) -> CorrelationReport:
    """Pearson r for every metric pair over submission rows, plus the mean
    and sample sd of the upper triangle."""
    matrix = np.asarray(table, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError("table must be two-dimensional")
    rows, cols = matrix.shape
    if rows < 3:
        raise ValueError(f"need at least 3 submission rows, got {rows}")
    if cols < 2:
        raise ValueError(f"need at least 2 metric columns, got {cols}")
    if len(metric_names) != cols:
        raise ValueError(f"{len(metric_names)} names for {cols} columns")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("table values must be finite")
    variances = matrix.var(axis=0)
    for name, var in zip(metric_names, variances):
        if var == 0.0:
            raise DegenerateColumnError(f"metric column {name!r} has zero variance")
    corr = np.corrcoef(matrix, rowvar=False)
    upper = corr[np.triu_indices(cols, k=1)]
    mean = float(upper.mean())
    sd = float(upper.std(ddof=1)) if upper.size > 1 else float("nan")
    return CorrelationReport(
        metric_names=tuple(metric_names),
        matrix=corr,
        mean=mean,
        sd=sd,
    )


def load_results_table(path: str) -> tuple[list[str], np.ndarray]:
    """Read a results TSV: one header row, two identifier columns (team,
    run), then one column per metric. Returns (metric names, value matrix)."""
    try:
        with open(path, encoding="utf-8") as handle:
            lines = [line.rstrip("\r\n") for line in handle]
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc}", path=path) from exc
    rows = [line for line in lines if line.strip()]
    if len(rows) < 2:
        raise ParseError("need a header row and at least one data row", path=path)
    header = rows[0].split("\t")
    if len(header) < 4:
        raise ParseError(
            "header must have two identifier columns and at least two metrics", path=path
        )
    metric_names = header[2:]
    data = []
    for line_no, line in enumerate(rows[1:], start=2):
        columns = line.split("\t")
        if len(columns) != len(header):
            raise ParseError(
                f"expected {len(header)} columns, got {len(columns)}",
                path=path,
                line_no=line_no,
            )
        try:
            data.append([float(x) for x in columns[2:]])
        except ValueError as exc:
            raise ParseError(f"non-numeric metric value: {exc}", path=path, line_no=line_no) from None
    return metric_names, np.asarray(data, dtype=np.float64)


def bundled_results_path() -> str:
    """Path of the packaged official-results table."""
    return str(resources.files("mantis").joinpath("data/table1.tsv"))
