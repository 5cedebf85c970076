"""Substitution ranking: competition ranks per feature, weighted rank
aggregation, mean-equivalence pruning, tie-free final ordering, and
rank-correlation feature selection.

A candidate's competition rank under a feature is one plus the number of
candidates with a strictly better score; tied scores share a rank. Lower
total rank is better.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Literal, Mapping, Sequence

from scipy.stats import spearmanr

from mantis.core import Candidate, GoldAnnotations, Instance, RunConfig
from mantis.errors import DegenerateRankingError, MissingFeatureError
from mantis.scoring import ScoredCandidate

log = logging.getLogger(__name__)

RankDirection = Literal["higher", "lower"]

#: Which way each feature points: the context loss is the only one where a
#: smaller raw score is better.
FEATURE_DIRECTIONS: dict[str, RankDirection] = {
    "b": "higher",
    "l": "lower",
    "sim": "higher",
    "freq": "higher",
    "wp_crowd": "higher",
    "wp_corp": "higher",
    "eq": "higher",
}

#: Order of the tie-breaking chain recorded in ``RankedOutput``.
TIE_BREAK_LEVELS = ("total_rank", "gen_prob", "lexicographic")


def rank_feature(
    scores: Mapping[str, float | None],
    direction: RankDirection = "higher",
) -> dict[str, int]:
    """Competition ranks: rank(c) = 1 + |{w : f(w) strictly better than f(c)}|.

    Absent (None) scores rank after every present one, sharing rank
    len(present) + 1.
    """
    if not scores:
        raise ValueError("at least one candidate is required")
    if direction not in ("higher", "lower"):
        raise ValueError(f"direction must be 'higher' or 'lower', got {direction!r}")
    present = []
    for name, value in scores.items():
        if value is None:
            continue
        if math.isnan(value):
            raise ValueError(f"score for {name!r} is NaN")
        present.append((name, value))
    reverse = direction == "higher"
    present.sort(key=lambda nv: nv[1], reverse=reverse)
    ranks: dict[str, int] = {}
    previous_value: float | None = None
    shared_rank = 0
    for position, (name, value) in enumerate(present, start=1):
        if previous_value is None or value != previous_value:
            shared_rank = position
            previous_value = value
        ranks[name] = shared_rank
    worst = len(present) + 1
    for name, value in scores.items():
        if value is None:
            ranks[name] = worst
    return ranks


def build_rank_vector(
    scored: Sequence[ScoredCandidate],
    features: Iterable[str],
) -> dict[str, dict[str, int]]:
    """Per-feature competition ranks over one candidate set."""
    vector: dict[str, dict[str, int]] = {}
    for feature in features:
        if feature not in FEATURE_DIRECTIONS:
            raise ValueError(f"unknown feature {feature!r}")
        scores = {sc.candidate.surface: sc.scores.get(feature) for sc in scored}
        vector[feature] = rank_feature(scores, FEATURE_DIRECTIONS[feature])
    return vector


def aggregate(
    rank_vector: Mapping[str, Mapping[str, int]],
    config: RunConfig,
) -> dict[str, int]:
    """Weighted rank sum per candidate: total(c) = sum_f weight_f * rank_f(c).

    Lower is better. Dropping any overall scale factor (such as averaging
    instead of summing) cannot change the induced order.
    """
    candidates: set[str] | None = None
    for feature in config.feature_weights:
        if feature not in rank_vector:
            raise MissingFeatureError(
                f"run {config.run_id!r} weights feature {feature!r} but no ranks were supplied"
            )
        keys = set(rank_vector[feature])
        if candidates is None:
            candidates = keys
        elif keys != candidates:
            raise ValueError(f"feature {feature!r} ranks a different candidate set")
    assert candidates is not None
    totals = dict.fromkeys(candidates, 0)
    for feature, weight in config.feature_weights.items():
        for name, rank in rank_vector[feature].items():
            totals[name] += weight * rank
    return totals


def prune_by_mean_eq(eq_scores: Mapping[str, float]) -> frozenset[str]:
    """Candidates surviving mean-equivalence pruning.

    Removes exactly those strictly below the mean equivalence score; when all
    scores are equal nothing is below the mean and nothing is removed. The
    maximal score can never be strictly below the mean, so the survivor set
    is never empty (a defensive guard keeps the argmax regardless).
    """
    if not eq_scores:
        raise ValueError("at least one candidate is required")
    mean = sum(eq_scores.values()) / len(eq_scores)
    survivors = frozenset(name for name, value in eq_scores.items() if value >= mean)
    if not survivors:  # unreachable: max(eq) >= mean always
        best = max(eq_scores, key=lambda name: eq_scores[name])
        survivors = frozenset({best})
    return survivors


@dataclass(frozen=True)
class RankedOutput:
    """Final ordered suggestion list for one instance.

    ``tie_break_trace[i]`` names the chain level (total_rank, gen_prob,
    lexicographic) that ordered ``ordered[i]`` before ``ordered[i + 1]``.
    """

    ordered: tuple[Candidate, ...]
    total_rank: dict[str, int]
    tie_break_trace: tuple[str, ...]

    def __post_init__(self) -> None:
        surfaces = [c.surface for c in self.ordered]
        if len(set(surfaces)) != len(surfaces):
            raise ValueError("ordered candidates must have unique surfaces")
        if len(self.tie_break_trace) != max(len(self.ordered) - 1, 0):
            raise ValueError("tie_break_trace must cover each adjacent pair")

    @property
    def surfaces(self) -> tuple[str, ...]:
        return tuple(c.surface for c in self.ordered)


def finalize(
    candidates: Sequence[Candidate],
    total_rank: Mapping[str, int],
    k_output: int = 10,
    keep: Iterable[str] | None = None,
) -> RankedOutput:
    """Sort ascending by (total rank, generation probability descending,
    surface), keep only ``keep`` when given, truncate to ``k_output``."""
    if not candidates:
        raise ValueError("at least one candidate is required")
    if k_output < 1:
        raise ValueError(f"k_output must be >= 1, got {k_output}")
    pool = list(candidates)
    if keep is not None:
        kept = set(keep)
        pool = [c for c in pool if c.surface in kept]
        if not pool:
            raise ValueError("keep set removed every candidate")
    missing = [c.surface for c in pool if c.surface not in total_rank]
    if missing:
        raise ValueError(f"total_rank is missing candidates: {missing}")
    pool.sort(key=lambda c: (total_rank[c.surface], -c.gen_prob, c.surface))
    emitted = pool[:k_output]
    trace = []
    for left, right in zip(emitted, emitted[1:]):
        if total_rank[left.surface] != total_rank[right.surface]:
            trace.append("total_rank")
        elif left.gen_prob != right.gen_prob:
            trace.append("gen_prob")
        else:
            trace.append("lexicographic")
    return RankedOutput(
        ordered=tuple(emitted),
        total_rank={c.surface: total_rank[c.surface] for c in emitted},
        tie_break_trace=tuple(trace),
    )


def select_features(
    trial: Sequence[tuple[Instance, GoldAnnotations]],
    feature_scores: Mapping[str, Sequence[Mapping[str, float | None]]],
    top_n: int,
) -> list[tuple[str, float]]:
    """Features ranked by mean Spearman correlation with the gold frequency
    ordering across trial instances; returns the best ``top_n``.

    Per instance and feature, the gold candidates' feature scores (absent ->
    worst) are correlated against their suggestion counts using average-rank
    tie handling. Instances whose gold counts are all equal carry no ranking
    signal and are skipped with a warning; a feature that scores every gold
    candidate identically contributes 0 for that instance.
    """
    if not trial:
        raise ValueError("trial must contain at least one instance")
    if top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    for feature, per_instance in feature_scores.items():
        if len(per_instance) != len(trial):
            raise ValueError(
                f"feature {feature!r} scores {len(per_instance)} instances, trial has {len(trial)}"
            )
    usable: list[int] = []
    for index, (instance, gold) in enumerate(trial):
        counts = list(gold.freq_table.values())
        if len(counts) < 2 or len(set(counts)) == 1:
            log.warning(
                "skipping trial instance %d (%r): gold frequencies are all equal",
                index,
                instance.complex_word,
            )
            continue
        usable.append(index)
    if not usable:
        raise DegenerateRankingError("no trial instance has a usable gold frequency ranking")
    means: list[tuple[str, float]] = []
    for feature in sorted(feature_scores):
        correlations: list[float] = []
        for index in usable:
            gold = trial[index][1]
            words = sorted(gold.freq_table)
            counts = [gold.freq_table[w] for w in words]
            instance_scores = feature_scores[feature][index]
            scores = [
                -math.inf if instance_scores.get(w) is None else instance_scores[w]
                for w in words
            ]
            rho = spearmanr(counts, scores).statistic
            correlations.append(0.0 if math.isnan(rho) else float(rho))
        means.append((feature, fmean(correlations)))
    means.sort(key=lambda fv: (-fv[1], fv[0]))
    return means[:top_n]
