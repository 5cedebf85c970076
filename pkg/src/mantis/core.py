"""Domain types shared by the whole pipeline, plus gold-annotation frequency logic.

All types are immutable after construction and safe to share across workers.
Candidate/gold comparisons throughout the toolkit are case-insensitive via
Unicode-default lowercasing.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from mantis.errors import TargetNotFoundError

RUN_IDS = ("lsbert", "mantis1", "mantis2", "mantis3")

#: Every feature a run configuration may weight.
KNOWN_FEATURES = ("b", "l", "sim", "freq", "wp_crowd", "wp_corp", "eq")

# Tokens are runs of letters/digits with internal hyphens or apostrophes;
# this is the boundary rule for whole-token target search.
_TOKEN_RE = re.compile(r"[\w'’-]+")


@dataclass(frozen=True)
class Instance:
    """One sentence plus the complex word to be simplified within it."""

    sentence: str
    complex_word: str
    word_char_offset: int | None = None

    def __post_init__(self) -> None:
        if not self.sentence:
            raise ValueError("sentence must be non-empty")
        if any(ch in self.sentence for ch in "\t\n\r"):
            raise ValueError("sentence must not contain tab or newline characters")
        if not self.complex_word or any(ch.isspace() for ch in self.complex_word):
            raise ValueError("complex_word must be a non-empty, whitespace-free token")
        if self.word_char_offset is not None:
            start = self.word_char_offset
            end = start + len(self.complex_word)
            if start < 0 or end > len(self.sentence):
                raise ValueError(f"word_char_offset {start} is out of range")
            if self.sentence[start:end].lower() != self.complex_word.lower():
                raise ValueError(
                    f"sentence at offset {start} reads "
                    f"{self.sentence[start:end]!r}, not {self.complex_word!r}"
                )


@dataclass(frozen=True)
class GoldAnnotations:
    """Crowd-suggested substitutes for one instance; duplicates are the signal.

    ``freq_table`` counts lowercased suggestions. ``top1_set`` holds every
    token tied at the maximal count (the "most frequently suggested" set).
    """

    suggestions: tuple[str, ...]
    freq_table: dict[str, int]

    def __post_init__(self) -> None:
        if any(not s for s in self.suggestions):
            raise ValueError("gold suggestions must be non-empty strings")
        if sum(self.freq_table.values()) != len(self.suggestions):
            raise ValueError("freq_table counts must sum to the number of suggestions")
        if any(c < 1 for c in self.freq_table.values()):
            raise ValueError("freq_table counts must be >= 1")

    @property
    def gold_set(self) -> frozenset[str]:
        return frozenset(self.freq_table)

    @property
    def top1_set(self) -> frozenset[str]:
        if not self.freq_table:
            return frozenset()
        best = max(self.freq_table.values())
        return frozenset(w for w, c in self.freq_table.items() if c == best)


def derive_gold(suggestions: Iterable[str]) -> GoldAnnotations:
    """Tally a suggestion multiset into gold annotations.

    Tokens are kept verbatim (typos included) but counted case-insensitively.
    An empty multiset yields empty gold and top-1 sets.
    """
    kept = tuple(s.strip() for s in suggestions)
    counts = Counter(s.lower() for s in kept)
    return GoldAnnotations(suggestions=kept, freq_table=dict(counts))


def locate_target(instance: Instance) -> tuple[int, int]:
    """Character span [start, end) of the target occurrence in the sentence.

    Uses ``word_char_offset`` when supplied, otherwise the first whole-token
    case-insensitive occurrence of the complex word.
    """
    if instance.word_char_offset is not None:
        start = instance.word_char_offset
        return start, start + len(instance.complex_word)
    needle = instance.complex_word.lower()
    for match in _TOKEN_RE.finditer(instance.sentence):
        if match.group().lower() == needle:
            return match.start(), match.end()
    raise TargetNotFoundError(
        f"{instance.complex_word!r} does not occur as a token in {instance.sentence!r}"
    )


@dataclass(frozen=True)
class Candidate:
    """A generated substitution candidate and its masked-LM probability."""

    surface: str
    gen_prob: float

    def __post_init__(self) -> None:
        if not self.surface or any(ch.isspace() for ch in self.surface):
            raise ValueError("candidate surface must be a non-empty, whitespace-free token")
        if self.surface != self.surface.lower():
            raise ValueError("candidate surfaces are stored lowercased")
        if not 0.0 <= self.gen_prob <= 1.0:
            raise ValueError(f"gen_prob must lie in [0, 1], got {self.gen_prob}")


@dataclass(frozen=True)
class FeatureScores:
    """Raw per-candidate feature values; None marks a feature not computed
    (or, for lexicon features, an out-of-vocabulary word).

    ``l_degenerate`` records that the context loss had no positions to
    evaluate and was defined as 0.
    """

    b_prob: float
    l_loss: float | None = None
    sim: float | None = None
    freq: float | None = None
    wp_crowd: float | None = None
    wp_corp: float | None = None
    eq: float | None = None
    l_degenerate: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.b_prob <= 1.0:
            raise ValueError(f"b_prob must lie in [0, 1], got {self.b_prob}")
        for name in ("l_loss", "sim", "freq", "wp_crowd", "wp_corp", "eq"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.l_loss is not None and self.l_loss < 0:
            raise ValueError(f"l_loss must be nonnegative, got {self.l_loss}")
        if self.sim is not None and not -1.0 <= self.sim <= 1.0:
            raise ValueError(f"sim must lie in [-1, 1], got {self.sim}")
        if self.freq is not None and self.freq < 0:
            raise ValueError(f"freq must be nonnegative, got {self.freq}")
        if self.eq is not None and not 0.0 <= self.eq <= 1.0:
            raise ValueError(f"eq must lie in [0, 1], got {self.eq}")

    def get(self, feature: str) -> float | None:
        """Value of a feature by its short name ('b', 'l', 'sim', ...)."""
        try:
            attr = _FEATURE_ATTRS[feature]
        except KeyError:
            raise ValueError(f"unknown feature {feature!r}") from None
        return getattr(self, attr)


_FEATURE_ATTRS = {
    "b": "b_prob",
    "l": "l_loss",
    "sim": "sim",
    "freq": "freq",
    "wp_crowd": "wp_crowd",
    "wp_corp": "wp_corp",
    "eq": "eq",
}

# Canonical presets: (feature weights, prune-by-equivalence).
_RUN_PRESETS: dict[str, tuple[dict[str, int], bool]] = {
    "lsbert": ({"b": 1, "l": 1, "sim": 1, "freq": 1}, False),
    "mantis1": ({"b": 1, "sim": 3, "freq": 1}, True),
    "mantis2": ({"wp_crowd": 1, "eq": 1}, False),
    "mantis3": ({"wp_corp": 1, "eq": 1}, False),
}


@dataclass(frozen=True)
class RunConfig:
    """Which features, which weights, which postprocessing — one run setup.

    ``RunConfig.for_run`` builds the four canonical presets; configuration
    files may override individual knobs (see ``mantis.dataio``).
    """

    run_id: str
    feature_weights: dict[str, int]
    prune_by_equivalence: bool
    k_generate: int = 30
    k_output: int = 10
    context_window_m: int = 5

    def __post_init__(self) -> None:
        if self.run_id not in RUN_IDS:
            raise ValueError(f"run_id must be one of {RUN_IDS}, got {self.run_id!r}")
        if not self.feature_weights:
            raise ValueError("feature_weights must not be empty")
        for name, weight in self.feature_weights.items():
            if name not in KNOWN_FEATURES:
                raise ValueError(f"unknown feature {name!r} in weights")
            if not isinstance(weight, int) or weight < 1:
                raise ValueError(f"weight for {name!r} must be a positive integer")
        for knob in ("k_generate", "k_output", "context_window_m"):
            if getattr(self, knob) < 1:
                raise ValueError(f"{knob} must be >= 1")

    @classmethod
    def for_run(
        cls,
        run_id: str,
        *,
        k_generate: int = 30,
        k_output: int = 10,
        context_window_m: int = 5,
    ) -> "RunConfig":
        if run_id not in _RUN_PRESETS:
            raise ValueError(f"run_id must be one of {RUN_IDS}, got {run_id!r}")
        weights, prune = _RUN_PRESETS[run_id]
        return cls(
            run_id=run_id,
            feature_weights=dict(weights),
            prune_by_equivalence=prune,
            k_generate=k_generate,
            k_output=k_output,
            context_window_m=context_window_m,
        )

    @property
    def active_features(self) -> tuple[str, ...]:
        """Weighted features in canonical order."""
        return tuple(f for f in KNOWN_FEATURES if f in self.feature_weights)

    @property
    def needs_equivalence(self) -> bool:
        return self.prune_by_equivalence or "eq" in self.feature_weights
