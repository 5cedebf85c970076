"""Opaque interfaces to model resources: masked LM, NLI, word embeddings.

Every provider is a determinism contract: identical inputs must return
identical outputs within a process run. Implementations declare whether
they tolerate concurrent calls via ``thread_safe``; the pipeline respects
the declaration.
"""

from __future__ import annotations

import re
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from mantis.generation import MaskedPair

# A substitution candidate must be a single word: letters in any script,
# optionally joined by internal hyphens or apostrophes.
_WORD_RE = re.compile(r"[^\W\d_]+(?:['’-][^\W\d_]+)*")


def is_single_word(text: str) -> bool:
    """True for one alphabetic word (internal hyphen/apostrophe allowed)."""
    return bool(_WORD_RE.fullmatch(text))


class MaskedLMProvider(ABC):
    """Masked-language-model access: top-k mask fills and point probabilities.

    ``masked_topk`` returns detokenized single words only — adapters strip
    subword markers and drop fragments, punctuation and multiword pieces.
    Output order is strict: descending probability, ties broken by ascending
    word, no duplicate words.
    """

    vocab_kind: str = "unspecified"
    #: Longest supported pair text in characters; None means unbounded.
    max_chars: int | None = None
    thread_safe: bool = False
    #: Truncation depth used by the default ``masked_word_prob``.
    word_prob_topk: int = 200

    @abstractmethod
    def masked_topk(self, pair: MaskedPair, k: int) -> list[tuple[str, float]]:
        """Top-k mask fills as (word, probability), best first, length <= k."""

    def masked_word_prob(self, pair: MaskedPair, word: str) -> float:
        """Probability of ``word`` at the masked position.

        The default implementation reads the truncated top-``word_prob_topk``
        distribution; words outside it get probability 0.0. Providers with
        cheap point lookups should override this.
        """
        needle = word.lower()
        for filler, prob in self.masked_topk(pair, self.word_prob_topk):
            if filler.lower() == needle:
                return prob
        return 0.0


class NLIProvider(ABC):
    """Textual-entailment probability. Directional: premise first."""

    thread_safe: bool = False

    @abstractmethod
    def entail_prob(self, premise: str, hypothesis: str) -> float:
        """Probability in [0, 1] that the premise entails the hypothesis."""


class EmbeddingProvider(ABC):
    """Word vectors of a fixed dimensionality."""

    dim: int
    thread_safe: bool = False

    @abstractmethod
    def embed(self, word: str) -> np.ndarray:
        """A ``dim``-length float vector; all-zero for unknown words."""


def check_topk_k(k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")


def check_nli_inputs(premise: str, hypothesis: str) -> None:
    if not premise or not hypothesis:
        raise ValueError("premise and hypothesis must be non-empty")
