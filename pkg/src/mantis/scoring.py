"""Per-candidate feature scores.

- b: masked-LM probability recorded at generation time (no re-query)
- l: average masked loss of the substituted sentence's context words
- sim: embedding cosine between target and candidate
- freq / wp_crowd / wp_corp: lexicon lookups (None for out-of-vocabulary)
- eq: product of entailment probabilities in both directions
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from mantis.core import Candidate, FeatureScores, Instance, locate_target
from mantis.generation import MASK_TOKEN, MaskedPair
from mantis.providers.base import EmbeddingProvider, MaskedLMProvider, NLIProvider
from mantis.providers.lexicon import Lexicon

# Guards -log against zero-probability context words.
PROB_FLOOR = 1e-9

_WHITESPACE_TOKEN_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class ScoredCandidate:
    candidate: Candidate
    scores: FeatureScores


@dataclass(frozen=True)
class ContextLoss:
    """Mean context loss plus how many positions contributed to it."""

    value: float
    positions: int

    @property
    def degenerate(self) -> bool:
        return self.positions == 0


def substitute(instance: Instance, replacement: str) -> str:
    """The sentence with the target span replaced by ``replacement``."""
    start, end = locate_target(instance)
    return instance.sentence[:start] + replacement + instance.sentence[end:]


def score_b(candidate: Candidate) -> float:
    """Masked-LM probability, recorded at generation time."""
    return candidate.gen_prob


def score_l(
    instance: Instance,
    candidate: Candidate,
    lm: MaskedLMProvider,
    m: int = 5,
) -> ContextLoss:
    """Average loss of the candidate's context words; lower fits better.

    The candidate is substituted into the sentence; each whitespace token up
    to ``m`` positions left and right of it is masked in turn and charged
    -log p(word | rest). A sentence with no context words yields loss 0,
    flagged as degenerate.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    start, _ = locate_target(instance)
    sentence = substitute(instance, candidate.surface)
    tokens = [(t.start(), t.end(), t.group()) for t in _WHITESPACE_TOKEN_RE.finditer(sentence)]
    center = next(
        i for i, (ts, te, _) in enumerate(tokens) if ts <= start < te
    )
    losses: list[float] = []
    for j in range(center - m, center + m + 1):
        if j == center or j < 0 or j >= len(tokens):
            continue
        token_start, token_end, word = tokens[j]
        masked = sentence[:token_start] + MASK_TOKEN + sentence[token_end:]
        pair = MaskedPair(original=sentence, masked=masked, mask_offset=token_start)
        prob = min(max(lm.masked_word_prob(pair, word), PROB_FLOOR), 1.0)
        losses.append(-math.log(prob))
    if not losses:
        return ContextLoss(value=0.0, positions=0)
    return ContextLoss(value=sum(losses) / len(losses), positions=len(losses))


def score_sim(target_word: str, candidate_word: str, emb: EmbeddingProvider) -> float:
    """Cosine similarity of the two word embeddings; 0 when either vector is
    all-zero."""
    u = np.asarray(emb.embed(target_word), dtype=np.float64)
    v = np.asarray(emb.embed(candidate_word), dtype=np.float64)
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    cosine = float(np.dot(u, v) / (norm_u * norm_v))
    return max(-1.0, min(1.0, cosine))


def score_lexicon(candidate: Candidate, lexicon: Lexicon) -> float | None:
    """Lexicon value for the candidate, or None when out of vocabulary
    (absent values rank after all present ones downstream)."""
    return lexicon.lookup(candidate.surface)


def equivalence_score(instance: Instance, candidate: Candidate, nli: NLIProvider) -> float:
    """Product of the entailment probabilities in both directions between the
    original sentence and the substituted one. Exactly two provider calls."""
    original = instance.sentence
    substituted = substitute(instance, candidate.surface)
    forward = nli.entail_prob(original, substituted)
    backward = nli.entail_prob(substituted, original)
    for name, prob in (("forward", forward), ("backward", backward)):
        if not 0.0 <= prob <= 1.0:
            raise ValueError(f"{name} entailment probability out of [0, 1]: {prob}")
    return forward * backward
