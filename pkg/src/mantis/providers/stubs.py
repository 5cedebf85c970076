"""Deterministic hash-backed providers for offline runs and golden tests.

Every stub score reduces an FNV-1a 64-bit hash of UTF-8 bytes modulo 1000
to a value in [0, 1), so any implementation on any machine reproduces the
whole pipeline bit-exactly. Stubs are pure functions of their inputs and
fully concurrent.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

import numpy as np

from mantis.providers.base import (
    EmbeddingProvider,
    MaskedLMProvider,
    NLIProvider,
    check_nli_inputs,
    check_topk_k,
    is_single_word,
)
from mantis.providers.lexicon import Lexicon

if TYPE_CHECKING:
    from mantis.generation import MaskedPair

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash."""
    value = FNV_OFFSET_BASIS
    for byte in data:
        value = ((value ^ byte) * FNV_PRIME) & _MASK64
    return value


def hash_unit(text: str) -> float:
    """FNV-1a-64 of the UTF-8 bytes, mod 1000, scaled to [0, 1)."""
    return (fnv1a64(text.encode("utf-8")) % 1000) / 1000.0


#: Vocabulary used by the stub masked LM (and stub lexicons) by default.
DEFAULT_STUB_VOCAB = (
    "acquire", "aid", "ancient", "angry", "assist", "big", "bold", "brave",
    "bright", "buy", "calm", "clean", "clear", "daring", "dark", "delicate",
    "difficult", "easy", "essential", "fast", "fearless", "forced", "fragile",
    "gentle", "get", "happy", "hard", "help", "huge", "important", "kind",
    "large", "mandatory", "modern", "necessary", "needed", "new", "obligatory",
    "obtain", "old", "plain", "purchase", "quick", "quiet", "rapid", "required",
    "sad", "silent", "simple", "slow", "small", "still", "strong", "support",
    "tiny", "tough", "unavoidable", "vast", "weak", "wise",
)


class StubMaskedLM(MaskedLMProvider):
    """Masked LM whose distribution is context-free: each vocabulary word is
    scored by its FNV-1a hash, so the same vocabulary always yields the same
    top-k list regardless of the sentence pair."""

    vocab_kind = "stub-fnv1a"
    thread_safe = True

    def __init__(self, vocab: Iterable[str] = DEFAULT_STUB_VOCAB):
        words = sorted({w.lower() for w in vocab if is_single_word(w.lower())})
        if not words:
            raise ValueError("stub vocabulary must contain at least one single word")
        self._ranked = sorted(
            ((word, hash_unit(word)) for word in words),
            key=lambda pair: (-pair[1], pair[0]),
        )

    @property
    def vocab(self) -> tuple[str, ...]:
        return tuple(word for word, _ in self._ranked)

    def masked_topk(self, pair: MaskedPair, k: int) -> list[tuple[str, float]]:
        check_topk_k(k)
        return list(self._ranked[:k])

    def masked_word_prob(self, pair: MaskedPair, word: str) -> float:
        return hash_unit(word.lower())


class StubNLI(NLIProvider):
    """Entailment stub: hash of ``premise → hypothesis`` (directional), with
    the convention that identical texts entail each other with probability 1."""

    thread_safe = True

    def entail_prob(self, premise: str, hypothesis: str) -> float:
        check_nli_inputs(premise, hypothesis)
        if premise == hypothesis:
            return 1.0
        return hash_unit(premise + "→" + hypothesis)


class StubEmbedding(EmbeddingProvider):
    """Hash-valued word vectors: component i is FNV-1a-64 of ``word#i``
    reduced mod 2001 and scaled to [-1, 1]."""

    thread_safe = True

    def __init__(self, dim: int = 8):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = dim

    def embed(self, word: str) -> np.ndarray:
        lowered = word.lower()
        components = [
            ((fnv1a64(f"{lowered}#{i}".encode("utf-8")) % 2001) - 1000) / 1000.0
            for i in range(self.dim)
        ]
        return np.array(components, dtype=np.float64)


def stub_lexicon(name: str, vocab: Iterable[str] = DEFAULT_STUB_VOCAB) -> Lexicon:
    """Hash-valued lexicon over a vocabulary, salted by the lexicon name so
    freq/wp_crowd/wp_corp disagree with each other deterministically."""
    table = {w.lower(): hash_unit(f"{name}:{w.lower()}") for w in vocab}
    return Lexicon(name=name, table=table)
