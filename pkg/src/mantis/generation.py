"""Substitute generation: mask the target word, query the masked LM over the
sentence pair, then filter the top-k fills.

Filtering drops the target itself, its morphological variants (shared Porter
stem, or one word being the other plus a bare inflectional suffix),
non-alphabetic tokens, and case-insensitive duplicates. The provider is
over-queried so filtering can still fill the requested candidate count.
"""

from __future__ import annotations

from dataclasses import dataclass

from mantis import porter
from mantis.core import Candidate, Instance, locate_target
from mantis.errors import EmptyCandidateSetError
from mantis.providers.base import MaskedLMProvider, is_single_word

MASK_TOKEN = "<mask>"
#: Separator between the original sentence and its masked variant in the
#: default single-string pair encoding.
PAIR_SEPARATOR = "</s></s>"
OVER_QUERY_FACTOR = 4
INFLECTION_SUFFIXES = ("s", "es", "ed", "d", "ing", "er", "est")


@dataclass(frozen=True)
class MaskedPair:
    """A sentence and its variant with one span replaced by the mask token.

    ``mask_offset`` is the character offset of the mask token within
    ``masked``; the original and masked texts agree everywhere else.
    """

    original: str
    masked: str
    mask_offset: int

    def __post_init__(self) -> None:
        if self.masked.count(MASK_TOKEN) != 1:
            raise ValueError("masked text must contain exactly one mask token")
        if self.masked[self.mask_offset : self.mask_offset + len(MASK_TOKEN)] != MASK_TOKEN:
            raise ValueError(f"mask_offset {self.mask_offset} does not point at the mask token")
        prefix = self.masked[: self.mask_offset]
        suffix = self.masked[self.mask_offset + len(MASK_TOKEN) :]
        if not self.original.startswith(prefix) or not self.original.endswith(suffix):
            raise ValueError("masked text must differ from the original only at the masked span")
        if len(prefix) + len(suffix) >= len(self.original):
            raise ValueError("the masked span must cover a non-empty piece of the original")

    @property
    def target_span(self) -> tuple[int, int]:
        """Span of the replaced text within the original sentence."""
        suffix_len = len(self.masked) - self.mask_offset - len(MASK_TOKEN)
        return self.mask_offset, len(self.original) - suffix_len

    @property
    def target_text(self) -> str:
        start, end = self.target_span
        return self.original[start:end]

    @property
    def pair_text(self) -> str:
        """Single-string pair encoding: original, separator, masked variant."""
        return f"{self.original} {PAIR_SEPARATOR} {self.masked}"

    @property
    def mask_position(self) -> int:
        """Character index of the mask token within ``pair_text`` (always in
        the masked segment)."""
        return len(self.original) + len(PAIR_SEPARATOR) + 2 + self.mask_offset


def build_masked_pair(instance: Instance) -> MaskedPair:
    """Mask the target occurrence of the instance's complex word."""
    if MASK_TOKEN in instance.sentence:
        raise ValueError(f"sentence already contains the mask token {MASK_TOKEN!r}")
    start, end = locate_target(instance)
    masked = instance.sentence[:start] + MASK_TOKEN + instance.sentence[end:]
    return MaskedPair(original=instance.sentence, masked=masked, mask_offset=start)


def is_morphological_variant(word: str, target: str) -> bool:
    """True when the two lowercased words share a Porter stem or differ by a
    bare inflectional suffix (s, es, ed, d, ing, er, est)."""
    if word == target:
        return True
    for suffix in INFLECTION_SUFFIXES:
        if word == target + suffix or target == word + suffix:
            return True
    return porter.stem(word) == porter.stem(target)


def generate_candidates(
    pair: MaskedPair,
    instance: Instance,
    lm: MaskedLMProvider,
    k_generate: int = 30,
) -> list[Candidate]:
    """Top ``k_generate`` filtered substitution candidates, best first.

    Raises EmptyCandidateSetError when filtering leaves nothing.
    """
    if k_generate < 1:
        raise ValueError(f"k_generate must be >= 1, got {k_generate}")
    target = instance.complex_word.lower()
    candidates: list[Candidate] = []
    seen: set[str] = set()
    for raw_word, prob in lm.masked_topk(pair, k_generate * OVER_QUERY_FACTOR):
        word = raw_word.lower()
        if word in seen:
            continue
        seen.add(word)
        if not is_single_word(word):
            continue
        if is_morphological_variant(word, target):
            continue
        candidates.append(Candidate(surface=word, gen_prob=prob))
        if len(candidates) == k_generate:
            break
    if not candidates:
        raise EmptyCandidateSetError(
            f"no candidates survived filtering for target {instance.complex_word!r}"
        )
    return candidates
