"""Model and data providers: interfaces, offline stubs, remote adapters, lexicons."""

from mantis.providers.base import (
    EmbeddingProvider,
    MaskedLMProvider,
    NLIProvider,
    is_single_word,
)
from mantis.providers.lexicon import LEXICON_NAMES, Lexicon, load_lexicon
from mantis.providers.remote import (
    RemoteBackend,
    RemoteEmbedding,
    RemoteMaskedLM,
    RemoteNLI,
)
from mantis.providers.stubs import (
    DEFAULT_STUB_VOCAB,
    StubEmbedding,
    StubMaskedLM,
    StubNLI,
    fnv1a64,
    hash_unit,
    stub_lexicon,
)

__all__ = [
    "DEFAULT_STUB_VOCAB",
    "EmbeddingProvider",
    "LEXICON_NAMES",
    "Lexicon",
    "MaskedLMProvider",
    "NLIProvider",
    "RemoteBackend",
    "RemoteEmbedding",
    "RemoteMaskedLM",
    "RemoteNLI",
    "StubEmbedding",
    "StubMaskedLM",
    "StubNLI",
    "fnv1a64",
    "hash_unit",
    "is_single_word",
    "load_lexicon",
    "stub_lexicon",
]
