"""Line-delimited JSON client for out-of-process inference backends.

One JSON object per line, UTF-8. Request::

    {"id": 7, "op": "masked_topk" | "entail" | "embed", "args": {...}}

Response: ``{"id": 7, "result": ...}`` or ``{"id": 7, "error": "message"}``;
the ``id`` must echo the request. Args per op:

- masked_topk: {"original": str, "masked": str, "mask_offset": int, "k": int}
  -> result [[word, probability], ...]
- entail: {"premise": str, "hypothesis": str} -> result probability
- embed: {"word": str} -> result [float, ...]

The backend owns tokenization and the model-specific sentence-pair
encoding; this client ships raw sentences (the original and its masked
variant), so the exact segment-delimiter convention lives server-side and
must be documented by the backend.
"""

from __future__ import annotations

import json
import socket
import threading
from typing import TYPE_CHECKING, Any, IO

import numpy as np

from mantis.errors import ProviderError, SequenceTooLongError
from mantis.providers.base import (
    EmbeddingProvider,
    MaskedLMProvider,
    NLIProvider,
    check_nli_inputs,
    check_topk_k,
    is_single_word,
)

if TYPE_CHECKING:
    from mantis.generation import MaskedPair

# Leading markers some tokenizers attach to word-initial pieces.
_SUBWORD_MARKERS = ("Ġ", "▁")  # 'Ġ' (byte-BPE space), '▁' (sentencepiece)


class RemoteBackend:
    """Serialized request/response channel to one backend process.

    Calls are guarded by a lock, so a backend instance is safe to share
    across threads (requests are serialized, never interleaved).
    """

    def __init__(self, reader: IO[str], writer: IO[str], *, owner: socket.socket | None = None):
        self._reader = reader
        self._writer = writer
        self._socket = owner
        self._lock = threading.Lock()
        self._next_id = 0

    @classmethod
    def connect(cls, endpoint: str, timeout: float = 30.0) -> "RemoteBackend":
        """Open a TCP connection to ``host:port``."""
        host, sep, port_text = endpoint.rpartition(":")
        if not sep or not host:
            raise ProviderError(f"endpoint must look like host:port, got {endpoint!r}")
        try:
            port = int(port_text)
        except ValueError:
            raise ProviderError(f"endpoint port is not a number: {endpoint!r}") from None
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise ProviderError(f"cannot connect to {endpoint}: {exc}") from exc
        reader = sock.makefile("r", encoding="utf-8", newline="\n")
        writer = sock.makefile("w", encoding="utf-8", newline="\n")
        return cls(reader, writer, owner=sock)

    def call(self, op: str, args: dict[str, Any]) -> Any:
        with self._lock:
            self._next_id += 1
            request_id = self._next_id
            payload = json.dumps(
                {"id": request_id, "op": op, "args": args}, ensure_ascii=False
            )
            try:
                self._writer.write(payload + "\n")
                self._writer.flush()
                line = self._reader.readline()
            except OSError as exc:
                raise ProviderError(f"transport failure during {op}: {exc}") from exc
        if not line:
            raise ProviderError(f"backend closed the connection during {op}")
        try:
            message = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProviderError(f"backend sent invalid JSON: {line!r}") from exc
        if not isinstance(message, dict) or message.get("id") != request_id:
            raise ProviderError(
                f"response id mismatch: sent {request_id}, got {message!r}"
            )
        if "error" in message:
            raise ProviderError(f"backend error for {op}: {message['error']}")
        if "result" not in message:
            raise ProviderError(f"backend response carries neither result nor error: {message!r}")
        return message["result"]

    def close(self) -> None:
        for stream in (self._reader, self._writer):
            try:
                stream.close()
            except OSError:
                pass
        if self._socket is not None:
            try:
                self._socket.close()
            except OSError:
                pass


def _clean_word(raw: str) -> str:
    word = raw.strip()
    for marker in _SUBWORD_MARKERS:
        if word.startswith(marker):
            word = word[len(marker):]
    return word


class RemoteMaskedLM(MaskedLMProvider):
    """Masked-LM adapter over a remote backend.

    The backend is over-queried by ``over_query`` so that filtering subword
    fragments and punctuation can still fill the requested k. Point
    probabilities ride on the truncated top-``word_prob_topk`` distribution
    (the wire protocol has no point-lookup op); words beyond the truncation
    score 0.
    """

    vocab_kind = "remote"
    thread_safe = True  # serialized by the backend lock

    def __init__(
        self,
        backend: RemoteBackend,
        *,
        over_query: int = 2,
        word_prob_topk: int = 200,
        max_chars: int | None = None,
    ):
        if over_query < 1:
            raise ValueError("over_query must be >= 1")
        self._backend = backend
        self._over_query = over_query
        self.word_prob_topk = word_prob_topk
        self.max_chars = max_chars

    def masked_topk(self, pair: MaskedPair, k: int) -> list[tuple[str, float]]:
        check_topk_k(k)
        if self.max_chars is not None and len(pair.pair_text) > self.max_chars:
            raise SequenceTooLongError(
                f"pair text of {len(pair.pair_text)} chars exceeds limit {self.max_chars}"
            )
        raw = self._backend.call(
            "masked_topk",
            {
                "original": pair.original,
                "masked": pair.masked,
                "mask_offset": pair.mask_offset,
                "k": k * self._over_query,
            },
        )
        if not isinstance(raw, list):
            raise ProviderError(f"masked_topk result must be a list, got {type(raw).__name__}")
        best: dict[str, float] = {}
        for entry in raw:
            try:
                word_raw, prob = entry
                prob = float(prob)
            except (TypeError, ValueError) as exc:
                raise ProviderError(f"malformed masked_topk entry: {entry!r}") from exc
            if not 0.0 <= prob <= 1.0:
                raise ProviderError(f"probability out of [0, 1]: {entry!r}")
            word = _clean_word(str(word_raw))
            if not is_single_word(word):
                continue
            if word not in best or prob > best[word]:
                best[word] = prob
        ranked = sorted(best.items(), key=lambda pair_: (-pair_[1], pair_[0]))
        return ranked[:k]


class RemoteNLI(NLIProvider):
    thread_safe = True

    def __init__(self, backend: RemoteBackend):
        self._backend = backend

    def entail_prob(self, premise: str, hypothesis: str) -> float:
        check_nli_inputs(premise, hypothesis)
        result = self._backend.call("entail", {"premise": premise, "hypothesis": hypothesis})
        try:
            prob = float(result)
        except (TypeError, ValueError) as exc:
            raise ProviderError(f"entail result must be a number, got {result!r}") from exc
        if not 0.0 <= prob <= 1.0:
            raise ProviderError(f"entail probability out of [0, 1]: {prob}")
        return prob


class RemoteEmbedding(EmbeddingProvider):
    """Embedding adapter; the dimensionality is fixed by the first response
    and every later vector must match it."""

    thread_safe = True

    def __init__(self, backend: RemoteBackend, *, dim: int | None = None):
        self._backend = backend
        self.dim = dim if dim is not None else 0  # 0 = not yet observed

    def embed(self, word: str) -> np.ndarray:
        if not word:
            raise ValueError("word must be non-empty")
        result = self._backend.call("embed", {"word": word})
        try:
            vector = np.asarray(result, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ProviderError(f"embed result must be a numeric vector: {result!r}") from exc
        if vector.ndim != 1 or vector.size == 0:
            raise ProviderError(f"embed result must be a flat non-empty vector: {result!r}")
        if self.dim == 0:
            self.dim = int(vector.size)
        elif vector.size != self.dim:
            raise ProviderError(
                f"embedding length changed from {self.dim} to {vector.size} for {word!r}"
            )
        return vector
