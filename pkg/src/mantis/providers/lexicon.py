"""Word-to-value lexicons: corpus frequency and the two word-prevalence tables."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from mantis.errors import ParseError

log = logging.getLogger(__name__)

LEXICON_NAMES = ("freq", "wp_crowd", "wp_corp")


@dataclass(frozen=True)
class Lexicon:
    """Immutable token -> value table; lookups are case-insensitive."""

    name: str
    table: dict[str, float]

    def __post_init__(self) -> None:
        if self.name not in LEXICON_NAMES:
            raise ValueError(f"lexicon name must be one of {LEXICON_NAMES}, got {self.name!r}")
        for word, value in self.table.items():
            if word != word.lower():
                raise ValueError(f"lexicon words must be lowercased, got {word!r}")
            if not math.isfinite(value):
                raise ValueError(f"lexicon value for {word!r} must be finite")

    def lookup(self, word: str) -> float | None:
        """Value for the word, or None when out of vocabulary."""
        return self.table.get(word.lower())

    def __len__(self) -> int:
        return len(self.table)


def load_lexicon(path: str, name: str) -> Lexicon:
    """Read a ``word<TAB>value`` TSV (UTF-8, no header) into a lexicon.

    Duplicate words keep the last value, with a warning.
    """
    table: dict[str, float] = {}
    try:
        with open(path, encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle, start=1):
                line = raw.rstrip("\r\n")
                if not line:
                    continue
                columns = line.split("\t")
                if len(columns) != 2:
                    raise ParseError(
                        f"expected 2 tab-separated columns, got {len(columns)}",
                        path=path,
                        line_no=line_no,
                    )
                word = columns[0].strip().lower()
                if not word:
                    raise ParseError("empty word column", path=path, line_no=line_no)
                try:
                    value = float(columns[1])
                except ValueError:
                    raise ParseError(
                        f"not a number: {columns[1]!r}", path=path, line_no=line_no
                    ) from None
                if not math.isfinite(value):
                    raise ParseError(
                        f"value must be finite, got {columns[1]!r}", path=path, line_no=line_no
                    )
                if word in table:
                    log.warning("%s:%d: duplicate word %r, last value wins", path, line_no, word)
                table[word] = value
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc}", path=path) from exc
    return Lexicon(name=name, table=table)
