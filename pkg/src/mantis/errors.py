"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: data-shaped problems (bad files,
misaligned inputs, impossible requests) exit 2, backend problems exit 3.
"""


class MantisError(Exception):
    """Base class for all toolkit errors."""


class DataError(MantisError):
    """Invalid input data: malformed files, misaligned inputs, duplicates."""


class ParseError(DataError):
    """A file could not be parsed; carries the path and 1-based line number."""

    def __init__(self, message: str, path: str | None = None, line_no: int | None = None):
        self.path = path
        self.line_no = line_no
        where = ""
        if path is not None:
            where = f"{path}:" if line_no is None else f"{path}:{line_no}: "
        super().__init__(f"{where}{message}")


class ConfigError(DataError):
    """A configuration file contains an unknown key or an invalid value."""


class TargetNotFoundError(DataError):
    """The complex word does not occur as a token in its sentence."""


class EmptyCandidateSetError(MantisError):
    """Filtering removed every generated substitution candidate."""


class MissingFeatureError(MantisError):
    """A run configuration demands a feature nothing has scored or can score."""


class DegenerateRankingError(MantisError):
    """No trial instance carries a usable gold frequency ranking."""


class DegenerateColumnError(DataError):
    """A results-table column has zero variance; correlation is undefined."""


class DuplicatePredictionError(DataError):
    """A prediction list contains the same word twice (ties are forbidden)."""


class ProviderError(MantisError):
    """A model backend failed: transport error, bad response, model error."""


class SequenceTooLongError(ProviderError):
    """The encoded sentence pair exceeds the provider's supported length."""
