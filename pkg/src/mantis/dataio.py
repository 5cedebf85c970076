"""Dataset, prediction and run-configuration file handling.

Dataset and prediction files are headerless UTF-8 TSV with no quoting:
``sentence<TAB>word[<TAB>suggestion...]``. Sentences containing tabs are
rejected at parse time. CRLF input is accepted; output always uses LF.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from mantis.core import RUN_IDS, GoldAnnotations, Instance, RunConfig, derive_gold
from mantis.errors import ConfigError, ParseError
from mantis.providers.lexicon import LEXICON_NAMES

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dataset:
    """Instances in file order, with per-instance gold when the file has it."""

    instances: tuple[Instance, ...]
    golds: tuple[GoldAnnotations, ...] | None
    path: str
    line_numbers: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.instances)


def read_dataset(path: str, expect_gold: bool) -> Dataset:
    """Parse a dataset or prediction TSV.

    Without gold, lines must have exactly two columns; with gold, every
    column after the second joins the suggestion multiset (possibly none).
    Blank lines are skipped with a warning.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            lines = [line.rstrip("\r\n") for line in handle]
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc}", path=path) from exc
    instances: list[Instance] = []
    golds: list[GoldAnnotations] = []
    numbers: list[int] = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            log.warning("%s:%d: skipping blank line", path, line_no)
            continue
        columns = line.split("\t")
        if expect_gold:
            if len(columns) < 2:
                raise ParseError(
                    f"expected at least 2 tab-separated columns, got {len(columns)}",
                    path=path,
                    line_no=line_no,
                )
        elif len(columns) != 2:
            raise ParseError(
                f"expected exactly 2 tab-separated columns, got {len(columns)}",
                path=path,
                line_no=line_no,
            )
        try:
            instance = Instance(sentence=columns[0], complex_word=columns[1])
        except ValueError as exc:
            raise ParseError(str(exc), path=path, line_no=line_no) from exc
        if expect_gold:
            suggestions = [c.strip() for c in columns[2:]]
            if any(not s for s in suggestions):
                raise ParseError("empty gold column", path=path, line_no=line_no)
            golds.append(derive_gold(suggestions))
        instances.append(instance)
        numbers.append(line_no)
    return Dataset(
        instances=tuple(instances),
        golds=tuple(golds) if expect_gold else None,
        path=path,
        line_numbers=tuple(numbers),
    )


def write_predictions(
    dataset: Dataset,
    outputs: Sequence[Sequence[str]],
    path: str,
) -> None:
    """Write one ``sentence<TAB>word<TAB>cand...`` line per instance, in
    dataset order, UTF-8 with LF endings. Round-trips through read_dataset."""
    if len(outputs) != len(dataset.instances):
        raise ValueError(
            f"{len(outputs)} outputs for {len(dataset.instances)} instances"
        )
    rendered: list[str] = []
    for instance, candidates in zip(dataset.instances, outputs):
        words = list(candidates)
        for word in words:
            if not word or any(ch in word for ch in "\t\n\r"):
                raise ValueError(f"candidate {word!r} cannot be written as a TSV field")
        if not words:
            log.warning("no candidates for target %r", instance.complex_word)
        if len(words) > 10:
            log.warning(
                "%d candidates for target %r exceed the 10-suggestion submission cap",
                len(words),
                instance.complex_word,
            )
        rendered.append("\t".join([instance.sentence, instance.complex_word, *words]))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in rendered:
            handle.write(line + "\n")


#: Keys accepted in run-configuration files.
_SCALAR_KEYS = (
    "run",
    "k_generate",
    "k_output",
    "context_window_m",
    "prune",
    "providers",
    "endpoint",
    "stub.vocab",
)
_WEIGHT_PREFIX = "weights."
_LEXICON_PREFIX = "lexicon."


@dataclass(frozen=True)
class ProviderSettings:
    """Where scores come from: offline stubs or a remote backend."""

    backend: str = "stub"
    endpoint: str | None = None
    lexicon_paths: dict[str, str] = field(default_factory=dict)
    stub_vocab_path: str | None = None


@dataclass(frozen=True)
class ConfigFile:
    """Parsed key=value configuration; None means the key was not given."""

    run_id: str | None = None
    k_generate: int | None = None
    k_output: int | None = None
    context_window_m: int | None = None
    prune: bool | None = None
    weights: dict[str, int] = field(default_factory=dict)
    providers: ProviderSettings = field(default_factory=ProviderSettings)


def _parse_positive_int(key: str, value: str, path: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise ConfigError(f"{path}: {key} must be an integer, got {value!r}") from None
    if number < 1:
        raise ConfigError(f"{path}: {key} must be >= 1, got {number}")
    return number


def read_config(path: str) -> ConfigFile:
    """Parse a flat ``key=value`` configuration file.

    Lines starting with ``#`` and blank lines are ignored. Unknown or
    duplicate keys are errors.
    """
    entries: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
                key = key.strip()
                value = value.strip()
                if key in entries:
                    raise ConfigError(f"{path}:{line_no}: duplicate key {key!r}")
                entries[key] = value
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path}: not valid UTF-8: {exc}") from exc

    run_id = None
    k_generate = k_output = context_window_m = None
    prune = None
    weights: dict[str, int] = {}
    backend = "stub"
    endpoint = None
    lexicon_paths: dict[str, str] = {}
    stub_vocab_path = None
    for key, value in entries.items():
        if key == "run":
            if value not in RUN_IDS:
                raise ConfigError(f"{path}: run must be one of {RUN_IDS}, got {value!r}")
            run_id = value
        elif key in ("k_generate", "k_output", "context_window_m"):
            number = _parse_positive_int(key, value, path)
            if key == "k_generate":
                k_generate = number
            elif key == "k_output":
                k_output = number
            else:
                context_window_m = number
        elif key == "prune":
            if value not in ("true", "false"):
                raise ConfigError(f"{path}: prune must be true or false, got {value!r}")
            prune = value == "true"
        elif key == "providers":
            if value not in ("stub", "remote"):
                raise ConfigError(f"{path}: providers must be stub or remote, got {value!r}")
            backend = value
        elif key == "endpoint":
            endpoint = value
        elif key == "stub.vocab":
            stub_vocab_path = value
        elif key.startswith(_WEIGHT_PREFIX):
            feature = key[len(_WEIGHT_PREFIX):]
            try:
                weight = int(value)
            except ValueError:
                raise ConfigError(f"{path}: {key} must be an integer, got {value!r}") from None
            if weight < 0:
                raise ConfigError(f"{path}: {key} must be >= 0, got {weight}")
            weights[feature] = weight
        elif key.startswith(_LEXICON_PREFIX):
            name = key[len(_LEXICON_PREFIX):]
            if name not in LEXICON_NAMES:
                raise ConfigError(
                    f"{path}: lexicon name must be one of {LEXICON_NAMES}, got {name!r}"
                )
            lexicon_paths[name] = value
        else:
            raise ConfigError(f"{path}: unknown key {key!r}")
    return ConfigFile(
        run_id=run_id,
        k_generate=k_generate,
        k_output=k_output,
        context_window_m=context_window_m,
        prune=prune,
        weights=weights,
        providers=ProviderSettings(
            backend=backend,
            endpoint=endpoint,
            lexicon_paths=lexicon_paths,
            stub_vocab_path=stub_vocab_path,
        ),
    )


def build_run_config(run_id: str, cfg: ConfigFile | None = None) -> RunConfig:
    """A RunConfig from the run's canonical preset plus file overrides.

    Weight overrides replace individual entries; weight 0 drops a feature.
    For ``mantis1`` pruning is pinned on regardless of the file (it is part
    of that run's definition); other runs may toggle it.
    """
    base = RunConfig.for_run(run_id)
    if cfg is None:
        return base
    weights = dict(base.feature_weights)
    for feature, weight in cfg.weights.items():
        if weight == 0:
            weights.pop(feature, None)
        else:
            weights[feature] = weight
    if not weights:
        raise ConfigError("weight overrides removed every feature")
    prune = base.prune_by_equivalence if cfg.prune is None else cfg.prune
    if run_id == "mantis1" and not prune:
        log.warning("run mantis1 always prunes by equivalence; ignoring prune=false")
        prune = True
    return RunConfig(
        run_id=run_id,
        feature_weights=weights,
        prune_by_equivalence=prune,
        k_generate=cfg.k_generate if cfg.k_generate is not None else base.k_generate,
        k_output=cfg.k_output if cfg.k_output is not None else base.k_output,
        context_window_m=(
            cfg.context_window_m if cfg.context_window_m is not None else base.context_window_m
        ),
    )
