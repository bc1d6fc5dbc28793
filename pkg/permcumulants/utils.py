"""Utility functions: logging, config files and output documents."""
import json
import logging
import sys
from collections.abc import Mapping, Sequence
from enum import Enum
from fractions import Fraction
from importlib import metadata
from pathlib import Path
from typing import Any, Final, Optional, TextIO

import numpy as np
import pandas as pd
import yaml
from jsonschema.exceptions import ValidationError
from jsonschema.validators import validate
from prettytable import PrettyTable

from permcumulants.base import StructureError

SCHEMA_VERSION: Final[str] = "1.0"

CONFIG_SCHEMA_PATH: Final[Path] = (
    Path(__file__).parent / "json_schemas/config_schema.json"
)
REPORT_SCHEMA_PATH: Final[Path] = (
    Path(__file__).parent / "json_schemas/report_schema.json"
)

# Significant digits for Monte-Carlo numbers in documents.
FLOAT_DIGITS: Final[int] = 15

# This is the main logger that the other modules of permcumulants should use for output.
# conf_logger() should be called once, as early as possible, to configure this logger.
logger = logging.getLogger("permcumulants")


def info_or_lower(record: logging.LogRecord) -> bool:
    """Allow records with level of INFO or lower."""
    return record.levelno in (logging.DEBUG, logging.INFO)


def warning_or_higher(record: logging.LogRecord) -> bool:
    """Allow records with level of WARNING or higher."""
    return record.levelno in (logging.WARNING, logging.ERROR, logging.CRITICAL)


class StderrHandler(logging.Handler):
    """
    A handler that writes to stderr.
    We aren't using StreamHandler because that confuses typer.testing.CliRunner
    """
    def flush(self) -> None:
        self.acquire()
        try:
            sys.stderr.flush()
        finally:
            self.release()

    def emit(self, record: logging.LogRecord) -> None:
        try:
            msg = self.format(record)
            sys.stderr.write(msg + "\n")
            sys.stderr.flush()
        except RecursionError:
            raise
        except Exception:  # pylint: disable=broad-exception-caught
            self.handleError(record)


def conf_logger(verbose: bool) -> None:
    """Configure the logger."""
    # Note that this function modifies the global `logger`.
    # Standard output carries the documents, so everything is logged to stderr.
    progress_handler = StderrHandler()
    progress_handler.setFormatter(logging.Formatter("%(message)s"))
    progress_handler.addFilter(info_or_lower)

    problem_handler = StderrHandler()
    problem_handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    problem_handler.addFilter(warning_or_higher)

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[progress_handler, problem_handler],
        force=True,
    )


def _load_schema(path: Path) -> dict:
    schema = json.loads(path.read_text(encoding="UTF-8"))
    assert isinstance(schema, dict)
    return schema


def read_config_file(path: str | Path) -> dict:
    """Read a YAML run file and check it against the config schema.

    Args:
        path: The path to a YAML-format run file.

    Returns:
        The run file as a dictionary.

    Raises:
        StructureError: if the file is not a mapping or does not match the schema.
    """
    with open(path, "r", encoding="utf8") as f:
        config = yaml.safe_load(f)

    if config is None:
        return {}
    if not isinstance(config, dict):
        raise StructureError(f"{path} does not hold a mapping")

    try:
        validate(config, _load_schema(CONFIG_SCHEMA_PATH))
    except ValidationError as e:
        logger.error("The config file is invalid: %s", e.message)
        raise StructureError(f"invalid config file {path}: {e.message}") from e

    return config


def validate_document(document: Mapping[str, Any]) -> None:
    """Raise ``jsonschema.ValidationError`` if ``document`` breaks the report schema."""
    validate(document, _load_schema(REPORT_SCHEMA_PATH))


def package_version() -> str:
    """Installed version of the package, or "unknown" when running from a checkout."""
    try:
        return metadata.version("permcumulants")
    except metadata.PackageNotFoundError:
        return "unknown"


def exact_text(value: Fraction | int) -> str:
    """Exact rational as ``"p/q"`` (or ``"p"`` for integers)."""
    return str(Fraction(value))


def round_float(value: float) -> float:
    """Round to ``FLOAT_DIGITS`` significant digits for reports."""
    value = float(value)
    if not np.isfinite(value):
        return value
    return float(f"{value:.{FLOAT_DIGITS}g}")


def to_jsonable(value: Any) -> Any:
    """Convert numbers and containers to values that json can write deterministically."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return exact_text(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value == float("-inf"):
            return "-inf"
        return round_float(value)
    if isinstance(value, Mapping):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_jsonable(item) for item in items]
    if hasattr(value, "to_json"):
        return to_jsonable(value.to_json())
    return str(value)


def make_document(
    command: str,
    config: Mapping[str, Any],
    result: Any,
    **extra: Any,
) -> dict[str, Any]:
    """Build an output document in the layout of the report schema."""
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": to_jsonable(config),
        "result": to_jsonable(result),
    }
    for key, value in extra.items():
        document[key] = to_jsonable(value)
    return document


def flatten(value: Any, prefix: str = "") -> list[tuple[str, Any]]:
    """Flatten nested mappings and lists into ``(dotted.key, scalar)`` pairs."""
    if isinstance(value, Mapping):
        pairs: list[tuple[str, Any]] = []
        for key, item in value.items():
            pairs.extend(flatten(item, f"{prefix}.{key}" if prefix else str(key)))
        return pairs
    if isinstance(value, list) and any(isinstance(v, (Mapping, list)) for v in value):
        pairs = []
        for index, item in enumerate(value):
            pairs.extend(flatten(item, f"{prefix}.{index}" if prefix else str(index)))
        return pairs
    if isinstance(value, list):
        return [(prefix, ",".join(str(v) for v in value))]
    return [(prefix, value)]


class OutputFormat(str, Enum):
    """Formats every command can write."""

    JSON = "json"
    CSV = "csv"
    PRETTY = "pretty"


def _table_frame(document: Mapping[str, Any], table: Optional[Sequence[Mapping]]) -> pd.DataFrame:
    if table:
        return pd.DataFrame([to_jsonable(row) for row in table])
    pairs = flatten(document.get("result"), "result")
    if "verdict" in document:
        pairs.append(("verdict", document["verdict"]))
    return pd.DataFrame(pairs, columns=["key", "value"])


def render_document(
    document: Mapping[str, Any],
    fmt: OutputFormat = OutputFormat.JSON,
    table: Optional[Sequence[Mapping]] = None,
) -> str:
    """Render a document in one of the output formats."""
    if fmt == OutputFormat.JSON:
        return json.dumps(document, sort_keys=True, indent=2) + "\n"
    frame = _table_frame(document, table)
    if fmt == OutputFormat.CSV:
        return str(frame.to_csv(index=False, lineterminator="\n"))
    pretty = PrettyTable()
    pretty.field_names = [str(column) for column in frame.columns]
    for row in frame.itertuples(index=False):
        pretty.add_row([_pretty_cell(cell) for cell in row])
    pretty.align = "l"
    return f"{document['command']}\n{pretty.get_string()}\n"


def _pretty_cell(cell: Any) -> str:
    if isinstance(cell, (list, tuple)):
        return ",".join(str(item) for item in cell)
    return str(cell)


def write_document(
    document: Mapping[str, Any],
    fmt: OutputFormat = OutputFormat.JSON,
    output: Optional[Path] = None,
    table: Optional[Sequence[Mapping]] = None,
    stream: Optional[TextIO] = None,
) -> None:
    """Write a rendered document to ``output``, or to ``stream`` (standard output by default)."""
    text = render_document(document, fmt, table)
    if output is None:
        (stream or sys.stdout).write(text)
        return
    output.write_text(text, encoding="utf-8")
    logger.debug("Wrote %s output to %s.", fmt.value, output)


def write_raw_csv(path: Path, values: np.ndarray, columns: Sequence[str]) -> None:
    """Write one row per sample, for plotting outside the package."""
    frame = pd.DataFrame(np.atleast_2d(values.T).T, columns=list(columns))
    frame.index.name = "sample"
    frame.to_csv(path, lineterminator="\n")
    logger.debug("Wrote %d raw samples to %s.", len(frame), path)


def parse_int_list(text: str) -> list[int]:
    """Parse ``"1,3,5"`` (or a JSON array) into a list of integers."""
    text = text.strip()
    if text.startswith("["):
        values = json.loads(text)
    else:
        values = [item for item in text.split(",") if item.strip()]
    try:
        return [int(item) for item in values]
    except (TypeError, ValueError) as e:
        raise StructureError(f"not a list of integers: {text!r}") from e
