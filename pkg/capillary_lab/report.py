import csv
import json
import math
from dataclasses import dataclass
from os import PathLike
from pathlib import Path
from typing import Any, Optional, Union

from capillary_lab.exceptions import ConfigError
from capillary_lab.types import Quantity


@dataclass
class Report:
    """Object that is filled on each experiment run"""

    __slots__ = (
        "command",
        "config",
        "results",
        "verdict",
        "tolerances",
        "version",
        "elapsed",
        "columns",
        "rows",
        "notes",
    )
    command: str
    config: dict
    results: dict[str, Quantity]
    verdict: Optional[str]
    tolerances: dict[str, float]
    version: str
    elapsed: float
    columns: list[str]
    rows: list[list[float]]
    notes: list[str]

    def __init__(
        self,
        command: str,
        config: dict,
        results: Optional[dict[str, Quantity]] = None,
        verdict: Optional[str] = None,
        tolerances: Optional[dict[str, float]] = None,
        version: str = "",
        elapsed: float = 0.0,
        columns: Optional[list[str]] = None,
        rows: Optional[list[list[float]]] = None,
        notes: Optional[list[str]] = None,
    ) -> None:
        self.command = command
        self.config = config
        self.results = {} if results is None else results
        self.verdict = verdict
        self.tolerances = {} if tolerances is None else tolerances
        self.version = version
        self.elapsed = elapsed
        self.columns = [] if columns is None else columns
        self.rows = [] if rows is None else rows
        self.notes = [] if notes is None else notes

    def add(
        self, name: str, value: Any, tolerance: Optional[float] = None
    ) -> "Report":
        self.results[name] = quantity(value, tolerance)
        return self

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.__slots__}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        unknown = set(data) - set(cls.__slots__)
        if unknown:
            raise ConfigError(f"Unknown report fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as error:
            raise ConfigError(
                f"Malformed report at line {error.lineno}, column {error.colno}: "
                f"{error.msg}"
            )
        return cls.from_dict(data)


def quantity(value: Any, tolerance: Optional[float] = None) -> Quantity:
    """
    A value with the tolerance it was checked against.

    A None tolerance marks an informational value such as an input, a seed,
    a coefficient list or a flag.
    """
    if hasattr(value, "tolist"):
        value = value.tolist()
    if isinstance(value, float) and not math.isfinite(value):
        value = None
    return Quantity(value=value, tolerance=tolerance)


def _cell(value: Any) -> str:
    if not isinstance(value, float):
        return str(value)
    return format(value, ".17g")


def write_report(report: Report, path: Union[PathLike[str], str, Path]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(report.to_json())
    return path


def emit_csv(report: Report, path: Union[PathLike[str], str, Path]) -> Path:
    """
    Write the report's table as CSV: header row, 17 significant digits and
    LF line endings. A report without rows yields the header only.

    Raises:
        OSError: If the path is not writable.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_cell(value) for value in row])
    return path
