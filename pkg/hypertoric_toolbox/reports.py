"""
Reports: assembly, deterministic serialization and persistence to flat files.
"""

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from pandas import DataFrame as pd_DataFrame

from .core import SCHEMA_VERSION, TOOL_VERSION, canonical_json
from .file_formats import formats


def flat_dictionary(data: dict, prefix: str = "") -> dict:
    """
    Recursively flattens a nested dictionary into a single-level dictionary.

    Keys are created using underscore-separated format; lists of dictionaries
    are indexed, other lists are joined with ", ".
    """
    result = {}

    for key, value in data.items():
        new_key = f"{prefix}_{key}" if prefix else key

        if isinstance(value, dict):
            result.update(flat_dictionary(value, new_key))
        elif isinstance(value, list):
            if value and isinstance(value[0], dict):
                for idx, item in enumerate(value):
                    result.update(flat_dictionary(item, f"{new_key}_{idx}"))
            else:
                result[new_key] = ", ".join(str(v) for v in value)
        else:
            result[new_key] = value

    return result


@dataclass
class Report:
    """Outcome of one command. Everything but `elapsed` is part of the machine format."""
    command: str
    input_hash: str
    results: dict
    elapsed: float = field(default=0.0, compare=False)
    schema: str = SCHEMA_VERSION
    tool_version: str = TOOL_VERSION
    table: Optional[pd_DataFrame] = field(default=None, compare=False, repr=False)

    def export_to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "tool_version": self.tool_version,
            "command": self.command,
            "input_hash": self.input_hash,
            "results": self.results,
        }

    def to_json(self) -> str:
        return canonical_json(self.export_to_dict()) + "\n"

    def to_text(self) -> str:
        lines = [
            f"{self.schema}  {self.command}",
            f"tool {self.tool_version}  input {self.input_hash}",
            "",
        ]
        flat = flat_dictionary(self.results)
        width = max((len(key) for key in flat), default=0)
        lines += [f"{key.ljust(width)}  {value}" for key, value in sorted(flat.items())]
        lines += ["", f"elapsed {self.elapsed:.3f} s"]
        return "\n".join(lines) + "\n"

    def render(self, file_format: str = "json") -> str:
        formats.is_format_available(file_format, reports_only=True)
        return getattr(self, formats.get_format_class(file_format).report_renderer)()


def save_report(report: Report, path: Union[str, Path], file_format: str = "json") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.render(file_format), encoding="utf-8")
    print(f"Report written: {path}", file=sys.stderr)
    return path


def save_df(df: pd_DataFrame, file_name: str, folder: Optional[Union[str, Path]] = None,
            file_format: str = "csv") -> Path:
    """
    Write a DataFrame with the pandas writer of the chosen format.

    Args:
        df (pd_DataFrame): table to write
        file_name (str): file name without extension
        folder: target folder, the working directory if not given
        file_format (str): 'csv', 'json', 'text', 'parquet' or 'excel'
    """
    config = formats.get_format_class(file_format)

    folder = Path(folder) if folder else Path.cwd()
    folder.mkdir(parents=True, exist_ok=True)
    full_path = folder / f"{file_name}.{config.extension}"

    config.write_table(df, full_path)
    print(f"Table written: {full_path} ({len(df)} rows)", file=sys.stderr)
    return full_path
