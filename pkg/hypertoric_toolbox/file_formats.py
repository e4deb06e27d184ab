"""
Output formats: how reports are rendered and how scan tables are written.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from pandas import DataFrame as pd_DataFrame

from .core import InputError


@dataclass(frozen=True)
class FileFormat:
    """An output format.

    Tables are written with the pandas method `method_name`; reports are rendered
    with the Report method `report_renderer`, or not at all when it is None.
    """
    name: str
    extension: str
    method_name: str
    pd_kwargs: Optional[dict] = field(default_factory=dict)
    report_renderer: Optional[str] = None

    @property
    def renders_reports(self) -> bool:
        return self.report_renderer is not None

    def write_table(self, df: pd_DataFrame, path: Path) -> None:
        getattr(df, self.method_name)(path, **self.pd_kwargs)

    def export_to_dict(self) -> dict:
        return self.__dict__.copy()

    def __str__(self) -> str:
        return f"{self.name} ({self.extension})"


JsonFormat = FileFormat("json", "json", "to_json", {"orient": "records"}, report_renderer="to_json")
TextFormat = FileFormat("text", "txt", "to_string", {"index": False}, report_renderer="to_text")
CsvFormat = FileFormat("csv", "csv", "to_csv", {"index": False, "encoding": "utf-8"})
ParquetFormat = FileFormat("parquet", "parquet", "to_parquet", {"index": False, "engine": "pyarrow"})
ExcelFormat = FileFormat("excel", "xlsx", "to_excel", {"index": False, "engine": "openpyxl"})


@dataclass
class FileFormats:
    """Registry of the output formats, looked up by name."""
    json: FileFormat = JsonFormat
    text: FileFormat = TextFormat
    csv: FileFormat = CsvFormat
    parquet: FileFormat = ParquetFormat
    excel: FileFormat = ExcelFormat

    def _registered(self) -> list[FileFormat]:
        return [value for value in vars(self).values() if isinstance(value, FileFormat)]

    def get_format_class(self, file_format: str) -> FileFormat:
        self.is_format_available(file_format)
        return getattr(self, file_format)

    def get_extension(self, file_format: str) -> str:
        return self.get_format_class(file_format).extension

    def export_formats_to_dict(self) -> dict:
        return {config.name: config.export_to_dict() for config in self._registered()}

    def get_available_formats(self, as_set: bool = False, reports_only: bool = False):
        names = [config.name for config in self._registered()
                 if config.renders_reports or not reports_only]
        return set(names) if as_set else names

    def is_format_available(self, file_format: str, raise_error: bool = True,
                            reports_only: bool = False) -> bool:
        available = self.get_available_formats(reports_only=reports_only)
        if file_format in available:
            return True
        if raise_error:
            raise InputError(f"Unsupported format: {file_format}. Available formats: [{', '.join(available)}].")
        return False


formats = FileFormats()
