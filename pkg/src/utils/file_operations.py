"""Report output: path validation, JSON and CSV rendering, and report files."""

import csv
import io
import json
import os
from pathlib import Path
from typing import Any, Dict, Final, List, Optional, Sequence, Union

# Type aliases for better readability
PathLike = Union[str, os.PathLike[str]]
ReportRow = Dict[str, Any]

CSV_COLUMNS: Final[List[str]] = ["command", "check_id", "params", "status", "pass"]


class FileOperationError(Exception):
    """A report or config path is unusable or cannot be written."""

    def __init__(self, message: str, path: Optional[PathLike] = None) -> None:
        """Initialize FileOperationError.

        Args:
            message: Error message
            path: Optional path that caused the error
        """
        super().__init__(message)
        self.path = path


def validate_path(path: PathLike) -> Path:
    """Validate and normalize a file system path.

    Args:
        path: Path to validate

    Returns:
        Validated Path object

    Raises:
        FileOperationError: If path is invalid
        TypeError: If path is not a valid path type
    """
    if not isinstance(path, (str, os.PathLike)):
        raise TypeError(f"Path must be str or PathLike, got {type(path).__name__}")

    try:
        # Reject parent directory references before resolving
        path_str = str(path)
        if ".." in Path(path_str).parts:
            raise FileOperationError(
                f"Path contains parent directory references: {path}", path
            )

        return Path(path).resolve()

    except (OSError, ValueError) as e:
        raise FileOperationError(f"Invalid path: {path}. Error: {e}", path) from e


def render_json(document: Dict[str, Any]) -> str:
    """Serialize a report document with sorted keys, so equal runs give equal bytes."""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render_csv(rows: Sequence[ReportRow]) -> str:
    """One line per check with the columns of CSV_COLUMNS."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: row.get(key, "") for key in CSV_COLUMNS})
    return buffer.getvalue()


def write_report(text: str, path: PathLike) -> Path:
    """Write rendered report text, creating the parent folder when needed.

    Args:
        text: Rendered JSON or CSV
        path: Output file

    Returns:
        The resolved output path

    Raises:
        FileOperationError: If the file cannot be written
        TypeError: If path is not a valid path type
    """
    out_path = validate_path(path)
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise FileOperationError(f"Failed to write report '{path}': {e}", path) from e
    return out_path
