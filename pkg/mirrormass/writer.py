"""Classes for writing command output records to disk or to a stream."""

import json
import sys
from dataclasses import dataclass
from io import StringIO
from pathlib import Path
from typing import IO, Any, Dict, Optional, Union

import pandas as pd
from wandb.sdk.lib import RunDisabled
from wandb.wandb_run import Run

from .utils.constants import OUTPUT_FORMATS, SCHEMA_VERSION
from .utils.wandb import log_dataframe_to_wandb

PathOrBuffer = Union[str, Path, IO[str], None]

# 17 significant digits reproduce every double exactly
FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class OutputRecord:
    """
    The output of one command.

    Parameters
    ----------
    schema_version : str
        Version of the record layout.
    command : str
        The command that produced the record.
    parameters : Dict[str, Any]
        Every input of the command, enough to rerun it.
    columns : pandas.DataFrame
        The named output series, one column each.
    """

    schema_version: str
    command: str
    parameters: Dict[str, Any]
    columns: pd.DataFrame

    @classmethod
    def create(cls, command: str, parameters: Dict[str, Any], df: pd.DataFrame) -> "OutputRecord":
        """Create a record with the current schema version."""
        return cls(SCHEMA_VERSION, command, dict(parameters), df)

    def to_dict(self) -> Dict[str, Any]:
        """Convert the record into JSON-serializable values."""
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "parameters": self.parameters,
            "columns": {name: self.columns[name].tolist() for name in self.columns.columns},
        }


class DataWriter:
    """Class to write out output records."""

    def __init__(
        self,
        context: Optional[str] = None,
        wandb_run: Union[Run, RunDisabled, None] = None,
    ):
        """
        Initialize the DataWriter object.

        Parameters
        ----------
        context : Optional[str]
            The command in which this writer is used.
            Defaults to ``None``.
        wandb_run : Union[wandb.wandb_run.Run, wandb.sdk.lib.RunDisabled, None]
            The wandb run object if wandb is enabled, None otherwise.
            If enabled, every written frame is also logged to this run
            as a table.
            Defaults to ``None``.
        """
        self.context = context
        self.wandb_run = wandb_run

    @staticmethod
    def _write_csv(record: OutputRecord, handle: IO[str]) -> None:
        handle.write(f"# schema_version: {record.schema_version}\n")
        handle.write(f"# command: {record.command}\n")
        handle.write(f"# parameters: {json.dumps(record.parameters, sort_keys=True)}\n")
        record.columns.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    @staticmethod
    def _write_json(record: OutputRecord, handle: IO[str]) -> None:
        json.dump(record.to_dict(), handle, indent=4, separators=(",", ": "))
        handle.write("\n")

    def write_record(
        self,
        record: OutputRecord,
        path_or_buffer: PathOrBuffer = None,
        file_format: str = "csv",
        frame_name: Optional[str] = None,
    ) -> None:
        """
        Write a record as CSV or JSON.

        The CSV layout starts with ``#`` lines echoing the schema version, the
        command and the parameters (as JSON), followed by a header row and
        one row per sample with numbers written to 17 significant digits.
        The JSON layout is the record as a single object.

        Parameters
        ----------
        record : OutputRecord
            The record to write.
        path_or_buffer : Union[str, Path, IO[str], None]
            A file path, an open text stream, or ``None`` for standard output.
            Defaults to ``None``.
        file_format : str
            One of {``"csv"``, ``"json"``}.
            Defaults to ``"csv"``.
        frame_name : Optional[str]
            Name of the table in wandb; the command name if ``None``.
            Defaults to ``None``.

        Raises
        ------
        KeyError
            If ``file_format`` is not valid.
        """
        file_format = file_format.lower()
        if file_format not in OUTPUT_FORMATS:
            raise KeyError(
                f"Please make sure that the `file_format` specified is one of "
                f"the following:\n{{{', '.join(OUTPUT_FORMATS)}}}.\nYou specified {file_format}."
            )
        writer = self._write_csv if file_format == "csv" else self._write_json

        if path_or_buffer is None:
            writer(record, sys.stdout)
        elif isinstance(path_or_buffer, (str, Path)):
            with open(path_or_buffer, "w", newline="") as handle:
                writer(record, handle)
        else:
            writer(record, path_or_buffer)

        log_dataframe_to_wandb(
            self.wandb_run, record.columns, frame_name or record.command, self.context
        )

    @staticmethod
    def read_record(path_or_buffer: Union[str, Path, IO[str]]) -> OutputRecord:
        """
        Read a record written by :meth:`write_record`.

        The format is detected from the content: JSON records start with
        ``{``, CSV records with the ``#`` echo lines.

        Parameters
        ----------
        path_or_buffer : Union[str, Path, IO[str]]
            A file path or an open text stream.

        Returns
        -------
        record : OutputRecord
            The record, with floats parsed back exactly.

        Raises
        ------
        ValueError
            If the content is not a record.
        """
        if isinstance(path_or_buffer, (str, Path)):
            content = Path(path_or_buffer).read_text()
        else:
            content = path_or_buffer.read()

        if content.lstrip().startswith("{"):
            obj = json.loads(content)
            return OutputRecord(
                obj["schema_version"],
                obj["command"],
                obj["parameters"],
                pd.DataFrame(obj["columns"]),
            )

        lines = content.splitlines(keepends=True)
        echo: Dict[str, str] = {}
        while lines and lines[0].startswith("#"):
            key, _, value = lines.pop(0)[1:].partition(":")
            echo[key.strip()] = value.strip()
        if set(echo) != {"schema_version", "command", "parameters"}:
            raise ValueError("The content does not start with the record echo lines.")

        df = pd.read_csv(StringIO("".join(lines)), float_precision="round_trip")
        return OutputRecord(
            echo["schema_version"], echo["command"], json.loads(echo["parameters"]), df
        )
