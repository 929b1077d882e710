import json
import tempfile
import unittest
from io import StringIO
from pathlib import Path
from unittest.mock import Mock, patch

import numpy as np
import pandas as pd
from pandas.testing import assert_frame_equal

from mirrormass.utils.constants import SCHEMA_VERSION
from mirrormass.writer import DataWriter, OutputRecord


class TestDataWriter(unittest.TestCase):
    def setUp(self):
        self.df = pd.DataFrame(
            {
                "omega": [0.1, 1.0 / 3.0, 2.0],
                "delay": [np.pi, 1e-300, 0.5],
            }
        )
        self.record = OutputRecord.create("delay", {"omega_c": 1.0, "grid": "0.1:2:3"}, self.df)

    def test_create(self):
        self.assertEqual(self.record.schema_version, SCHEMA_VERSION)
        self.assertEqual(self.record.command, "delay")

    def test_to_dict(self):
        obj = self.record.to_dict()
        self.assertEqual(obj["columns"]["omega"], self.df["omega"].tolist())
        self.assertEqual(obj["parameters"], {"omega_c": 1.0, "grid": "0.1:2:3"})

    def test_csv_layout(self):
        buffer = StringIO()
        DataWriter().write_record(self.record, buffer)
        lines = buffer.getvalue().splitlines()
        self.assertEqual(lines[0], f"# schema_version: {SCHEMA_VERSION}")
        self.assertEqual(lines[1], "# command: delay")
        self.assertEqual(lines[2], '# parameters: {"grid": "0.1:2:3", "omega_c": 1.0}')
        self.assertEqual(lines[3], "omega,delay")
        self.assertEqual(lines[4], "0.10000000000000001,3.1415926535897931")
        self.assertEqual(len(lines), 7)

    def test_json_layout(self):
        buffer = StringIO()
        DataWriter().write_record(self.record, buffer, file_format="JSON")
        obj = json.loads(buffer.getvalue())
        self.assertEqual(obj["schema_version"], SCHEMA_VERSION)
        self.assertEqual(obj["command"], "delay")
        self.assertEqual(obj["columns"]["delay"], self.df["delay"].tolist())

    def test_read_record_is_exact(self):
        for file_format in ["csv", "json"]:
            with self.subTest(file_format=file_format):
                buffer = StringIO()
                DataWriter().write_record(self.record, buffer, file_format=file_format)
                buffer.seek(0)
                record = DataWriter.read_record(buffer)
                self.assertEqual(record.command, "delay")
                self.assertEqual(record.parameters, self.record.parameters)
                assert_frame_equal(record.columns, self.df, check_exact=True)

    def test_write_to_path(self):
        with tempfile.TemporaryDirectory() as tempd:
            path = Path(tempd) / "delay.csv"
            DataWriter().write_record(self.record, path)
            record = DataWriter.read_record(path)
        assert_frame_equal(record.columns, self.df, check_exact=True)

    def test_write_to_stdout(self):
        with patch("sys.stdout", new_callable=StringIO) as mock_stdout:
            DataWriter().write_record(self.record)
        self.assertTrue(mock_stdout.getvalue().startswith("# schema_version:"))

    def test_wrong_format(self):
        with self.assertRaises(KeyError):
            DataWriter().write_record(self.record, StringIO(), file_format="xlsx")

    def test_read_not_a_record(self):
        with self.assertRaises(ValueError):
            DataWriter.read_record(StringIO("omega,delay\n1,2\n"))

    def test_wandb_logging(self):
        mock_wandb_run = Mock()
        with patch("mirrormass.writer.log_dataframe_to_wandb") as mock_log:
            DataWriter("delay", mock_wandb_run).write_record(self.record, StringIO())
            DataWriter("verify", mock_wandb_run).write_record(
                self.record, StringIO(), frame_name="report"
            )
        mock_log.assert_any_call(mock_wandb_run, self.df, "delay", "delay")
        mock_log.assert_called_with(mock_wandb_run, self.df, "report", "verify")
