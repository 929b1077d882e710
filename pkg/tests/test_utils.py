import logging
import tempfile
import unittest
from io import StringIO
from pathlib import Path

import joblib
import numpy as np
from joblib import Parallel, delayed
from numpy.testing import assert_allclose, assert_array_equal
from tqdm import tqdm

from mirrormass.utils.commandline import (
    CmdOption,
    join_range_values,
    parse_band,
    parse_grid,
    parse_tolerance_overrides,
    setup_mirrormass_parser,
)
from mirrormass.utils.files import normalize_key, parse_flat_config, parse_json_with_comments
from mirrormass.utils.fitting import fit_line, fit_power_law
from mirrormass.utils.logging import (
    LogFormatter,
    close_handlers,
    get_file_logger,
    get_stream_logger,
    tqdm_joblib,
)


class TestParseGrid(unittest.TestCase):
    def test_log_grid(self):
        assert_allclose(parse_grid("1:100:3"), [1.0, 10.0, 100.0])
        assert_allclose(parse_grid("1:100:3:LOG"), [1.0, 10.0, 100.0])

    def test_linear_grid(self):
        assert_array_equal(parse_grid("-1:1:5:lin"), [-1.0, -0.5, 0.0, 0.5, 1.0])

    def test_single_point(self):
        assert_array_equal(parse_grid("2:2:1"), [2.0])
        assert_array_equal(parse_grid("-1:-1:1"), [-1.0])
        assert_array_equal(parse_grid("0:0:1:log"), [0.0])

    def test_invalid_grids(self):
        for spec in [
            "0:10",
            "1:2:3:4:5",
            "1:2:3:cubic",
            "a:2:3",
            "1:2:3.5",
            "1:2:0",
            "1:2:1",
            "2:1:5",
            "0:10:5",
            "-1:10:5:log",
            "1:inf:5",
        ]:
            with self.subTest(spec=spec):
                with self.assertRaises(ValueError):
                    parse_grid(spec)


class TestParseBandAndTolerances(unittest.TestCase):
    def test_band(self):
        self.assertEqual(parse_band("0:2.5"), (0.0, 2.5))
        self.assertEqual(parse_band([1, 1]), (1.0, 1.0))

    def test_invalid_band(self):
        for spec in ["1", "2:1", "-1:1", "0:inf", "a:b", [1, 2, 3]]:
            with self.subTest(spec=spec):
                with self.assertRaises(ValueError):
                    parse_band(spec)

    def test_tolerances(self):
        self.assertEqual(
            parse_tolerance_overrides(["spot_value=1e-3", " max_speed = 0.5", "spot_value=2"]),
            {"spot_value": 2.0, "max_speed": 0.5},
        )
        self.assertEqual(parse_tolerance_overrides([]), {})

    def test_invalid_tolerances(self):
        for specs in [["spot_value"], ["=1"], ["spot_value=small"]]:
            with self.subTest(specs=specs):
                with self.assertRaises(ValueError):
                    parse_tolerance_overrides(specs)


class TestParser(unittest.TestCase):
    def setUp(self):
        self.parser = setup_mirrormass_parser()

    def test_option_defaults(self):
        option = CmdOption(dest="grid", help="the grid")
        self.assertIsNone(option.longname)
        self.assertIsNone(option.action)

    def test_unset_flags_are_none(self):
        args = self.parser.parse_args(["mean-mass", "--cutoff", "10"])
        self.assertEqual(args.subcommand, "mean-mass")
        self.assertEqual(args.cutoff, "10")
        self.assertIsNone(args.omega_c)
        self.assertIsNone(args.dimensionless)

    def test_flags(self):
        args = self.parser.parse_args(
            ["spectrum", "--component", "mass", "--grid=-1:-1:1", "--omega-c", "2", "-o", "x.csv"]
        )
        self.assertEqual(args.component, "mass")
        self.assertEqual(args.grid, "-1:-1:1")
        self.assertEqual(args.omega_c, "2")
        self.assertEqual(args.out, "x.csv")

    def test_repeated_tolerances(self):
        args = self.parser.parse_args(["verify", "--tol", "a=1", "--tol", "b=2"])
        self.assertEqual(args.tolerances, ["a=1", "b=2"])

    def test_join_range_values(self):
        self.assertEqual(
            join_range_values(["spectrum", "--grid", "-1:-1:1", "--band", "-.5:1"]),
            ["spectrum", "--grid=-1:-1:1", "--band=-.5:1"],
        )
        self.assertEqual(
            join_range_values(["delay", "--grid", "0:1:3", "-o", "x.csv"]),
            ["delay", "--grid", "0:1:3", "-o", "x.csv"],
        )
        self.assertEqual(join_range_values(["delay", "--grid"]), ["delay", "--grid"])
        self.assertEqual(
            join_range_values(["delay", "--grid", "--format", "json"]),
            ["delay", "--grid", "--format", "json"],
        )

    def test_space_separated_negative_grid(self):
        args = self.parser.parse_args(join_range_values(["spectrum", "--grid", "-1:-1:1"]))
        self.assertEqual(args.grid, "-1:-1:1")

    def test_invalid_choice(self):
        with self.assertRaises(SystemExit):
            self.parser.parse_args(["spectrum", "--component", "f2f2"])


class TestFiles(unittest.TestCase):
    def test_normalize_key(self):
        for key in ["--omega-c", "omega-c", "omega_c", " OMEGA_C "]:
            with self.subTest(key=key):
                self.assertEqual(normalize_key(key), "omega_c")

    def test_parse_json_with_comments(self):
        with tempfile.TemporaryDirectory() as tempd:
            path = Path(tempd) / "config.json"
            path.write_text(
                '{\n  // the cut-off\n  "omega_c": 2.0, /* block\n comment */\n'
                '  "out": "http://example.org/x"\n}\n'
            )
            obj = parse_json_with_comments(path)
        self.assertEqual(obj, {"omega_c": 2.0, "out": "http://example.org/x"})

    def test_parse_flat_config(self):
        with tempfile.TemporaryDirectory() as tempd:
            path = Path(tempd) / "config.cfg"
            path.write_text("# comment\nomega-c = 2\n\n--mass-channel\n--seed 4\n")
            config = parse_flat_config(path)
        self.assertEqual(config, {"omega_c": "2", "mass_channel": "true", "seed": "4"})


class TestFitting(unittest.TestCase):
    def test_fit_line(self):
        x = np.arange(10.0)
        fit = fit_line(x, 3.0 + 2.0 * x)
        self.assertAlmostEqual(fit.slope, 2.0, places=12)
        self.assertAlmostEqual(fit.intercept, 3.0, places=12)
        self.assertAlmostEqual(fit.slope_standard_error, 0.0, places=10)
        self.assertEqual(fit.nobs, 10)
        self.assertEqual(
            list(fit.to_frame().columns), ["slope", "intercept", "slope_standard_error", "nobs"]
        )

    def test_fit_power_law(self):
        x = np.geomspace(1e-3, 1e-2, 20)
        fit = fit_power_law(x, 7.0 * x**3)
        self.assertAlmostEqual(fit.slope, 3.0, places=10)
        self.assertAlmostEqual(10**fit.intercept, 7.0, places=8)

    def test_invalid_fits(self):
        with self.assertRaises(ValueError):
            fit_line([1.0, 2.0], [1.0, 2.0])
        with self.assertRaises(ValueError):
            fit_line([1.0, 2.0, 3.0], [1.0, 2.0])
        with self.assertRaises(ValueError):
            fit_power_law([1.0, 0.0, 3.0], [1.0, 2.0, 3.0])


class TestLogging(unittest.TestCase):
    def make_record(self, level, msg):
        return logging.LogRecord("mirrormass", level, "spectra.py", 12, msg, None, None)

    def test_log_formatter(self):
        formatter = LogFormatter()
        self.assertEqual(formatter.format(self.make_record(logging.INFO, "done")), "done")
        self.assertEqual(
            formatter.format(self.make_record(logging.WARNING, "slow")), "WARNING: slow"
        )
        self.assertEqual(formatter.format(self.make_record(logging.ERROR, "bad")), "ERROR: bad")
        self.assertTrue(
            formatter.format(self.make_record(logging.DEBUG, "x")).startswith("DEBUG: spectra: 12")
        )

    def test_stream_logger(self):
        stream = StringIO()
        logger = get_stream_logger("mirrormass.test_stream", stream)
        logger.info("first")
        logger = get_stream_logger("mirrormass.test_stream", stream)
        logger.warning("second")
        logger.debug("hidden")
        self.assertEqual(stream.getvalue(), "first\nWARNING: second\n")
        close_handlers(logger)

    def test_file_logger(self):
        with tempfile.TemporaryDirectory() as tempd:
            log_file = Path(tempd) / "run.log"
            logger = get_file_logger("mirrormass.test_file", str(log_file))
            logger.info("written")
            close_handlers(logger)
            self.assertEqual(logger.handlers, [])
            self.assertEqual(log_file.read_text(), "written\n")

    def test_tqdm_joblib(self):
        original_callback = joblib.parallel.BatchCompletionCallBack
        progress = tqdm(total=4, file=StringIO())
        with tqdm_joblib(progress):
            results = Parallel(n_jobs=1)(delayed(abs)(value) for value in [-1, -2, 3, -4])
        self.assertEqual(results, [1, 2, 3, 4])
        self.assertIs(joblib.parallel.BatchCompletionCallBack, original_callback)
