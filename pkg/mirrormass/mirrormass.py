#!/usr/bin/env python
"""
Run the mirrormass commands.

Each ``run_*`` function takes a configuration (file, dictionary or
:class:`~mirrormass.configuration_parser.Configuration`), computes its
table, writes it as an :class:`~mirrormass.writer.OutputRecord` and
returns the record. :func:`main` is the command-line entry point.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from wandb.sdk.lib import RunDisabled
from wandb.wandb_run import Run

from .configuration_parser import Configuration, ConfigurationParser, configure, merge_settings
from .dynamics import SimulationConfig, run_trajectory
from .scattering import phase_shift, reflection_delay
from .spectra import (
    SpectrumMethod,
    compute_spectrum,
    dimensionless_scale,
    log_grid,
    mean_induced_mass,
    mean_mass_scale,
)
from .utils.commandline import join_range_values, parse_grid, setup_mirrormass_parser
from .utils.constants import (
    EXIT_NUMERICAL_FAILURE,
    EXIT_SUCCESS,
    EXIT_USAGE_ERROR,
    EXIT_VERIFICATION_FAILURE,
)
from .utils.logging import close_handlers, get_file_logger, get_stream_logger
from .utils.wandb import init_wandb_run, log_dataframe_to_wandb
from .verifier import Verifier
from .writer import DataWriter, OutputRecord

ConfigInput = Union[str, Path, Dict[str, Any], Configuration]
WandbRun = Union[Run, RunDisabled, None]


def _frequencies(configuration: Configuration) -> np.ndarray:
    if configuration["grid"] is None:
        return log_grid(configuration.model())
    return parse_grid(configuration["grid"])


def _write(configuration: Configuration, record: OutputRecord, wandb_run: WandbRun) -> None:
    writer = DataWriter(context=configuration.context, wandb_run=wandb_run)
    writer.write_record(record, configuration["out"], configuration["format"])


def run_delay(
    config_file_or_obj_or_dict: ConfigInput,
    logger: Optional[logging.Logger] = None,
    wandb_run: WandbRun = None,
) -> OutputRecord:
    """
    Tabulate the reflection delay and the phase shift on a frequency grid.

    Parameters
    ----------
    config_file_or_obj_or_dict : Union[str, Path, Dict[str, Any], Configuration]
        The settings of the ``delay`` command.
    logger : Optional[logging.Logger]
        A Logger object. If ``None`` is passed, get logger from ``__name__``.
        Defaults to ``None``.
    wandb_run : Union[wandb.wandb_run.Run, wandb.sdk.lib.RunDisabled, None]
        A wandb run to log the table to.
        Defaults to ``None``.

    Returns
    -------
    record : OutputRecord
        The written record with the columns ``omega``, ``delay`` and
        ``phase_shift``.
    """
    logger = logger if logger else logging.getLogger(__name__)
    configuration = configure("delay", config_file_or_obj_or_dict)
    model = configuration.model()

    omegas = _frequencies(configuration)
    logger.info(f"Tabulating the reflection delay at {len(omegas)} frequencies.")
    delays = np.atleast_1d(reflection_delay(model, omegas))
    shifts = np.atleast_1d(phase_shift(model, omegas))

    scale = model.omega_c if configuration["dimensionless"] else 1.0
    df_delay = pd.DataFrame({"omega": omegas / scale, "delay": delays * scale, "phase_shift": shifts})

    record = OutputRecord.create("delay", configuration.to_dict(), df_delay)
    _write(configuration, record, wandb_run)
    return record


def run_spectrum(
    config_file_or_obj_or_dict: ConfigInput,
    logger: Optional[logging.Logger] = None,
    wandb_run: WandbRun = None,
) -> OutputRecord:
    """
    Tabulate a vacuum correlation spectrum on a frequency grid.

    Parameters
    ----------
    config_file_or_obj_or_dict : Union[str, Path, Dict[str, Any], Configuration]
        The settings of the ``spectrum`` command.
    logger : Optional[logging.Logger]
        A Logger object. If ``None`` is passed, get logger from ``__name__``.
        Defaults to ``None``.
    wandb_run : Union[wandb.wandb_run.Run, wandb.sdk.lib.RunDisabled, None]
        A wandb run to log the table to.
        Defaults to ``None``.

    Returns
    -------
    record : OutputRecord
        The written record with the columns ``omega``, ``value`` and
        ``error_estimate``, ordered by frequency.
    """
    logger = logger if logger else logging.getLogger(__name__)
    configuration = configure("spectrum", config_file_or_obj_or_dict)
    model = configuration.model()

    samples = compute_spectrum(
        model,
        configuration["component"],
        _frequencies(configuration),
        method=configuration["method"],
        cfg=configuration.quadrature_config(),
        n_jobs=configuration["n_jobs"],
        silence_tqdm=not sys.stderr.isatty(),
        logger=logger,
    )

    if configuration["dimensionless"]:
        df_spectrum = samples.to_frame(
            model.omega_c, dimensionless_scale(configuration["component"], model)
        )
    else:
        df_spectrum = samples.to_frame()

    record = OutputRecord.create("spectrum", configuration.to_dict(), df_spectrum)
    _write(configuration, record, wandb_run)
    return record


def run_mean_mass(
    config_file_or_obj_or_dict: ConfigInput,
    logger: Optional[logging.Logger] = None,
    wandb_run: WandbRun = None,
) -> OutputRecord:
    """
    Compute the mean induced mass up to a cut-off in two ways.

    The analytic value and the quadrature value are reported together with
    their absolute difference; the cut-off is always part of the output.

    Parameters
    ----------
    config_file_or_obj_or_dict : Union[str, Path, Dict[str, Any], Configuration]
        The settings of the ``mean-mass`` command.
    logger : Optional[logging.Logger]
        A Logger object. If ``None`` is passed, get logger from ``__name__``.
        Defaults to ``None``.
    wandb_run : Union[wandb.wandb_run.Run, wandb.sdk.lib.RunDisabled, None]
        A wandb run to log the table to.
        Defaults to ``None``.

    Returns
    -------
    record : OutputRecord
        The written record with the columns ``cutoff``, ``analytic``,
        ``quadrature`` and ``difference``.
    """
    logger = logger if logger else logging.getLogger(__name__)
    configuration = configure("mean-mass", config_file_or_obj_or_dict)
    model = configuration.model()
    cutoff = configuration["cutoff"]

    analytic = mean_induced_mass(model, cutoff, method=SpectrumMethod.CLOSED_FORM)
    quadrature = mean_induced_mass(
        model, cutoff, cfg=configuration.quadrature_config(), method=SpectrumMethod.QUADRATURE
    )
    logger.info(f"Mean induced mass up to {cutoff}: {analytic!r} (analytic), {quadrature!r} (quad)")

    frequency_scale = model.omega_c if configuration["dimensionless"] else 1.0
    mass_scale = mean_mass_scale(model) if configuration["dimensionless"] else 1.0
    df_mass = pd.DataFrame(
        {
            "cutoff": [cutoff / frequency_scale],
            "analytic": [analytic / mass_scale],
            "quadrature": [quadrature / mass_scale],
            "difference": [abs(analytic - quadrature) / mass_scale],
        }
    )

    record = OutputRecord.create("mean-mass", configuration.to_dict(), df_mass)
    writer = DataWriter(context="mean-mass", wandb_run=wandb_run)
    writer.write_record(record, configuration["out"], configuration["format"], "mean_mass")
    return record


def simulation_config(configuration: Configuration) -> SimulationConfig:
    """Build the simulator parameters from a ``simulate`` configuration."""
    return SimulationConfig(
        model=configuration.model(),
        m_bare=configuration["mass_bare"],
        dt=configuration["dt"],
        steps=configuration["steps"],
        seed=configuration["seed"],
        mass_channel=configuration["mass_channel"],
        noise_band=configuration.get_band(),
        q0=configuration["q0"],
        p0=configuration["p0"],
        noise_scale=configuration["noise_scale"],
        record_every=configuration["record_every"],
        force_component=configuration["force_component"],
    )


def run_simulation(
    config_file_or_obj_or_dict: ConfigInput,
    logger: Optional[logging.Logger] = None,
    wandb_run: WandbRun = None,
) -> Dict[str, Any]:
    """
    Simulate the motion of the mirror in vacuum.

    The trajectory is written as a record with the columns ``t``, ``q``,
    ``p``, ``m``, ``v`` and ``e``. When an output file is configured, the
    run is also logged to ``<out>.log``, the settings are saved to
    ``<out>.cfg`` and the summary is printed to standard output as JSON;
    otherwise the trajectory goes to standard output and the summary to
    the log.

    Parameters
    ----------
    config_file_or_obj_or_dict : Union[str, Path, Dict[str, Any], Configuration]
        The settings of the ``simulate`` command.
    logger : Optional[logging.Logger]
        A Logger object. If ``None`` is passed, get logger from ``__name__``.
        Defaults to ``None``.
    wandb_run : Union[wandb.wandb_run.Run, wandb.sdk.lib.RunDisabled, None]
        A wandb run to log the trajectory and the summary to.
        Defaults to ``None``.

    Returns
    -------
    summary : Dict[str, Any]
        The schema version, the command, the parameters and the
        diagnostics of the run.
    """
    logger = logger if logger else logging.getLogger(__name__)
    configuration = configure("simulate", config_file_or_obj_or_dict)
    cfg = simulation_config(configuration)
    out = configuration["out"]

    run_logger = logger
    if out is not None:
        run_logger = get_file_logger(f"{__name__}.simulate", f"{out}.log")
        configuration.save(f"{out}.cfg")

    try:
        run_logger.info(f"Simulating {cfg.steps} steps with seed {cfg.seed}.")
        trajectory, diagnostics = run_trajectory(cfg, logger=run_logger)
        run_logger.info(f"Diagnostics: {json.dumps(diagnostics.to_dict())}")
    finally:
        if run_logger is not logger:
            close_handlers(run_logger)

    record = OutputRecord.create("simulate", configuration.to_dict(), trajectory.to_frame())
    writer = DataWriter(context="simulate", wandb_run=wandb_run)
    writer.write_record(record, out, configuration["format"], "trajectory")

    summary = {
        "schema_version": record.schema_version,
        "command": "simulate",
        "parameters": record.parameters,
        "diagnostics": diagnostics.to_dict(),
    }
    log_dataframe_to_wandb(wandb_run, pd.DataFrame([diagnostics.to_dict()]), "summary", "simulate")

    summary_json = json.dumps(summary, indent=4, separators=(",", ": "))
    if out is not None:
        print(summary_json)
    else:
        logger.info(f"Summary: {summary_json}")

    return summary


def run_verification(
    config_file_or_obj_or_dict: ConfigInput,
    logger: Optional[logging.Logger] = None,
    wandb_run: WandbRun = None,
) -> OutputRecord:
    """
    Run the property suites and write the report.

    Parameters
    ----------
    config_file_or_obj_or_dict : Union[str, Path, Dict[str, Any], Configuration]
        The settings of the ``verify`` command.
    logger : Optional[logging.Logger]
        A Logger object. If ``None`` is passed, get logger from ``__name__``.
        Defaults to ``None``.
    wandb_run : Union[wandb.wandb_run.Run, wandb.sdk.lib.RunDisabled, None]
        A wandb run to log the report to.
        Defaults to ``None``.

    Returns
    -------
    record : OutputRecord
        The written record with one row per check and the columns
        ``suite``, ``check``, ``residual``, ``threshold`` and ``passed``.
    """
    logger = logger if logger else logging.getLogger(__name__)
    configuration = configure("verify", config_file_or_obj_or_dict)

    verifier = Verifier(
        configuration.model(),
        tolerances=configuration.get_tolerance_overrides(),
        steps=configuration["steps"],
        n_jobs=configuration["n_jobs"],
        logger=logger,
    )
    results = verifier.run(configuration["suite"])
    df_report = Verifier.report(results)

    n_passed = int(df_report["passed"].sum())
    logger.info(f"{n_passed} of {len(df_report)} checks passed.")

    record = OutputRecord.create("verify", configuration.to_dict(), df_report)
    writer = DataWriter(context="verify", wandb_run=wandb_run)
    writer.write_record(record, configuration["out"], configuration["format"], "report")
    return record


def run_command(
    subcommand: str, settings: Dict[str, Any], logger: Optional[logging.Logger] = None
) -> int:
    """
    Run one command and translate its outcome into an exit code.

    Parameters
    ----------
    subcommand : str
        One of "delay", "spectrum", "mean-mass", "simulate" or "verify".
    settings : Dict[str, Any]
        The merged raw settings of the command.
    logger : Optional[logging.Logger]
        A Logger object. If ``None`` is passed, get logger from ``__name__``.
        Defaults to ``None``.

    Returns
    -------
    exit_code : int
        0 on success, 1 when a verification check failed, 2 for invalid
        settings and 3 for numerical failures.
    """
    logger = logger if logger else logging.getLogger(__name__)
    wandb_run = None
    try:
        configuration = Configuration(settings, context=subcommand, logger=logger)
        wandb_run = init_wandb_run(configuration.to_dict(), subcommand)

        if subcommand == "delay":
            run_delay(configuration, logger=logger, wandb_run=wandb_run)
        elif subcommand == "spectrum":
            run_spectrum(configuration, logger=logger, wandb_run=wandb_run)
        elif subcommand == "mean-mass":
            run_mean_mass(configuration, logger=logger, wandb_run=wandb_run)
        elif subcommand == "simulate":
            run_simulation(configuration, logger=logger, wandb_run=wandb_run)
        else:
            record = run_verification(configuration, logger=logger, wandb_run=wandb_run)
            if not record.columns["passed"].all():
                failed = record.columns.loc[~record.columns["passed"], "check"].tolist()
                logger.error(f"Failed checks: {', '.join(failed)}")
                return EXIT_VERIFICATION_FAILURE

    except (ValueError, OSError) as error:
        logger.error(str(error))
        return EXIT_USAGE_ERROR
    except ArithmeticError as error:
        logger.error(f"{type(error).__name__}: {error}")
        return EXIT_NUMERICAL_FAILURE
    finally:
        if wandb_run:
            wandb_run.finish()

    return EXIT_SUCCESS


def main(argv: Optional[List[str]] = None) -> None:
    """
    Entry point for the ``mirrormass`` command-line interface.

    Parameters
    ----------
    argv : Optional[List[str]]
        List of arguments to use instead of ``sys.argv``.
        Defaults to ``None``.
    """
    # if no arguments are passed, then use sys.argv
    if argv is None:
        argv = sys.argv[1:]

    # log to stderr; standard output only carries data
    logger = get_stream_logger("mirrormass")

    parser = setup_mirrormass_parser("mirrormass")

    # if we have no arguments at all then just show the help message
    if len(argv) < 1:
        argv = ["-h"]
    args = parser.parse_args(args=join_range_values(argv))
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        sys.exit(EXIT_USAGE_ERROR)

    flags = {
        key: value
        for key, value in vars(args).items()
        if key not in ("subcommand", "config") and value is not None
    }
    try:
        file_settings = ConfigurationParser(args.config).read() if args.config else {}
    except (ValueError, OSError) as error:
        logger.error(str(error))
        sys.exit(EXIT_USAGE_ERROR)

    exit_code = run_command(args.subcommand, merge_settings(file_settings, flags), logger=logger)
    if exit_code != EXIT_SUCCESS:
        sys.exit(exit_code)


if __name__ == "__main__":
    main()
