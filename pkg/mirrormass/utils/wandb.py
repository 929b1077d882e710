"""Utility functions for logging runs to Weights & Biases."""

from numbers import Real
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd
import wandb
from wandb.sdk.lib import RunDisabled
from wandb.wandb_run import Run

# single-row frames whose values are also logged as metrics
METRICS_LOGGED = ["mean_mass", "summary"]


def init_wandb_run(config: Dict[str, Any], context: str) -> Union[Run, RunDisabled, None]:
    """
    Initialize a wandb run if logging to wandb is enabled in the configuration.

    The run is created with the project and entity of the configuration
    and the full configuration is logged to it.

    Parameters
    ----------
    config : Dict[str, Any]
        The validated configuration settings.
    context : str
        The command being run; used as the job type and config section.

    Returns
    -------
    Union[wandb.wandb_run.Run, wandb.sdk.lib.RunDisabled, None]
        A wandb Run object, or ``None`` if logging to wandb is disabled.
    """
    wandb_run = None
    if config.get("use_wandb"):
        wandb_run = wandb.init(
            project=config["wandb_project"], entity=config["wandb_entity"], job_type=context
        )
        log_configuration_to_wandb(wandb_run, config, context)
    return wandb_run


def log_configuration_to_wandb(
    wandb_run: Union[Run, RunDisabled, None], config: Dict[str, Any], context: str
) -> None:
    """
    Log the configuration settings if logging to wandb is enabled.

    Parameters
    ----------
    wandb_run : Union[wandb.wandb_run.Run, wandb.sdk.lib.RunDisabled, None]
        The wandb Run object, or ``None``, if logging to wandb is disabled.
    config : Dict[str, Any]
        The settings to log.
    context : str
        The section of the run config the settings go into.
    """
    if wandb_run:
        wandb_run.config.update({context: config})


def get_metric_name(section: Optional[str], frame_name: str, col_name: str) -> str:
    """
    Generate the metric name for logging in wandb.

    Parameters
    ----------
    section : Optional[str]
        Prefix of the metric name; skipped when ``None`` or empty.
    frame_name : str
        The name of the logged frame.
    col_name : str
        The column the value comes from.

    Returns
    -------
    metric_name : str
        The metric name to be logged.
    """
    metric_name = f"{frame_name}.{col_name}"
    if section:
        metric_name = f"{section}/{metric_name}"
    return metric_name


def log_dataframe_to_wandb(
    wandb_run: Union[Run, RunDisabled, None],
    df: pd.DataFrame,
    frame_name: str,
    section: Optional[str] = None,
) -> None:
    """
    Log a dataframe as a table to wandb if logging to wandb is enabled.

    Single-row frames named in :data:`METRICS_LOGGED` are also logged as
    metrics, one per numeric column.

    Parameters
    ----------
    wandb_run : Union[wandb.wandb_run.Run, wandb.sdk.lib.RunDisabled, None]
        The wandb Run object, or ``None``, if logging to wandb is disabled.
    df : pandas.DataFrame
        The dataframe object to log.
    frame_name : str
        The name of the dataframe to use in the log.
    section : Optional[str]
        The section in which the dataframe will be logged. If ``None``,
        it goes to the default section.
        Defaults to ``None``.
    """
    if not wandb_run:
        return

    table = wandb.Table(dataframe=df, allow_mixed_types=True)
    name = f"{section}/{frame_name}" if section is not None else frame_name
    wandb_run.log({name: table})

    if frame_name in METRICS_LOGGED and len(df) == 1:
        metrics = {
            get_metric_name(section, frame_name, column): value
            for column, value in df.iloc[0].items()
            if isinstance(value, Real) and not isinstance(value, (bool, np.bool_))
        }
        if metrics:
            wandb_run.log(metrics)
