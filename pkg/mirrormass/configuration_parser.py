"""
Configuration parser.

Classes related to parsing configuration files
and creating configuration objects for the mirrormass commands.
"""

from __future__ import annotations

import json
import logging
import math
import re
from copy import deepcopy
from pathlib import Path
from typing import Any, Dict, Generator, List, Optional, Tuple, Union

from .quadrature import QuadratureConfig
from .scattering import MirrorModel
from .spectra import DEFAULT_METHODS, FORCE_COMPONENTS, as_component, check_method
from .utils.commandline import parse_band, parse_grid, parse_tolerance_overrides
from .utils.constants import (
    BOOLEAN_FIELDS,
    CHECK_FIELDS,
    CONTEXT_DEFAULTS,
    CONTEXTS,
    DEFAULTS,
    FLOAT_FIELDS,
    INTEGER_FIELDS,
    KEY_ALIASES,
    LIST_FIELDS,
    OUTPUT_FORMATS,
    VERIFY_SUITES,
)
from .utils.files import normalize_key, parse_flat_config, parse_json_with_comments


def configure(
    context: str, config_file_or_obj_or_dict: Union[str, Configuration, Dict[str, Any], Path]
) -> Configuration:
    """
    Create a Configuration object.

    Get the configuration for ``context`` from the input
    ``config_file_or_obj_or_dict``.

    Parameters
    ----------
    context : str
        The command that is being configured. One of "delay", "spectrum",
        "mean-mass", "simulate" or "verify".
    config_file_or_obj_or_dict : Union[str, Configuration, Dict[str, Any], Path]
        Path to a flat key/value or JSON configuration file, a
        ``Configuration`` object that is in memory, or a dictionary with
        keys corresponding to the fields of the configuration file.

    Returns
    -------
    configuration : Configuration
        The Configuration object for the command.

    Raises
    ------
    ValueError
        If ``config_file_or_obj_or_dict`` contains anything except a string,
        a path, a dictionary, or a ``Configuration`` object, or if a
        ``Configuration`` object was created for another command.
    """
    if isinstance(config_file_or_obj_or_dict, (str, Path)):
        parser = ConfigurationParser(config_file_or_obj_or_dict)
        configuration = parser.parse(context=context)

    elif isinstance(config_file_or_obj_or_dict, dict):
        configuration = Configuration(config_file_or_obj_or_dict, context=context)

    elif isinstance(config_file_or_obj_or_dict, Configuration):
        if config_file_or_obj_or_dict.context != context:
            raise ValueError(
                f"The configuration was created for `{config_file_or_obj_or_dict.context}` "
                f"and cannot be used for `{context}`."
            )
        configuration = config_file_or_obj_or_dict

    else:
        raise ValueError(
            f"The configuration must be a path to the file (str), "
            f"a dictionary, or a configuration object. You passed "
            f"{type(config_file_or_obj_or_dict)}."
        )

    return configuration


class Configuration:
    """
    Configuration class.

    Encapsulates all of the configuration parameters of one command and
    the methods that turn them into library objects.
    """

    def __init__(
        self,
        configdict: Dict[str, Any],
        *,
        context: str = "spectrum",
        logger: Optional[logging.Logger] = None,
    ):
        """
        Create an object of the `Configuration` class.

        Parameters
        ----------
        configdict : Dict[str, Any]
            A dictionary of configuration parameters. Keys may be spelled
            like the long flags (``omega-c``) or like the fields
            (``omega_c``); values may be strings.
        context : str
            The command being configured.
            Defaults to "spectrum".
        logger : Optional[logging.Logger]
            A Logger object. If ``None`` is passed, get logger from ``__name__``.
            Defaults to ``None``.

        Raises
        ------
        TypeError
            If ``configdict`` is not a dictionary.
        ValueError
            If the context is unknown or the configuration is invalid.
        """
        if not isinstance(configdict, dict):
            raise TypeError("The input must be a dictionary.")
        if context not in CONTEXTS:
            raise ValueError(f"Unknown context {context!r}. Choose from: {', '.join(CONTEXTS)}.")

        self.logger = logger if logger else logging.getLogger(__name__)

        configdict = ConfigurationParser.process_config(configdict, context=context)
        configdict = ConfigurationParser.validate_config(configdict, context=context)

        self._config = configdict
        self._context = context

    def __contains__(self, key: str) -> bool:
        """Check if the configuration object contains a given key."""
        return key in self._config

    def __getitem__(self, key: str) -> Any:
        """Get configuration value for the given key."""
        return self._config[key]

    def __len__(self) -> int:
        """Return the size of the configuration dictionary."""
        return len(self._config)

    def __str__(self) -> str:
        """
        Return string representation of the configuration dictionary.

        Returns
        -------
        config_string : str
            The configuration dictionary as encoded by ``json.dumps()``.
        """
        return json.dumps(self._config, indent=4, separators=(",", ": "))

    def __iter__(self) -> Generator[str, None, None]:
        """Iterate through configuration object keys."""
        for key in self.keys():
            yield key

    @property
    def context(self) -> str:
        """Get the context."""
        return self._context

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get value or default for the given key.

        Parameters
        ----------
        key : str
            Key to check in the Configuration object.
        default : Any
            The default value to return, if no key exists.
            Defaults to ``None``.

        Returns
        -------
        value
            The value in the configuration object dictionary.
        """
        return self._config.get(key, default)

    def to_dict(self) -> Dict[str, Any]:
        """Get a dictionary representation of the configuration object."""
        return self._config

    def keys(self) -> List[str]:
        """Return keys as a list."""
        return [k for k in self._config.keys()]

    def save(self, path: Union[str, Path]) -> None:
        """
        Save the configuration as a flat key/value file.

        Floats are written with ``repr`` so that parsing the file with
        :class:`ConfigurationParser` gives back exactly the same values.
        Unset (``None``) fields are left out and list fields are written
        as one line per element.

        Parameters
        ----------
        path : Union[str, Path]
            The file to write.
        """
        lines = [f"# mirrormass {self._context}"]
        for key, value in self._config.items():
            if value is None:
                continue
            if key in LIST_FIELDS:
                lines.extend(f"{key} = {element}" for element in value)
            elif key == "band":
                lines.append(f"{key} = {value[0]!r}:{value[1]!r}")
            elif isinstance(value, bool):
                lines.append(f"{key} = {str(value).lower()}")
            else:
                lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")

        Path(path).write_text("\n".join(lines) + "\n")

    def model(self) -> MirrorModel:
        """Build the mirror model from ``omega_c`` and ``hbar``."""
        return MirrorModel(self._config["omega_c"], self._config["hbar"])

    def quadrature_config(self) -> QuadratureConfig:
        """Build the integration tolerances; only meaningful for spectrum and mean-mass."""
        return QuadratureConfig(
            rel_tol=self._config.get("tol", DEFAULTS["tol"]),
            abs_tol=self._config.get("abs_tol", DEFAULTS["abs_tol"]),
            max_depth=self._config.get("max_depth", DEFAULTS["max_depth"]),
        )

    def get_band(self) -> Optional[Tuple[float, float]]:
        """Return the noise band as a tuple, or ``None`` when unset."""
        band = self._config.get("band")
        return None if band is None else (band[0], band[1])

    def get_tolerance_overrides(self) -> Dict[str, float]:
        """Return the verification threshold overrides by check name."""
        return parse_tolerance_overrides(self._config.get("tolerances", []))


class ConfigurationParser:
    """``ConfigurationParser`` class to create ``Configuration`` objects."""

    # initialize class logger attribute to None
    logger = None

    def __init__(self, pathlike: Union[str, Path], logger: Optional[logging.Logger] = None):
        """
        Instantiate a ``ConfigurationParser`` for a given config file path.

        Parameters
        ----------
        pathlike : Union[str, Path]
            Path to the configuration file. Files ending in ".json" are read
            as JSON (comments allowed); any other file is read as flat
            ``key = value`` text.
        logger : Optional[logging.Logger]
            Custom logger object to use, if not ``None``. Otherwise
            a new logger is created.
            Defaults to ``None``.

        Raises
        ------
        FileNotFoundError
            If the given path does not exist.
        OSError
            If the given path is a directory, not a file.
        """
        pathlike = Path(pathlike)

        if not pathlike.exists():
            raise FileNotFoundError(f"The configuration file {pathlike} was not found.")

        if not pathlike.is_file():
            raise OSError(f"The given path {pathlike} should be a file, not a directory.")

        self._path = pathlike.resolve()
        self.__class__.logger = logger if logger else logging.getLogger(__name__)

    def read(self) -> Dict[str, Any]:
        """
        Read the raw settings from the file.

        Returns
        -------
        configdict : Dict[str, Any]
            The settings, not yet processed or validated.

        Raises
        ------
        ValueError
            If the file could not be parsed.
        """
        if self._path.suffix.lower() == ".json":
            try:
                return parse_json_with_comments(self._path)
            except ValueError:
                raise ValueError(
                    f"The configuration file `{self._path}` exists but is formatted "
                    f"incorrectly. Please check that it holds a single JSON object "
                    f"and that all quotes and commas match."
                )
        return parse_flat_config(self._path)

    def parse(self, context: str = "spectrum") -> Configuration:
        """
        Parse the configuration file for ``context``.

        Parameters
        ----------
        context : str
            The command being configured.
            Defaults to "spectrum".

        Returns
        -------
        configuration : Configuration
            The processed and validated configuration.
        """
        return Configuration(self.read(), context=context, logger=self.logger)

    @classmethod
    def process_config(cls, config: Dict[str, Any], context: str = "spectrum") -> Dict[str, Any]:
        """
        Process the given configuration dictionary.

        Normalizes the keys, resolves the aliases of ``context`` and converts
        fields which are read in as strings to the appropriate type.

        Parameters
        ----------
        config : Dict[str, Any]
            Given configuration dictionary to be processed.
        context : str
            The command being configured.
            Defaults to "spectrum".

        Returns
        -------
        new_config : Dict[str, Any]
            A copy of the given configuration dictionary with all
            fields converted to the appropriate format.

        Raises
        ------
        ValueError
            If a field cannot be converted to its type.
        """
        aliases = KEY_ALIASES.get(context, {})
        new_config: Dict[str, Any] = {}
        for key, value in config.items():
            key = normalize_key(key)
            new_config[aliases.get(key, key)] = deepcopy(value)

        for field in FLOAT_FIELDS:
            if field in new_config and new_config[field] is not None:
                value = new_config[field]
                if isinstance(value, bool):
                    raise ValueError(f"Field {field} must be a number, got {value!r}.")
                try:
                    new_config[field] = float(value)
                except (TypeError, ValueError):
                    raise ValueError(f"Field {field} must be a number, got {value!r}.")

        for field in INTEGER_FIELDS:
            if field in new_config and new_config[field] is not None:
                new_config[field] = cls._to_integer(field, new_config[field])

        # make sure all boolean values are boolean
        for field in BOOLEAN_FIELDS:
            error_message = f"Field {field} can only be set to True or False."
            if field in new_config and new_config[field] is not None:
                if not isinstance(new_config[field], bool):
                    given_value = str(new_config[field]).strip()
                    m = re.match(r"^(true|false)$", given_value, re.I)
                    if not m:
                        raise ValueError(error_message)
                    new_config[field] = json.loads(m.group().lower())

        # convert multiple values into lists
        for field in LIST_FIELDS:
            if field in new_config and new_config[field] is not None:
                if not isinstance(new_config[field], list):
                    new_config[field] = str(new_config[field]).split(",")
                new_config[field] = [
                    str(element).strip() for element in new_config[field] if str(element).strip()
                ]

        return new_config

    @staticmethod
    def _to_integer(field: str, value: Any) -> int:
        if isinstance(value, bool):
            raise ValueError(f"Field {field} must be an integer, got {value!r}.")
        if isinstance(value, int):
            return value
        try:
            return int(str(value).strip())
        except ValueError:
            pass
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ValueError(f"Field {field} must be an integer, got {value!r}.")
        if not number.is_integer():
            raise ValueError(f"Field {field} must be an integer, got {value!r}.")
        return int(number)

    @classmethod
    def validate_config(cls, config: Dict[str, Any], context: str = "spectrum") -> Dict[str, Any]:
        """
        Validate the given configuration dictionary.

        Ensure that all required fields are specified, add default
        values for all unspecified fields, and ensure that all specified
        fields are valid.

        Parameters
        ----------
        config : Dict[str, Any]
            Given configuration dictionary to be validated.
        context : str
            The command being configured.
            Defaults to "spectrum".

        Returns
        -------
        new_config : Dict[str, Any]
            A copy of the given configuration dictionary with all required
            fields specified, the default values for unspecified fields and
            only the fields that ``context`` uses.

        Raises
        ------
        ValueError
            If the configuration does not contain all required fields,
            has any unrecognized fields, or has any fields with invalid values.
        """
        new_config = deepcopy(config)

        # 1. Check to make sure all required fields are specified
        required_fields = CHECK_FIELDS[context]["required"]
        optional_fields = CHECK_FIELDS[context]["optional"]

        for field in required_fields:
            if new_config.get(field) is None:
                raise ValueError(f"The `{context}` command must specify '{field}'.")

        # 2. Check to make sure no unrecognized fields are specified
        for field in new_config:
            if field not in required_fields and field not in optional_fields:
                raise ValueError(f"Unrecognized field '{field}' for the `{context}` command.")

        # 3. Add default values for unspecified optional fields
        defaults = {**DEFAULTS, **CONTEXT_DEFAULTS.get(context, {})}
        for field in optional_fields:
            if new_config.get(field) is None:
                new_config[field] = deepcopy(defaults[field])

        # 4. Check the model and the output settings
        MirrorModel(new_config["omega_c"], new_config["hbar"])

        if new_config["format"] not in OUTPUT_FORMATS:
            raise ValueError(
                f"Invalid output format {new_config['format']!r}. "
                f"Choose from: {', '.join(OUTPUT_FORMATS)}."
            )
        if new_config["n_jobs"] == 0:
            raise ValueError("`n_jobs` cannot be 0.")

        # 5. Check the integration tolerances
        if "tol" in new_config:
            QuadratureConfig(new_config["tol"], new_config["abs_tol"], new_config["max_depth"])

        # 6. Check the spectrum component and method pairing
        if "component" in new_config:
            component = as_component(new_config["component"])
            new_config["component"] = component.value
            if new_config["method"] is not None:
                check_method(component, new_config["method"])
            else:
                new_config["method"] = DEFAULT_METHODS[component].value

        # 7. Check the frequency grid and the cut-off; the grid stays a string
        if new_config.get("grid") is not None:
            parse_grid(new_config["grid"])

        if "cutoff" in new_config:
            cutoff = new_config["cutoff"]
            if not (math.isfinite(cutoff) and cutoff > 0):
                raise ValueError(f"The cut-off must be finite and strictly positive, got {cutoff}.")

        # 8. Check the simulation settings
        if context == "simulate":
            if new_config["band"] is not None:
                new_config["band"] = list(parse_band(new_config["band"]))
            if as_component(new_config["force_component"]) not in FORCE_COMPONENTS:
                raise ValueError(f"{new_config['force_component']} is not a force spectrum.")

        # 9. Check the verification settings
        if context == "verify":
            if new_config["suite"] not in VERIFY_SUITES:
                raise ValueError(
                    f"Unknown suite {new_config['suite']!r}. "
                    f"Choose from: {', '.join(VERIFY_SUITES)}."
                )
            parse_tolerance_overrides(new_config["tolerances"])
            if new_config["steps"] < 1:
                raise ValueError(f"`steps` must be a positive integer, got {new_config['steps']}.")

        # 10. Check that if the user enables logging to W&B, they also
        # specified wandb project and entity.
        if new_config["use_wandb"]:
            if not new_config["wandb_project"] or not new_config["wandb_entity"]:
                raise ValueError(
                    "You must specify both `wandb_project` "
                    "and `wandb_entity` if you want to enable "
                    "logging to W&B."
                )

        return new_config


def merge_settings(*sources: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """
    Merge setting dictionaries, later sources taking precedence.

    ``None`` values never override, so unset command-line flags leave the
    values of a configuration file in place.

    Parameters
    ----------
    *sources : Optional[Dict[str, Any]]
        Raw settings, e.g. from a file and from the flags.

    Returns
    -------
    merged : Dict[str, Any]
        The merged settings with normalized keys.
    """
    merged: Dict[str, Any] = {}
    for source in sources:
        for key, value in (source or {}).items():
            if value is not None:
                merged[normalize_key(key)] = value
    return merged
