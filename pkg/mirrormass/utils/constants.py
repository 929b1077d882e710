"""Various constants used across the mirrormass code base."""

from typing import Any, Dict, List

SCHEMA_VERSION = "1.0"

# exit codes of the command-line tool
EXIT_SUCCESS = 0
EXIT_VERIFICATION_FAILURE = 1
EXIT_USAGE_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3

CONTEXTS = ["delay", "spectrum", "mean-mass", "simulate", "verify"]

OUTPUT_FORMATS = ["csv", "json"]

VERIFY_SUITES = ["unitarity", "closedform", "asymptotes", "limits", "dispersion", "all"]

DEFAULTS: Dict[str, Any] = {
    "omega_c": 1.0,
    "hbar": 1.0,
    "grid": None,
    "method": None,
    "tol": 1e-10,
    "abs_tol": 1e-14,
    "max_depth": 50,
    "mass_bare": 1.0,
    "dt": 0.01,
    "steps": 10000,
    "seed": 0,
    "mass_channel": False,
    "band": None,
    "q0": 0.0,
    "p0": 0.0,
    "noise_scale": 1.0,
    "record_every": 1,
    "force_component": "f1f1",
    "suite": "all",
    "tolerances": [],
    "format": "csv",
    "out": None,
    "dimensionless": False,
    "n_jobs": 1,
    "use_wandb": False,
    "wandb_project": None,
    "wandb_entity": None,
}

# defaults that differ from the shared ones for a given context
CONTEXT_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "verify": {"steps": 10**6},
}

FLOAT_FIELDS = [
    "omega_c",
    "hbar",
    "tol",
    "abs_tol",
    "cutoff",
    "mass_bare",
    "dt",
    "q0",
    "p0",
    "noise_scale",
]

INTEGER_FIELDS = ["max_depth", "steps", "seed", "record_every", "n_jobs"]

BOOLEAN_FIELDS = ["mass_channel", "dimensionless", "use_wandb"]

LIST_FIELDS = ["tolerances"]

# keys in configuration files that are spelled after a flag whose
# destination has a different name
KEY_ALIASES: Dict[str, Dict[str, str]] = {
    "verify": {"tol": "tolerances"},
}

_COMMON_OPTIONAL: List[str] = [
    "omega_c",
    "hbar",
    "format",
    "out",
    "n_jobs",
    "use_wandb",
    "wandb_project",
    "wandb_entity",
]

CHECK_FIELDS: Dict[str, Dict[str, List[str]]] = {
    "delay": {
        "required": [],
        "optional": _COMMON_OPTIONAL + ["grid", "dimensionless"],
    },
    "spectrum": {
        "required": ["component"],
        "optional": _COMMON_OPTIONAL
        + ["method", "grid", "tol", "abs_tol", "max_depth", "dimensionless"],
    },
    "mean-mass": {
        "required": ["cutoff"],
        "optional": _COMMON_OPTIONAL + ["tol", "abs_tol", "max_depth", "dimensionless"],
    },
    "simulate": {
        "required": [],
        "optional": _COMMON_OPTIONAL
        + [
            "mass_bare",
            "dt",
            "steps",
            "seed",
            "mass_channel",
            "band",
            "q0",
            "p0",
            "noise_scale",
            "record_every",
            "force_component",
        ],
    },
    "verify": {
        "required": [],
        "optional": _COMMON_OPTIONAL + ["suite", "tolerances", "steps"],
    },
}
