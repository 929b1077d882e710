"""Reading configuration files from disk."""

import json
import re
from pathlib import Path
from typing import Any, Dict, Union

# single-line ``//`` and multi-line ``/* ... */`` comments
_COMMENT_RE = re.compile(
    r"(^)?[^\S\n]*(?:/\*(.*?)\*/[^\S\n]*|(?<!https:)(?<!http:)//[^\n]*)($)?",
    re.DOTALL | re.MULTILINE,
)


def normalize_key(key: str) -> str:
    """
    Turn a flag name into a configuration key.

    Leading dashes are removed and the remaining dashes become underscores,
    so ``--omega-c``, ``omega-c`` and ``omega_c`` all map to ``omega_c``.
    """
    return key.strip().lstrip("-").replace("-", "_").lower()


def parse_json_with_comments(pathlike: Union[str, Path]) -> Dict[str, Any]:
    """
    Parse a JSON file after removing any comments.

    Comments can use either ``//`` for single-line comments or
    ``/* ... */`` for multi-line comments.

    Parameters
    ----------
    pathlike : Union[str, Path]
        Path to the input JSON file.

    Returns
    -------
    obj : Dict[str, Any]
        JSON object representing the input file.

    Raises
    ------
    ValueError
        If the content is not valid JSON or not a JSON object.
    """
    content = Path(pathlike).read_text()
    match = _COMMENT_RE.search(content)
    while match:
        content = content[: match.start()] + content[match.end() :]  # noqa
        match = _COMMENT_RE.search(content)

    obj = json.loads(content)
    if not isinstance(obj, dict):
        raise ValueError(f"The JSON file {pathlike} must contain an object.")
    return obj


def parse_flat_config(pathlike: Union[str, Path]) -> Dict[str, Any]:
    """
    Parse a flat key/value configuration file.

    Each non-empty line that does not start with ``#`` holds one setting,
    written either as ``key = value`` or like a command-line flag,
    ``--key value``. A key without a value is read as ``true``, which is how
    boolean flags are written. Keys that occur several times are collected
    into a list.

    Parameters
    ----------
    pathlike : Union[str, Path]
        Path to the configuration file.

    Returns
    -------
    config : Dict[str, Any]
        The settings, with normalized keys and string values.

    Raises
    ------
    ValueError
        If a line has an empty key.
    """
    config: Dict[str, Any] = {}
    for number, raw_line in enumerate(Path(pathlike).read_text().splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue

        if "=" in line and not line.startswith("-"):
            key, value = line.split("=", 1)
        else:
            parts = line.split(None, 1)
            key, value = parts[0], parts[1] if len(parts) > 1 else "true"
            if "=" in key:
                key, value = key.split("=", 1)

        key = normalize_key(key)
        value = value.strip()
        if not key:
            raise ValueError(f"Line {number} of {pathlike} has no key: {raw_line!r}.")

        if key in config:
            previous = config[key]
            config[key] = (previous if isinstance(previous, list) else [previous]) + [value]
        else:
            config[key] = value
    return config
