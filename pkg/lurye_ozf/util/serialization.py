import json
from pathlib import Path
from typing import Any

import numpy as np

from lurye_ozf.core.exceptions import ConfigError


def load_json(source: str) -> Any:
    """Parse ``source`` as inline JSON when it looks like JSON, else as a file path."""
    text = source.strip()
    if not text.startswith(("{", "[")):
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"no such file: {source}")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {source[:40]!r}: {e.msg} at line {e.lineno}")


def jsonable(obj: Any) -> Any:
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=jsonable)
