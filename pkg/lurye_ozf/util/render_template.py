from pathlib import Path
from typing import Iterable, Sequence, Tuple

import jinja2

from lurye_ozf import __version__

TEMPLATE_FILE = Path(__file__).resolve().parent.parent / "template" / "summary.txt"


def render_summary(command: str, status: str, exit_code: int, elapsed: str,
                   facts: Iterable[Tuple[str, object]] = (), files: Sequence[str] = ()) -> str:
    with open(TEMPLATE_FILE) as f:
        template = jinja2.Template(f.read())
    return template.render(
        version=__version__,
        command=command,
        status=status,
        exit_code=exit_code,
        elapsed=elapsed,
        facts=list(facts),
        files=list(files),
    )
