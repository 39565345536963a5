import csv
import io
import logging
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import aiofiles

from lurye_ozf.util.serialization import dumps

logger = logging.getLogger(__name__)


class ReportStore:

    def __init__(self, out_dir):
        self.root = Path(out_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.written: List[str] = []

    def path(self, name: str) -> Path:
        return self.root / name

    async def write_text(self, name: str, text: str) -> Path:
        target = self.path(name)
        async with aiofiles.open(target, "w") as f:
            await f.write(text)
        self.written.append(name)
        logger.debug(f"wrote {target}")
        return target

    async def write_json(self, name: str, data: Any) -> Path:
        return await self.write_text(name, dumps(data) + "\n")

    async def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return await self.write_text(name, buffer.getvalue())
