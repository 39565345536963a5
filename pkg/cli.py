import argparse
import asyncio
import glob
import importlib
import logging
import logging.config
import sys
import time
from datetime import datetime, timedelta
from pathlib import Path
from typing import List, Optional

import humanize
import pytz

ROOT = Path(__file__).resolve().parent

try:
    logging.config.fileConfig(ROOT / "logging.conf", disable_existing_loggers=False)
except (KeyError, OSError):
    logging.basicConfig(format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")

from info import LOG_LEVEL, TIMEZONE
from lurye_ozf import __version__
from lurye_ozf.commands import INTERNAL, OK, RunContext, routes
from lurye_ozf.core.exceptions import OzfError
from lurye_ozf.util.config_parser import ConfigParser
from lurye_ozf.util.render_template import render_summary
from database.report_store import ReportStore
from Script import script
from utils import temp

logging.getLogger().setLevel(getattr(logging, LOG_LEVEL, logging.INFO))
logging.getLogger("asyncio").setLevel(logging.ERROR)
logging.getLogger("aiofiles").setLevel(logging.ERROR)

logger = logging.getLogger("lurye_ozf")


def load_plugins():
    for name in sorted(glob.glob(str(ROOT / "plugins" / "*.py"))):
        plugin_name = Path(name).stem
        if plugin_name == "__init__":
            continue
        importlib.import_module(f"plugins.{plugin_name}")
        logger.debug(f"loaded plugin {plugin_name}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON config file (or inline JSON)")
    common.add_argument("--out", default=None, help="report directory")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None)

    parser = argparse.ArgumentParser(prog="lurye-ozf", description="Zames-Falb multiplier analysis for Lurye systems")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for command in routes:
        p = sub.add_parser(command.name, help=command.help, parents=[common])
        for flags, kwargs in command.arguments:
            p.add_argument(*flags, **kwargs)
    return parser


def banner(args, config) -> str:
    tz = pytz.timezone(TIMEZONE)
    now = datetime.now(tz)
    return script.BANNER_TXT.format(
        version=__version__,
        command=args.command,
        date=now.strftime("%Y-%m-%d"),
        time=now.strftime("%H:%M:%S"),
        tz=TIMEZONE,
        jobs=config.jobs,
        seed=config.seed,
    )


async def run(args) -> int:
    config = ConfigParser(args.config).parse({"out": args.out, "seed": args.seed, "jobs": args.jobs})
    store = ReportStore(config.out)
    await store.write_json("resolved_config.json", config.to_json())
    logger.info("\n" + banner(args, config))
    ctx = RunContext(args, config, store)
    code = OK
    try:
        code = await routes.get(args.command).handler(ctx)
    except OzfError as e:
        logger.warning(e.message)
        ctx.note("error", e.message)
        code = e.exit_code
    except Exception:
        logger.exception(f"{args.command} failed")
        code = INTERNAL
    elapsed = humanize.precisedelta(timedelta(seconds=time.time() - temp.STARTED), minimum_unit="milliseconds")
    summary = render_summary(args.command, script.EXIT_TXT.get(code, "?"), code, elapsed, ctx.facts, list(store.written))
    await store.write_text("summary.txt", summary)
    print(summary, end="")
    logger.info(script.FOOTER_TXT.format(command=args.command, code=code, elapsed=elapsed))
    return code


async def start(argv: Optional[List[str]] = None) -> int:
    temp.STARTED = time.time()
    load_plugins()
    args = build_parser().parse_args(argv)
    try:
        return await run(args)
    except OzfError as e:
        # config errors surface before a report directory exists
        logger.error(e.message)
        return e.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    return asyncio.run(start(argv))


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logging.info("Stopped")
        sys.exit(INTERNAL)
