import logging

from lurye_ozf.analysis.multiplier_search import FirMultiplier, verify_fdi
from lurye_ozf.commands import NEGATIVE, OK, RunContext, arg, routes
from lurye_ozf.core.exceptions import ConfigError
from lurye_ozf.util.serialization import load_json
from plugins.search import grid_for

logger = logging.getLogger(__name__)


@routes.command(
    "verify",
    help="check the frequency-domain inequality for a given FIR multiplier",
    arguments=[arg("--multiplier", default=None, help="multiplier JSON (inline or path); defaults to config")],
)
async def verify_handler(ctx: RunContext) -> int:
    plant = ctx.config.require_plant()
    if ctx.args.multiplier:
        try:
            M = FirMultiplier.from_json(load_json(ctx.args.multiplier))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"multiplier: {e}")
    elif ctx.config.multiplier is not None:
        M = ctx.config.multiplier
    else:
        raise ConfigError("verify needs a multiplier (--multiplier or config 'multiplier')")
    report = verify_fdi(M, plant, grid_for(ctx, M.B))
    await ctx.store.write_json("fdi_report.json", {"multiplier": M.to_json(), "fdi": report.to_json()})
    ctx.note("passed", report.passed)
    ctx.note("certified", report.certified)
    ctx.note("worst", f"{report.worst_value:.6g} at w={report.worst_frequency:.4f}")
    return OK if report.passed else NEGATIVE
