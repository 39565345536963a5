import logging

from lurye_ozf.analysis.multiplier_search import ClassMode, FrequencyGrid, search_fir
from lurye_ozf.commands import NEGATIVE, OK, RunContext, arg, routes

logger = logging.getLogger(__name__)


def grid_for(ctx: RunContext, B: int) -> FrequencyGrid:
    params = ctx.config.search
    if params.grid_points:
        return FrequencyGrid(params.grid_points, params.eps_freq)
    return FrequencyGrid.for_bandwidth(B, params.eps_freq)


@routes.command(
    "search",
    help="LP search for an FIR multiplier satisfying the frequency-domain inequality",
    arguments=[arg("--B", type=int, default=None, help="multiplier bandwidth (overrides search.B)")],
)
async def search_handler(ctx: RunContext) -> int:
    plant = ctx.config.require_plant()
    B = ctx.args.B if ctx.args.B is not None else ctx.config.search.B
    mode = ClassMode(ctx.config.search.mode)
    report = search_fir(plant, B, grid_for(ctx, B), mode)
    await ctx.store.write_json("search_report.json", report.to_json())
    ctx.note("feasible", report.feasible)
    ctx.note("B", B)
    ctx.note("mode", mode.value)
    if report.feasible:
        ctx.note("margin", f"{report.margin:.6g}")
        ctx.note("coeffs", ", ".join(f"{m:.6g}" for m in report.multiplier.coeffs))
    elif report.farkas is not None:
        ctx.note("farkas", f"b.y = {report.farkas.value:.3g}, residual {report.farkas.residual:.1e}")
    logger.info(f"search B={B} {mode.value}: feasible={report.feasible}")
    return OK if report.feasible else NEGATIVE
