import logging

from lurye_ozf.analysis.simulator import InputFamily, SimConfig, estimate_gain, simulate
from lurye_ozf.commands import OK, RunContext, routes

logger = logging.getLogger(__name__)

TRACE_HEADER = ("k", "e_k", "v_k", "w_k", "gain_tau")


@routes.command("simulate", help="simulate the loop and estimate its l2 gain (a lower bound)")
async def simulate_handler(ctx: RunContext) -> int:
    plant = ctx.config.require_plant()
    params = ctx.config.simulation
    N = params.nonlinearity
    if params.input is not None:
        e, summary = params.input, {}
    else:
        family = InputFamily(n_bursts=params.n_bursts, n_sinusoids=params.n_sinusoids, seed=ctx.seed)
        estimate = estimate_gain(plant, N, family, params.H, params.allow_unstable, ctx.jobs)
        e, summary = estimate.worst_e, {"estimate": estimate.to_json(), "inputs": family.to_json()}
        ctx.note("worst_input", estimate.worst_input)
    result = simulate(SimConfig(plant, N, e, params.H, params.allow_unstable))
    summary["trace"] = result.to_json()
    summary["nonlinearity"] = N.to_json()
    await ctx.store.write_csv("trace.csv", TRACE_HEADER, result.trace_rows())
    await ctx.store.write_json("simulation.json", summary)
    ctx.note("peak_gain", f"{result.peak_gain:.6g}")
    ctx.note("diverged", result.diverged)
    return OK
