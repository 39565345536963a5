import logging

from lurye_ozf.analysis.multiplier_search import ClassMode, ProbeConfig, nonlinear_certificate, search_fir
from lurye_ozf.analysis.nonlinearity import MonotoneFamily, PiecewiseLinearMonotone, SectorNonlinearity
from lurye_ozf.analysis.simulator import InputFamily, destabilization_probe
from lurye_ozf.commands import OK, RunContext, routes
from plugins.search import grid_for

logger = logging.getLogger(__name__)


def _multiplier(ctx: RunContext, plant):
    if ctx.config.multiplier is not None:
        return ctx.config.multiplier
    B = ctx.config.search.B
    report = search_fir(plant, B, grid_for(ctx, B), ClassMode(ctx.config.search.mode))
    return report.multiplier if report.feasible else None


@routes.command("hunt", help="randomized search for a destabilizing monotone nonlinearity")
async def hunt_handler(ctx: RunContext) -> int:
    plant = ctx.config.require_plant()
    params = ctx.config.hunt
    family = MonotoneFamily(params.n_breakpoints, params.x_range, params.slope_cap)
    probe = destabilization_probe(
        plant, family, params.budget, params.H,
        InputFamily(seed=ctx.seed), ctx.seed, params.refine_rounds, ctx.jobs,
        ctx.config.simulation.allow_unstable,
    )
    report = {"family": family.to_json(), "probe": probe.to_json()}
    ctx.note("gamma", f"{probe.gamma:.6g}")
    ctx.note("diverged", probe.diverged)

    M = _multiplier(ctx, plant)
    if M is None:
        logger.warning("no multiplier available; skipping the nonlinear form check")
    else:
        phi0 = params.phi0 or PiecewiseLinearMonotone.linear(1.0)
        psi = params.psi or SectorNonlinearity.zero()
        nonlinear = nonlinear_certificate(
            M, phi0, psi, plant, params.eps,
            ProbeConfig(H=params.probe_H, n_random=params.n_random, seed=ctx.seed), ctx.jobs,
        )
        report["multiplier"] = M.to_json()
        report["nonlinear"] = nonlinear.to_json()
        ctx.note("nonlinear_max", f"{nonlinear.max_value:.6g}")
    await ctx.store.write_json("hunt_report.json", report)
    return OK
