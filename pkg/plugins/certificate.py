import logging

from lurye_ozf.analysis.multiplier_search import average_to_lti
from lurye_ozf.analysis.sprocedure import (
    CertificateConfig,
    basis_forms,
    build_sigma0,
    certificate_multiplier,
    certificate_search,
)
from lurye_ozf.commands import NEGATIVE, OK, RunContext, routes

logger = logging.getLogger(__name__)


@routes.command("certificate", help="S-procedure certificate search over G^(T,B) at a finite horizon")
async def certificate_handler(ctx: RunContext) -> int:
    plant = ctx.config.require_plant()
    params = ctx.config.certificate
    H = params.horizon
    sigma0 = build_sigma0(plant, params.gamma, H)
    pairs = basis_forms(params.T, params.B, H, params.enum_cap)
    basis = [perm for perm, _ in pairs]
    logger.info(f"{len(basis)} non-identity basis permutations for T={params.T}, B={params.B}")
    result = certificate_search(
        sigma0,
        [form for _, form in pairs],
        CertificateConfig(max_iter=params.max_iter, alpha_max=params.alpha_max),
    )
    report = {
        "T": params.T,
        "B": params.B,
        "H": H,
        "gamma": params.gamma,
        "basis": [perm.to_json() for perm in basis],
        "result": result.to_json(),
    }
    if result.found and basis:
        M = certificate_multiplier(result.certificate, basis)
        report["multiplier"] = M.to_json()
        report["lti_average"] = average_to_lti(M).to_json()
    await ctx.store.write_json("certificate.json", report)
    ctx.note("status", result.status)
    ctx.note("lambda_max", f"{result.certificate.max_eig:.6g}")
    ctx.note("iterations", result.certificate.iterations)
    if result.lower_bound is not None:
        ctx.note("lower_bound", f"{result.lower_bound:.6g}")
    return OK if result.found else NEGATIVE
