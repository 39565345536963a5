import logging

import numpy as np

from lurye_ozf.commands import OK, RunContext, arg, routes
from lurye_ozf.core.exceptions import ConfigError, NotHyperdominant
from lurye_ozf.matrix.hyperdominant import (
    augment_zero_excess,
    birkhoff_decompose,
    classify,
    conic_decompose,
    matrix_from_json,
)
from lurye_ozf.matrix.periodic_banded import PeriodicBandedOperator, combine, conic_decompose_periodic
from lurye_ozf.util.serialization import load_json

logger = logging.getLogger(__name__)


async def _dense(ctx: RunContext, data: dict) -> float:
    M = matrix_from_json(data)
    cls = classify(M)
    augmented = False
    if cls.hyperdominant and not cls.zero_excess:
        M, augmented = augment_zero_excess(M), True
        cls = classify(M)
    n = M.shape[0]
    if cls.zero_excess:
        combo = conic_decompose(M)
        residual = float(np.max(np.abs(combo.conic_sum(n) - M), initial=0.0))
        kind = "conic"
    elif cls.doubly_stochastic:
        combo = birkhoff_decompose(M)
        residual = float(np.max(np.abs(combo.convex_sum(n) - M), initial=0.0))
        kind = "convex"
    else:
        raise NotHyperdominant("input is neither doubly hyperdominant nor doubly stochastic")
    await ctx.store.write_json("combo.json", {
        "kind": kind,
        "augmented": augmented,
        "class": cls.to_json(),
        "terms": combo.to_json(),
        "residual": residual,
    })
    ctx.note("kind", kind)
    ctx.note("terms", len(combo))
    return residual


async def _periodic(ctx: RunContext, data: dict) -> float:
    M = PeriodicBandedOperator.from_json(data)
    terms = conic_decompose_periodic(M)
    residual = combine(terms, M.T, M.B).max_abs_diff(M)
    await ctx.store.write_json("combo.json", {
        "kind": "periodic",
        "T": M.T,
        "B": M.B,
        "terms": [{"weight": alpha, "perm": perm.to_json()} for alpha, perm in terms],
        "residual": residual,
    })
    ctx.note("kind", f"periodic T={M.T} B={M.B}")
    ctx.note("terms", len(terms))
    return residual


@routes.command(
    "decompose",
    help="Birkhoff / conic decomposition of a matrix or periodic banded operator",
    arguments=[arg("input", help="matrix {n, entries} or operator {T, B, rows}, inline JSON or path")],
)
async def decompose_handler(ctx: RunContext) -> int:
    data = load_json(ctx.args.input)
    if not isinstance(data, dict):
        raise ConfigError("decompose input must be a JSON object")
    if "rows" in data:
        residual = await _periodic(ctx, data)
    elif "entries" in data:
        residual = await _dense(ctx, data)
    else:
        raise ConfigError("decompose input needs 'entries' (matrix) or 'rows' (operator)")
    ctx.note("residual", f"{residual:.3e}")
    logger.info(f"reconstruction residual {residual:.3e}")
    return OK
