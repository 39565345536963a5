import logging

from lurye_ozf.commands import NEGATIVE, OK, RunContext, arg, routes
from lurye_ozf.core.exceptions import ConfigError
from lurye_ozf.matrix.periodic_banded import pair_in_GTB, violating_transposition
from lurye_ozf.signal.signals import SequencePair, Signal, is_similarly_ordered, is_unbiased
from lurye_ozf.util.serialization import load_json

logger = logging.getLogger(__name__)


def _signal(source: str, name: str) -> Signal:
    data = load_json(source)
    try:
        if isinstance(data, list):
            return Signal.from_array(data)
        return Signal.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"--{name}: {e}")


@routes.command(
    "check-pair",
    help="test whether a pair (v, w) lies in G^(T,B)",
    arguments=[
        arg("--v", required=True, help="signal v: JSON list (start 0) or {start, values}"),
        arg("--w", required=True, help="signal w: JSON list (start 0) or {start, values}"),
        arg("--T", type=int, default=None, help="period (defaults to certificate.T)"),
        arg("--B", type=int, default=None, help="bandwidth (defaults to certificate.B)"),
    ],
)
async def check_pair_handler(ctx: RunContext) -> int:
    T = ctx.args.T if ctx.args.T is not None else ctx.config.certificate.T
    B = ctx.args.B if ctx.args.B is not None else ctx.config.certificate.B
    p = SequencePair(_signal(ctx.args.v, "v"), _signal(ctx.args.w, "w"))
    verdict = pair_in_GTB(p, T, B, ctx.config.certificate.enum_cap)
    transposition = violating_transposition(p, B)
    await ctx.store.write_json("pair_verdict.json", {
        "T": T,
        "B": B,
        "pair": p.to_json(),
        "verdict": verdict.to_json(),
        "similarly_ordered": is_similarly_ordered(p),
        "unbiased": is_unbiased(p),
        "violating_transposition": transposition.to_json() if transposition else None,
    })
    ctx.note("member", verdict.member)
    ctx.note("checked", verdict.checked)
    if not verdict.member:
        ctx.note("witness", verdict.witness.displacement)
        ctx.note("gap", f"{verdict.gap:.6g}")
    return OK if verdict.member else NEGATIVE
