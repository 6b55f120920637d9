"""Shared constructions for the tests."""
from __future__ import annotations

import random

from igusa_cm.periods import PeriodMatrix, siegel_reduce


def random_omega(ctx, rng: random.Random):
    """A generic point of the Siegel upper half space, Siegel-reduced."""
    mp = ctx.mp

    def r(lo, hi):
        return mp.mpf(rng.uniform(lo, hi)) + mp.mpf(rng.random()) * mp.ldexp(1, -60)

    y11, y22 = r(0.9, 1.4), r(0.9, 1.4)
    x12 = mp.mpc(r(-0.5, 0.5), r(-0.3, 0.3))
    om = ((mp.mpc(r(-0.5, 0.5), y11), x12), (x12, mp.mpc(r(-0.5, 0.5), y22)))
    return siegel_reduce(PeriodMatrix(om, ctx=ctx), ctx).omega


def diagonal(ctx, t1, t2):
    z = ctx.mp.mpc(0)
    return ((ctx.mp.mpc(t1), z), (z, ctx.mp.mpc(t2)))
