import random
from fractions import Fraction

import flint
import pytest
from util import diagonal, random_omega

from igusa_cm import theta as th
from igusa_cm.numeric import PrecisionContext

EVEN_FLINT = [0, 1, 2, 3, 4, 6, 8, 9, 12, 15]


def genus1(mp, a, b, tau, R=60):
    """Naive genus-1 theta constant theta[a, b](tau), summed term by term."""
    s = mp.mpc(0)
    for n in range(-R, R + 1):
        x = n + mp.mpf(float(a))
        s += mp.exp(mp.pi * 1j * (x * x * tau + 2 * x * mp.mpf(float(b))))
    return s


def test_enumeration():
    chars = th.even_characteristics()
    assert len(chars) == 10
    assert chars[0].m1 == (0, 0) and chars[0].m2 == (0, 0) and chars[0].index == 1
    h = Fraction(1, 2)
    assert chars[-1].m1 == (h, h) and chars[-1].m2 == (h, h)
    for c in chars:
        assert (4 * (c.m1[0] * c.m2[0] + c.m1[1] * c.m2[1])) % 2 == 0
    codes = [8 * b[0] + 4 * b[1] + 2 * b[2] + b[3] for b in (c.bits for c in chars)]
    assert codes == EVEN_FLINT


def test_diag_10i_is_one():
    ctx = PrecisionContext(128)
    om = diagonal(ctx, 10j, 10j)
    assert abs(th.theta_constant(th.CHARACTERISTICS[0], om, ctx) - 1) < 1e-12


def test_odd_corner_vanishes_on_diagonal():
    ctx = PrecisionContext(200)
    rng = random.Random(2)
    for _ in range(5):
        om = diagonal(ctx, complex(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 2)), complex(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 2)))
        tv = th.theta_vector(om, ctx)
        assert abs(tv[10]) < ctx.mp.ldexp(1, -ctx.tail_bits)


def test_genus1_factorization():
    ctx = PrecisionContext(200)
    mp = ctx.mp
    rng = random.Random(5)
    for _ in range(10):
        t1 = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.87, 2))
        t2 = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.87, 2))
        tv = th.theta_vector(diagonal(ctx, t1, t2), ctx)
        for ch, v in zip(th.CHARACTERISTICS, tv.values):
            want = genus1(mp, ch.m1[0], ch.m2[0], t1) * genus1(mp, ch.m1[1], ch.m2[1], t2)
            assert abs(v - want) < mp.ldexp(1, -ctx.tail_bits + 4)


def test_genus1_oracle_agrees_with_mpmath_jtheta():
    ctx = PrecisionContext(200)
    mp = ctx.mp
    tau = mp.mpc(0.2, 1.1)
    q = mp.exp(mp.pi * 1j * tau)
    assert abs(genus1(mp, 0, 0, tau) - mp.jtheta(3, 0, q)) < mp.ldexp(1, -180)
    assert abs(genus1(mp, 0, 0.5, tau) - mp.jtheta(4, 0, q)) < mp.ldexp(1, -180)
    assert abs(genus1(mp, 0.5, 0, tau) - mp.jtheta(2, 0, q)) < mp.ldexp(1, -180)
    assert abs(genus1(mp, 0.5, 0.5, tau)) < mp.ldexp(1, -180)


def test_vector_equals_single_constants_bitwise():
    ctx = PrecisionContext(160)
    om = random_omega(ctx, random.Random(1))
    tv = th.theta_vector(om, ctx)
    for ch, v in zip(th.CHARACTERISTICS, tv.values):
        assert th.theta_constant(ch, om, ctx) == v
    assert all(ctx.mp.isfinite(v.real) and ctx.mp.isfinite(v.imag) for v in tv.values)
    assert any(abs(v) > 0.1 for v in tv.values)


def _flint_thetas(om, bits):
    flint.ctx.prec = bits + 40
    A = flint.acb_mat([[flint.acb(flint.arb(om[i][j].real), flint.arb(om[i][j].imag)) for j in range(2)] for i in range(2)])
    v = A.theta(flint.acb_mat([[0], [0]]))
    return [v[0, k] if v.nrows() == 1 else v[k, 0] for k in EVEN_FLINT]


def test_matches_flint():
    ctx = PrecisionContext(300)
    mp = ctx.mp
    rng = random.Random(9)
    for _ in range(3):
        om = random_omega(ctx, rng)
        tv = th.theta_vector(om, ctx)
        for ours, f in zip(tv.values, _flint_thetas(om, ctx.bits)):
            ref = mp.mpc(mp.mpf(f.real.mid().str(120, radius=False)), mp.mpf(f.imag.mid().str(120, radius=False)))
            assert abs(ref - ours) < mp.ldexp(1, -ctx.tail_bits)


def test_tail_certificate():
    ctx = PrecisionContext(200)
    om = random_omega(ctx, random.Random(3))
    tv = th.theta_vector(om, ctx)
    assert tv.certified_tail < -ctx.tail_bits
    wider = th.theta_vector(om, ctx, radius=tv.truncation_radius + 2)
    for a, b in zip(tv.values, wider.values):
        assert abs(a - b) < ctx.mp.ldexp(1, int(tv.certified_tail) + 1)


def test_precision_doubling():
    lo, hi = PrecisionContext(200), PrecisionContext(400)
    rng = random.Random(4)
    om_lo = random_omega(lo, rng)
    om_hi = tuple(tuple(hi.mp.mpc(x) for x in r) for r in om_lo)
    a = th.theta_vector(om_lo, lo)
    b = th.theta_vector(om_hi, hi)
    for x, y in zip(a.values, b.values):
        assert abs(x - y) < hi.mp.ldexp(1, -lo.tail_bits)


def test_permutation_reindexes():
    ctx = PrecisionContext(128)
    om = random_omega(ctx, random.Random(6))
    perm = tuple(reversed(range(10)))
    a = th.theta_vector(om, ctx)
    b = th.theta_vector(om, ctx, permutation=perm)
    assert b.values == tuple(reversed(a.values))
    with pytest.raises(ValueError):
        th.theta_vector(om, ctx, permutation=(0,) * 10)
    with pytest.raises(IndexError):
        a[11]


def test_radius_cap():
    ctx = PrecisionContext(300)
    om = diagonal(ctx, 0.0001j, 1j)
    with pytest.raises(th.PrecisionInfeasible):
        th.theta_vector(om, ctx)
